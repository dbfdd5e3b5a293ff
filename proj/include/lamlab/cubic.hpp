#pragma once

// Degree-3 machinery: tau sequences, truncated spines, tableaux, tree codes,
// twist periods and the reconstruction of the full pictograph.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamlab/lamination.hpp"
#include "lamlab/twistlat.hpp"

namespace lamlab {

class cubic_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- tau sequences

struct TauSequence {
    std::vector<int> values;  // values[n-1] = tau(n)
    int fund_edges = 2;

    int length() const { return (int)values.size(); }
    int operator()(int n) const { return values.at(n - 1); }
    bool operator==(const TauSequence&) const = default;

    std::string str() const {
        std::string s;
        for (size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
        return s;
    }
};

inline Diagnostics check_tau(const TauSequence& t) {
    Diagnostics d;
    if (t.fund_edges != 1 && t.fund_edges != 2) d.fail("fund_edges must be 1 or 2");
    for (int n = 1; n <= t.length(); ++n) {
        int v = t(n);
        if (n == 1 && v != 0) d.fail("tau(1) must be 0");
        if (v < 0 || v >= n) d.fail("tau(" + std::to_string(n) + ") must lie in [0, n)");
        if (n > 1 && v > t(n - 1) + 1)
            d.fail("tau(" + std::to_string(n) + ") exceeds tau(" + std::to_string(n - 1) + ") + 1");
    }
    return d;
}

inline TauSequence parse_tau(const std::string& text, int fund_edges = 2) {
    TauSequence t;
    t.fund_edges = fund_edges;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t()"));
        tok.erase(tok.find_last_not_of(" \t()") + 1);
        if (tok.empty()) continue;
        size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &pos);
        } catch (const std::logic_error&) {
            throw cubic_error("bad tau entry '" + tok + "'");
        }
        if (pos != tok.size()) throw cubic_error("bad tau entry '" + tok + "'");
        t.values.push_back(v);
    }
    return t;
}

/// least k with tau^k(n) = 0
inline int return_count(const TauSequence& t, int n) {
    int k = 0;
    while (n > 0) {
        n = t(n);
        ++k;
    }
    return k;
}

inline Rational relative_modulus(const TauSequence& t, int n) {
    int k = return_count(t, n);
    if (k > 62) throw overflow_error("relative modulus denominator too large");
    return Rational(1, (Rational::int_t)1 << k);
}

/// m(1), ..., m(L-1)
inline std::vector<Rational> relative_moduli(const TauSequence& t) {
    std::vector<Rational> out;
    for (int n = 1; n < t.length(); ++n) out.push_back(relative_modulus(t, n));
    return out;
}

struct MarkedGrid;
inline MarkedGrid tableau(const TauSequence& tau);

/// levels n read off the first-return rule alone: tau(i) = n with tau(i+1) <= n, or
/// (one fundamental edge) n = tau^k(L). Misses levels reached by iterated returns.
inline std::vector<int> first_return_marked_levels(const TauSequence& t) {
    const int L = t.length();
    std::set<int> s;
    for (int i = 1; i < L; ++i) {
        int n = t(i);
        if (n > 0 && t(i + 1) <= n) s.insert(n);
    }
    if (t.fund_edges == 1 && L > 0)
        for (int n = t(L); n > 0; n = t(n)) s.insert(n);
    std::vector<int> out{0};
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

/// marked levels in ascending order, preceded by the sentinel 0. Level n is marked
/// when some iterate f^i(c2), i >= 1, lies in P_n but not in P_{n+1} below the
/// level-n curve: grid cell (i, n) marked and (i, n + 1) unmarked.
inline std::vector<int> marked_levels(const TauSequence& t);

/// least positive t with t*m integral (a power of two for cubic moduli)
inline std::int64_t integrality_period(const Rational& m) { return m.den(); }

struct TopReport {
    std::vector<int> marked;              // l_0 = 0, l_1, ...
    std::vector<Rational> moduli_sums;    // m_j
    std::vector<std::int64_t> t;          // t_j
    std::vector<std::int64_t> T;          // T_{l_j}
    std::int64_t top = 1;
};

inline TopReport top_report(const TauSequence& tau) {
    auto chk = check_tau(tau);
    if (!chk) throw cubic_error("inadmissible tau: " + chk.messages.front());
    TopReport r;
    r.marked = marked_levels(tau);
    Rational sum(0);
    int n = 0;
    std::int64_t T = 1;
    for (size_t j = 0; j < r.marked.size(); ++j) {
        for (; n < r.marked[j]; ) {
            ++n;
            sum += relative_modulus(tau, n);
        }
        r.moduli_sums.push_back(sum);
        std::int64_t tj = integrality_period(sum);
        r.t.push_back(tj);
        T = std::max(T, tj);
        r.T.push_back(T);
        if (j >= 62) throw overflow_error("too many marked levels");
        std::int64_t ratio = ((std::int64_t)1 << j) / T;
        r.top = std::max(r.top, ratio);
    }
    return r;
}

inline std::int64_t top_count(const TauSequence& tau) { return top_report(tau).top; }

/// T_0 .. T_{L-1}
inline std::vector<std::int64_t> cubic_twist_periods(const TauSequence& tau) {
    auto r = top_report(tau);
    std::vector<std::int64_t> out;
    for (int n = 0; n < std::max(tau.length(), 1); ++n) {
        std::int64_t T = 1;
        for (size_t j = 0; j < r.marked.size(); ++j)
            if (r.marked[j] <= n) T = std::max(T, r.T[j]);
        out.push_back(T);
    }
    return out;
}

// ---------------------------------------------------------------- solenoids

struct SolenoidRow {
    int j = 0;
    std::int64_t level = 0;
    Rational moduli_sum;
    std::int64_t t = 1;
    std::int64_t T = 1;
    std::int64_t ratio = 1;  // 2^j / T
};

struct SolenoidReport {
    std::vector<SolenoidRow> rows;  // j = 0..J
    bool period_unbounded = false;  // T still doubling at the cap
    std::optional<std::int64_t> sol;  // stabilized 2^j / T, if it stabilized
    bool circles = false;
};

/// marked levels l_1 < l_2 < ... and moduli sums m_j, both for j = 1..J
inline SolenoidReport solenoid_analysis(const std::vector<std::int64_t>& levels,
                                        const std::vector<Rational>& sums) {
    if (levels.size() != sums.size()) throw cubic_error("levels and moduli sums differ in length");
    for (size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1] || sums[i] < sums[i - 1])
            throw cubic_error("marked levels must increase with nondecreasing moduli sums");
    if (levels.size() > 61) throw overflow_error("cap too large");
    SolenoidReport r;
    r.rows.push_back({0, 0, Rational(0), 1, 1, 1});
    std::int64_t T = 1;
    for (size_t i = 0; i < levels.size(); ++i) {
        int j = (int)i + 1;
        std::int64_t t = integrality_period(sums[i]);
        T = std::max(T, t);
        r.rows.push_back({j, levels[i], sums[i], t, T, ((std::int64_t)1 << j) / T});
    }
    const int J = (int)levels.size();
    int window = std::max(2, J / 4);
    if (J >= window + 1) {
        const auto& last = r.rows.back();
        const auto& back = r.rows[J - window];
        r.period_unbounded = last.T > back.T;
        bool stable = true;
        for (int j = J - window; j <= J; ++j) stable = stable && r.rows[j].ratio == last.ratio;
        if (stable) r.sol = last.ratio;
        r.circles = !r.period_unbounded;
    }
    return r;
}

/// prefix of the tau rule with marked levels 2, 4, 2l+1, ...; contains marked levels l_1..l_J
inline TauSequence solenoid_rule_tau(int J) {
    TauSequence t;
    t.fund_edges = 2;
    t.values.push_back(0);
    std::int64_t l = 2;
    for (int j = 1; j <= J + 1; ++j) {
        for (std::int64_t v = 0; v <= l; ++v) t.values.push_back((int)v);
        l = j == 1 ? 4 : 2 * l + 1;
    }
    return t;
}

/// marked levels and moduli sums read from a (prefix of an infinite) tau sequence by
/// the first-return rule, which is linear in the prefix length; on the solenoid rule
/// it agrees with marked_levels
inline void marked_data_from_prefix(const TauSequence& t, int J, std::vector<std::int64_t>& levels,
                                    std::vector<Rational>& sums) {
    const int L = t.length();
    std::set<int> marks;
    for (int i = 1; i < L; ++i)
        if (t(i) > 0 && t(i + 1) <= t(i)) marks.insert(t(i));
    std::vector<int> k(L + 1, 0);
    for (int n = 1; n <= L; ++n) k[n] = 1 + k[t(n)];
    Rational sum(0);
    int n = 0;
    levels.clear();
    sums.clear();
    for (int l : marks) {
        if ((int)levels.size() == J) break;
        for (; n < l;) {
            ++n;
            sum += Rational(1, (Rational::int_t)1 << k[n]);
        }
        levels.push_back(l);
        sums.push_back(sum);
    }
}

// ---------------------------------------------------------------- truncated spines

/// level n of a truncated spine: a labelled lamination whose labels are times j of
/// the lower critical orbit (critical index 2)
struct TruncatedSpine {
    int fund_edges = 2;
    std::vector<LabelledLamination> levels;

    int length() const { return (int)levels.size(); }
    bool operator==(const TruncatedSpine&) const = default;
};

inline Lamination cubic_level0_base() { return Lamination({{Rational(0), Rational(1, 3)}}); }
inline Site cubic_central_site() { return Site{SiteKind::Gap, Rational(2, 3)}; }
inline Site cubic_side_site() { return Site{SiteKind::Gap, Rational(1, 6)}; }

struct LevelLabels {
    std::set<int> gap;       // labels inside gaps
    std::set<int> central;   // labels in the gap holding label 0
    std::optional<int> curve;  // label on the level curve, if any
    std::map<int, Site> site;
};

inline LevelLabels level_labels(const LabelledLamination& ll) {
    LevelLabels out;
    std::optional<Site> zero;
    for (const auto& [l, s] : ll.labels)
        if (l.time == 0 && l.crit == 2) zero = s;
    for (const auto& [l, s] : ll.labels) {
        if (l.crit != 2) continue;
        out.site[l.time] = s;
        if (s.kind == SiteKind::Gap) {
            out.gap.insert(l.time);
            if (zero && s == *zero) out.central.insert(l.time);
        } else {
            out.curve = l.time;
        }
    }
    return out;
}

namespace detail {

inline Label c2(int j) { return Label{j, 2}; }

/// tau(n) for 0 < n < L from the labels of levels 0..n-1
inline int tau_below(const std::vector<LevelLabels>& info, int n) {
    for (int j = n - 1; j >= 0; --j)
        if (info[j].gap.count(n - j)) return j;
    throw cubic_error("no level above " + std::to_string(n) + " carries label " + std::to_string(n));
}

inline int tau_last(const std::vector<LevelLabels>& info, int L) {
    for (int j = L - 2; j >= 0; --j)
        if (info[j].central.count(L - j - 1)) return j + 1;
    return 0;
}

inline std::vector<Angle> spine_encoding_key(const std::vector<LabelledLamination>& levels) {
    std::vector<Angle> key;
    for (const auto& lv : levels) {
        auto e = encoding(canonical_form(lv));
        key.push_back(Rational(-1));
        key.insert(key.end(), e.begin(), e.end());
    }
    return key;
}

}  // namespace detail

/// every admissible level-0 diagram for a spine of length L
inline std::vector<LabelledLamination> cubic_level0_choices(int L, int fund) {
    std::vector<LabelledLamination> out;
    const int free = std::max(0, L - 1);
    for (unsigned mask = 0; mask < (1u << free); ++mask) {
        std::vector<std::pair<Label, Site>> labels{{detail::c2(0), cubic_central_site()}};
        for (int j = 1; j < L; ++j)
            labels.push_back({detail::c2(j), (mask >> (j - 1)) & 1 ? cubic_side_site() : cubic_central_site()});
        if (fund == 1) {
            for (int opt = 0; opt < 3; ++opt) {
                Lamination base = cubic_level0_base();
                auto lab = labels;
                if (opt == 0) {
                    lab.push_back({detail::c2(L), Site{SiteKind::Class, Rational(0)}});
                } else {
                    Angle m = opt == 1 ? Rational(1, 6) : Rational(1, 2);
                    base.marks.push_back(m);
                    lab.push_back({detail::c2(L), Site{SiteKind::Mark, m}});
                }
                out.push_back(make_labelled(base, lab));
            }
        } else {
            out.push_back(make_labelled(cubic_level0_base(), labels));
        }
    }
    return out;
}

/// every admissible level-n diagram (0 < n < L) extending the given levels 0..n-1
inline std::vector<LabelledLamination> cubic_level_choices(const std::vector<LabelledLamination>& prefix,
                                                           int L, int fund) {
    const int n = (int)prefix.size();
    if (n == 0) return cubic_level0_choices(L, fund);
    if (n >= L) throw cubic_error("spine already complete");
    std::vector<LevelLabels> info;
    for (const auto& p : prefix) info.push_back(level_labels(p));
    const int t = detail::tau_below(info, n);
    const int k = n - t;
    const auto& up = prefix[t];
    const auto& upi = info[t];
    auto gs = gaps(up.base);
    int w = gap_index(gs, upi.site.at(k).at);
    if (w < 0) throw cubic_error("branch label is not in a gap");
    Degree2Lift lift = lift_degree2(up.base, gs[w]);
    auto dgs = gaps(lift.domain);
    Site central{SiteKind::Gap, dgs[gap_index(dgs, lift.cut)].representative()};

    struct Opt {
        int label;
        std::vector<Site> sites;
    };
    std::vector<Opt> opts;
    for (int j : info[n - 1].central) {
        if (j > L - n - 1) continue;
        if (!upi.gap.count(j + k)) return {};
        const Site& s = upi.site.at(j + k);
        if (gap_index(gs, s.at) == w)
            opts.push_back({j, {central}});
        else
            opts.push_back({j, {Site{SiteKind::Gap, lift.lift(s.at, 0)}, Site{SiteKind::Gap, lift.lift(s.at, 1)}}});
    }
    if (fund == 1 && info[n - 1].central.count(L - n)) {
        if (!upi.curve || *upi.curve != L - t) return {};
        const Site& s = upi.site.at(L - t);
        opts.push_back({L - n, {Site{s.kind, lift.lift(s.at, 0)}, Site{s.kind, lift.lift(s.at, 1)}}});
    }
    std::vector<LabelledLamination> out;
    std::set<detail::Encoding> seen;
    std::vector<size_t> pick(opts.size(), 0);
    while (true) {
        Lamination base = lift.domain;
        std::vector<std::pair<Label, Site>> labels;
        for (size_t i = 0; i < opts.size(); ++i) {
            const Site& s = opts[i].sites[pick[i]];
            if (s.kind == SiteKind::Mark) base.marks.push_back(s.at);
            labels.push_back({detail::c2(opts[i].label), s});
        }
        base.normalize();
        auto ll = make_labelled(base, labels);
        if (seen.insert(encoding(canonical_form(ll))).second) out.push_back(std::move(ll));
        size_t i = 0;
        while (i < opts.size() && ++pick[i] == opts[i].sites.size()) pick[i++] = 0;
        if (i == opts.size()) break;
    }
    return out;
}

/// tau sequence read from the labels of a truncated spine
inline TauSequence tau_from_spine(const TruncatedSpine& s) {
    TauSequence t;
    t.fund_edges = s.fund_edges;
    const int L = s.length();
    if (L == 0) return t;
    std::vector<LevelLabels> info;
    for (const auto& lv : s.levels) info.push_back(level_labels(lv));
    t.values.push_back(0);
    for (int n = 2; n < L; ++n) t.values.push_back(detail::tau_below(info, n));
    if (L > 1) t.values.push_back(detail::tau_last(info, L));
    return t;
}

inline Diagnostics validate_spine(const TruncatedSpine& s) {
    Diagnostics d;
    const int L = s.length();
    if (s.fund_edges != 1 && s.fund_edges != 2) d.fail("fund_edges must be 1 or 2");
    if (!d) return d;
    for (int n = 0; n < L; ++n) {
        const auto& lv = s.levels[n];
        auto v = validate(lv);
        for (auto& m : v.messages) d.fail("level " + std::to_string(n) + ": " + m);
        for (const auto& [l, st] : lv.labels)
            if (l.crit != 2 || l.time < 0 || l.time > L - n)
                d.fail("level " + std::to_string(n) + ": label " + l.str() + " out of range");
        if (!lv.site_of(detail::c2(0)) || lv.site_of(detail::c2(0))->kind != SiteKind::Gap)
            d.fail("level " + std::to_string(n) + ": label 0 must sit in a gap");
    }
    if (!d) return d;
    // every level must be one of the diagrams forced by the levels above it
    std::vector<LabelledLamination> prefix;
    for (int n = 0; n < L; ++n) {
        auto choices = cubic_level_choices(prefix, L, s.fund_edges);
        auto key = encoding(canonical_form(s.levels[n]));
        bool found = false;
        for (const auto& c : choices) found = found || encoding(canonical_form(c)) == key;
        if (!found) {
            d.fail("level " + std::to_string(n) + " is not a consistent cover of the level above");
            return d;
        }
        prefix.push_back(s.levels[n]);
    }
    return d;
}

/// canonical form of a whole spine (each level rotated independently)
inline TruncatedSpine canonical_form(const TruncatedSpine& s) {
    TruncatedSpine r = s;
    for (auto& lv : r.levels) lv = canonical_form(lv);
    return r;
}

// ---------------------------------------------------------------- tableau

/// Branner-Hubbard marked grid: cell (i, n), i + n <= L, marked iff the i-th iterate
/// of the lower critical point lies in the level-n critical puzzle piece
struct MarkedGrid {
    int L = 0;
    std::vector<std::vector<bool>> cells;  // cells[n][i], i + n <= L

    bool at(int i, int n) const { return cells.at(n).at(i); }
    bool operator==(const MarkedGrid&) const = default;
};

inline MarkedGrid tableau(const TauSequence& tau) {
    const int L = tau.length();
    MarkedGrid g;
    g.L = L;
    g.cells.assign(L + 1, {});
    std::function<bool(int, int)> marked = [&](int i, int n) -> bool {
        if (i == 0) return true;
        int m = n + i;
        int k = m - tau(m);
        if (i == k) return true;
        if (i < k) return false;
        return marked(i - k, n);
    };
    for (int n = 0; n <= L; ++n) {
        g.cells[n].resize(L - n + 1);
        for (int i = 0; i + n <= L; ++i) g.cells[n][i] = marked(i, n);
    }
    return g;
}

inline std::vector<int> marked_levels(const TauSequence& t) {
    const int L = t.length();
    std::set<int> s;
    if (L > 0) {
        auto g = tableau(t);
        for (int n = 1; n < L; ++n)
            for (int i = 1; i + n + 1 <= L && !s.count(n); ++i)
                if (g.at(i, n) && !g.at(i, n + 1)) s.insert(n);
    }
    if (t.fund_edges == 1 && L > 0)
        for (int n = t(L); n > 0; n = t(n)) s.insert(n);
    std::vector<int> out{0};
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

inline MarkedGrid tableau(const TruncatedSpine& s) {
    const int L = s.length();
    std::vector<LevelLabels> info;
    for (const auto& lv : s.levels) info.push_back(level_labels(lv));
    MarkedGrid g;
    g.L = L;
    g.cells.assign(L + 1, {});
    for (int n = 0; n <= L; ++n) {
        g.cells[n].resize(L - n + 1);
        for (int i = 0; i + n <= L; ++i) {
            if (i + n < L)
                g.cells[n][i] = info[n].gap.count(i) > 0;
            else
                g.cells[n][i] = n == 0 || info[n - 1].central.count(i) > 0;
        }
    }
    return g;
}

inline TauSequence tau_from_tableau(const MarkedGrid& g, int fund_edges = 2) {
    TauSequence t;
    t.fund_edges = fund_edges;
    for (int n = 1; n <= g.L; ++n) {
        int best = 0;
        for (int j = 0; j < n; ++j)
            if (g.at(n - j, j)) best = j;
        t.values.push_back(best);
    }
    return t;
}

// ---------------------------------------------------------------- tree codes

using TreeCode = std::vector<std::pair<int, int>>;

inline std::string tree_code_str(const TreeCode& c) {
    std::string s;
    for (size_t i = 0; i < c.size(); ++i)
        s += (i ? "," : "") + std::string("(") + std::to_string(c[i].first) + "," + std::to_string(c[i].second) + ")";
    return s;
}

inline TreeCode tree_code(const TruncatedSpine& s) {
    const int L = s.length();
    std::vector<std::map<int, Angle>> gap_of(L);       // label -> gap representative
    std::vector<std::map<Angle, int>> min_in_gap(L);   // gap representative -> minimal symbol
    for (int n = 0; n < L; ++n) {
        auto info = level_labels(s.levels[n]);
        for (int j : info.gap) {
            Angle g = info.site.at(j).at;
            gap_of[n][j] = g;
            auto it = min_in_gap[n].find(g);
            if (it == min_in_gap[n].end() || j < it->second) min_in_gap[n][g] = j;
        }
    }
    auto appears = [&](int j, int lvl) { return lvl >= 0 && lvl < L && gap_of[lvl].count(j); };
    auto minimal = [&](int j, int lvl) { return appears(j, lvl) && min_in_gap[lvl].at(gap_of[lvl].at(j)) == j; };
    TreeCode code;
    for (int i = 1; i <= L; ++i) {
        int k = 0;
        for (int j = 0; j < i; ++j)
            if (minimal(j, i - j - 1)) ++k;
        int ji = i;
        for (int j = 0; j < i; ++j)
            if (appears(j, i - j - 1) && !minimal(j, i - j - 1)) {
                ji = j;
                break;
            }
        int mi = 0;
        if (ji < i) {
            int lvl = i - ji - 1;
            mi = min_in_gap[lvl].at(gap_of[lvl].at(ji));
        }
        code.push_back({k, i - ji + mi});
    }
    return code;
}

// ---------------------------------------------------------------- pictographs

struct PictographVertex {
    std::string name;
    Rational height;
    int degree = 1;  // local degree of the map at this vertex
    LabelledLamination diagram;
};

/// the column of labelled diagrams along the spine, ordered by decreasing height
struct Pictograph {
    int degree = 3;
    int fund_edges = 1;
    std::vector<PictographVertex> column;
};

namespace detail {
inline std::pair<Label, Site> lab(int time, int crit, SiteKind k, Rational at) {
    return {Label{time, crit}, Site{k, at}};
}
}  // namespace detail

/// the full degree-3 pictograph determined by a truncated spine of positive length
inline Pictograph pictograph_from_truncated(const TruncatedSpine& s) {
    const int L = s.length();
    if (L == 0) throw cubic_error("a length-0 spine does not determine its pictograph");
    std::vector<LevelLabels> info;
    for (const auto& lv : s.levels) info.push_back(level_labels(lv));
    Pictograph p;
    p.degree = 3;
    p.fund_edges = s.fund_edges;
    const Rational half(1, 2);
    auto third_pow = [](int n) {
        Rational h(1);
        for (int i = 0; i < n; ++i) h = h / Rational(3);
        return h;
    };
    // image of v0 at height 3
    {
        Lamination base;
        base.marks.push_back(Rational(0));
        std::vector<std::pair<Label, Site>> labels{detail::lab(1, 1, SiteKind::Mark, Rational(0)),
                                                   detail::lab(0, 1, SiteKind::Gap, half)};
        for (int j = 0; j <= L; ++j) labels.push_back(detail::lab(j, 2, SiteKind::Gap, half));
        if (s.fund_edges == 1) {
            bool on_critical = info[0].curve && info[0].site.at(L).kind == SiteKind::Class;
            Angle at = on_critical ? Rational(0) : half;
            if (!on_critical) base.marks.push_back(at);
            labels.push_back(detail::lab(L + 1, 2, SiteKind::Mark, at));
        }
        base.normalize();
        p.column.push_back({"F(v0)", Rational(3), 3, make_labelled(base, labels)});
    }
    if (s.fund_edges == 2) {
        Lamination base;
        base.marks.push_back(Rational(0));
        std::vector<std::pair<Label, Site>> labels{detail::lab(L, 2, SiteKind::Mark, Rational(0)),
                                                   detail::lab(0, 1, SiteKind::Gap, half)};
        for (int j = 0; j < L; ++j) labels.push_back(detail::lab(j, 2, SiteKind::Gap, half));
        p.column.push_back({"x1", Rational(2), 3, make_labelled(base, labels)});
    }
    for (int n = 0; n < L; ++n) {
        if (s.fund_edges == 2 && n > 0) {
            // trivial diagram at the grand-orbit vertex between levels n-1 and n
            Lamination base;
            std::vector<std::pair<Label, Site>> labels;
            for (int j : info[n - 1].central)
                if (j < L - n) labels.push_back(detail::lab(j, 2, SiteKind::Gap, half));
            if (info[n - 1].central.count(L - n)) {
                base.marks.push_back(Rational(0));
                labels.push_back(detail::lab(L - n, 2, SiteKind::Mark, Rational(0)));
            }
            p.column.push_back({"u" + std::to_string(n), Rational(2) * third_pow(n), 2, make_labelled(base, labels)});
        }
        LabelledLamination lv = s.levels[n];
        if (n == 0) add_label(lv, Label{0, 1}, Site{SiteKind::Class, lv.base.classes.front().front()});
        p.column.push_back({"v" + std::to_string(n), third_pow(n), n == 0 ? 3 : 2, lv});
    }
    if (s.fund_edges == 2) {
        LabelledLamination eight = make_labelled(Lamination({{Rational(0), half}}),
                                                 {detail::lab(0, 2, SiteKind::Class, Rational(0))});
        p.column.push_back({"u" + std::to_string(L), Rational(2) * third_pow(L), 2, eight});
    } else {
        // the level of the lower critical point: a degree-2 cover branched over the marked point
        TauSequence tau = tau_from_spine(s);
        int t = tau(L);
        const auto& up = s.levels[t];
        const Site& mk = level_labels(up).site.at(L - t);
        Angle x = mk.at;
        Degree2Lift lift;
        lift.cut = mod1(x / Rational(2));
        Lamination dom;
        int crit_class = up.base.class_of(x);
        for (size_t c = 0; c < up.base.classes.size(); ++c) {
            if ((int)c == crit_class) {
                std::vector<Angle> all;
                for (const auto& y : up.base.classes[c])
                    for (int sh = 0; sh < 2; ++sh) all.push_back(lift.lift(y, sh));
                dom.classes.push_back(all);
                continue;
            }
            for (int sh = 0; sh < 2; ++sh) {
                std::vector<Angle> cl;
                for (const auto& y : up.base.classes[c]) cl.push_back(lift.lift(y, sh));
                dom.classes.push_back(cl);
            }
        }
        if (crit_class < 0) dom.classes.push_back({lift.cut, mod1(lift.cut + half)});
        dom.normalize();
        auto ll = make_labelled(dom, {detail::lab(0, 2, SiteKind::Class, lift.cut)});
        p.column.push_back({"v" + std::to_string(L), third_pow(L), 2, ll});
    }
    return p;
}

/// the truncated spine inside a degree-3 pictograph
inline TruncatedSpine truncate(const Pictograph& p) {
    TruncatedSpine s;
    s.fund_edges = p.fund_edges;
    std::vector<const PictographVertex*> vs;
    for (const auto& v : p.column)
        if (!v.name.empty() && v.name[0] == 'v') vs.push_back(&v);
    // the last v-vertex of a one-edge pictograph is the level of the lower critical point
    size_t count = p.fund_edges == 1 ? vs.size() - 1 : vs.size();
    for (size_t n = 0; n < count; ++n) {
        LabelledLamination lv = vs[n]->diagram;
        std::vector<std::pair<Label, Site>> kept;
        for (const auto& e : lv.labels)
            if (e.first.crit == 2) kept.push_back(e);
        lv.labels = kept;
        s.levels.push_back(lv);
    }
    return s;
}

/// the two-diagram column of every quadratic polynomial
inline Pictograph quadratic_pictograph() {
    Pictograph p;
    p.degree = 2;
    p.fund_edges = 1;
    Lamination img;
    img.marks.push_back(Rational(0));
    p.column.push_back({"F(v0)", Rational(2), 2,
                        make_labelled(img, {detail::lab(1, 1, SiteKind::Mark, Rational(0))})});
    p.column.push_back({"v0", Rational(1), 2,
                        make_labelled(Lamination({{Rational(0), Rational(1, 2)}}),
                                      {detail::lab(0, 1, SiteKind::Class, Rational(0))})});
    return p;
}

// ---------------------------------------------------------------- descriptors

/// J(n): how many grand-orbit vertices of the lower critical point between v0 and
/// level n lie on the spine
inline int spine_returns(const TruncatedSpine& s, int n) {
    const int L = s.length();
    int J = 0;
    for (int m = 1; m <= n; ++m)
        if (level_labels(s.levels[m - 1]).central.count(L - m)) ++J;
    return J;
}

/// the general-degree descriptor of a two-fundamental-edge cubic spine. Levels
/// alternate between the grand-orbit vertex u_m and the critical-nest vertex v_m.
inline SpineDescriptor descriptor_from_spine(const TruncatedSpine& s) {
    if (s.fund_edges != 2) throw cubic_error("descriptor compilation needs two fundamental edges");
    const int L = s.length();
    TauSequence tau = tau_from_spine(s);
    SpineDescriptor d;
    d.name = "cubic " + tau.str();
    d.degree = 3;
    d.fund_symmetries = {1, 1};
    Rational below(0), upto(0);
    for (int m = 1; m <= L; ++m) {
        upto = below + relative_modulus(tau, m);
        LevelRecords u;
        // the figure eight of the lower critical point keeps its half-turn symmetry
        if (level_labels(s.levels[m - 1]).central.count(L - m))
            u.push_back({1, 2, m == L ? 2 : 1, {below, upto}});
        d.levels.push_back(u);
        if (m < L) {
            int k = symmetry_order(s.levels[m]);
            d.levels.push_back({{1, 2, k, {upto, upto}}});
        }
        below = upto;
    }
    return d;
}

// ---------------------------------------------------------------- JSON

inline nlohmann::ordered_json to_json(const TruncatedSpine& s) {
    nlohmann::ordered_json j;
    j["version"] = "v1";
    j["kind"] = "spine";
    j["fund_edges"] = s.fund_edges;
    j["levels"] = nlohmann::ordered_json::array();
    for (const auto& lv : s.levels) j["levels"].push_back(to_json(lv));
    return j;
}

inline TruncatedSpine spine_from_json(const nlohmann::json& j) {
    TruncatedSpine s;
    s.fund_edges = j.value("fund_edges", 2);
    for (const auto& lv : j.at("levels")) s.levels.push_back(labelled_from_json(lv));
    return s;
}

inline nlohmann::ordered_json to_json(const Pictograph& p) {
    nlohmann::ordered_json j;
    j["version"] = "v1";
    j["kind"] = "pictograph";
    j["degree"] = p.degree;
    j["fund_edges"] = p.fund_edges;
    j["column"] = nlohmann::ordered_json::array();
    for (const auto& v : p.column) {
        nlohmann::ordered_json e;
        e["name"] = v.name;
        e["height"] = v.height.str();
        e["degree"] = v.degree;
        e["diagram"] = to_json(v.diagram);
        j["column"].push_back(e);
    }
    return j;
}

inline nlohmann::ordered_json to_json(const TopReport& r) {
    nlohmann::ordered_json j;
    j["marked_levels"] = r.marked;
    j["moduli_sums"] = nlohmann::ordered_json::array();
    for (const auto& m : r.moduli_sums) j["moduli_sums"].push_back(m.str());
    j["t"] = r.t;
    j["T"] = r.T;
    j["top"] = r.top;
    return j;
}

}  // namespace lamlab
