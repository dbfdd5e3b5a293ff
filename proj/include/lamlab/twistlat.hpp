#pragma once

// Twist-period lattices and the level-by-level count of conjugacy classes.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lamlab/rational.hpp"

namespace lamlab {

class lattice_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using QVec = std::vector<Rational>;

inline Rational dot(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw lattice_error("dimension mismatch");
    Rational s(0);
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// A full-rank lattice in Q^N, stored as (1/q) * row span of an integer matrix in
// lower-triangular Hermite normal form: row i is zero past column i, the diagonal
// is positive and entries left of a pivot are reduced modulo that pivot.
class TwistLattice {
  public:
    using int_t = std::int64_t;

    TwistLattice() = default;

    static TwistLattice generated_by(const std::vector<QVec>& gens, size_t rank) {
        if (rank == 0) throw lattice_error("rank must be positive");
        int_t q = 1;
        for (const auto& g : gens) {
            if (g.size() != rank) throw lattice_error("generator has wrong dimension");
            for (const auto& x : g) q = lcm64(q, x.den());
        }
        std::vector<std::vector<__int128>> rows;
        for (const auto& g : gens) {
            std::vector<__int128> r(rank);
            for (size_t j = 0; j < rank; ++j) r[j] = (__int128)g[j].num() * (q / g[j].den());
            rows.push_back(std::move(r));
        }
        TwistLattice L;
        L.q_ = q;
        L.hnf(rows, rank);
        L.reduce_denominator();
        return L;
    }

    static TwistLattice standard(size_t rank) {
        std::vector<QVec> gens;
        for (size_t j = 0; j < rank; ++j) {
            QVec e(rank, Rational(0));
            e[j] = Rational(1);
            gens.push_back(e);
        }
        return generated_by(gens, rank);
    }

    size_t rank() const { return rows_.size(); }
    int_t denominator() const { return q_; }
    const std::vector<std::vector<int_t>>& hnf_rows() const { return rows_; }

    std::vector<QVec> basis() const {
        std::vector<QVec> out;
        for (const auto& r : rows_) {
            QVec v;
            for (auto x : r) v.push_back(Rational(x, q_));
            out.push_back(v);
        }
        return out;
    }

    bool contains(const QVec& v) const {
        if (v.size() != rank()) throw lattice_error("dimension mismatch");
        std::vector<Rational> x;
        for (const auto& c : v) x.push_back(c * Rational(q_));
        for (size_t j = rank(); j-- > 0;) {
            if (!x[j].is_integer()) return false;
            if (x[j].num() % rows_[j][j] != 0) return false;
            Rational c(x[j].num() / rows_[j][j]);
            for (size_t i = 0; i <= j; ++i) x[i] -= c * Rational(rows_[j][i]);
        }
        return true;
    }

    bool contains(const TwistLattice& sub) const {
        for (const auto& b : sub.basis())
            if (!contains(b)) return false;
        return true;
    }

    /// covolume as an exact rational
    Rational covolume() const {
        Rational d(1);
        for (size_t i = 0; i < rank(); ++i) d *= Rational(rows_[i][i], q_);
        return d;
    }

    bool operator==(const TwistLattice&) const = default;

    std::string str() const {
        std::string s = "<";
        auto b = basis();
        for (size_t i = 0; i < b.size(); ++i) {
            if (i) s += ", ";
            s += vector_str(b[i]);
        }
        return s + ">";
    }

    /// e.g. "3e1 + 2e2"
    static std::string vector_str(const QVec& v) {
        std::string s;
        for (size_t j = 0; j < v.size(); ++j) {
            if (v[j] == Rational(0)) continue;
            Rational c = v[j];
            if (!s.empty()) {
                if (c < Rational(0)) {
                    s += " - ";
                    c = -c;
                } else {
                    s += " + ";
                }
            } else if (c < Rational(0)) {
                s += "-";
                c = -c;
            }
            if (c != Rational(1)) s += c.den() == 1 ? c.str() : "(" + c.str() + ")";
            s += "e" + std::to_string(j + 1);
        }
        return s.empty() ? "0" : s;
    }

  private:
    int_t q_ = 1;
    std::vector<std::vector<int_t>> rows_;

    static int_t narrow(__int128 x) {
        if (x > INT64_MAX || x < INT64_MIN) throw overflow_error("lattice entry overflow");
        return (int_t)x;
    }

    void hnf(std::vector<std::vector<__int128>> rows, size_t n) {
        std::vector<std::vector<__int128>> basis(n);
        for (size_t col = n; col-- > 0;) {
            // Euclid on column `col` across all remaining rows
            while (true) {
                size_t piv = rows.size();
                for (size_t r = 0; r < rows.size(); ++r)
                    if (rows[r][col] != 0 &&
                        (piv == rows.size() || abs128(rows[r][col]) < abs128(rows[piv][col])))
                        piv = r;
                if (piv == rows.size()) throw lattice_error("generators do not span a full-rank lattice");
                bool done = true;
                for (size_t r = 0; r < rows.size(); ++r) {
                    if (r == piv || rows[r][col] == 0) continue;
                    __int128 f = rows[r][col] / rows[piv][col];
                    for (size_t j = 0; j < n; ++j) rows[r][j] -= f * rows[piv][j];
                    if (rows[r][col] != 0) done = false;
                }
                if (done) {
                    auto p = rows[piv];
                    if (p[col] < 0)
                        for (auto& x : p) x = -x;
                    basis[col] = p;
                    rows.erase(rows.begin() + piv);
                    break;
                }
            }
        }
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i; j-- > 0;) {
                __int128 p = basis[j][j];
                __int128 f = floordiv(basis[i][j], p);
                if (f != 0)
                    for (size_t c = 0; c <= j; ++c) basis[i][c] -= f * basis[j][c];
            }
        rows_.assign(n, std::vector<int_t>(n, 0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) rows_[i][j] = narrow(basis[i][j]);
    }

    void reduce_denominator() {
        int_t g = q_;
        for (const auto& r : rows_)
            for (auto x : r) g = std::gcd(g, x < 0 ? -x : x);
        if (g > 1) {
            q_ /= g;
            for (auto& r : rows_)
                for (auto& x : r) x /= g;
        }
    }

    static __int128 abs128(__int128 x) { return x < 0 ? -x : x; }
    static __int128 floordiv(__int128 a, __int128 b) {
        __int128 q = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
        return q;
    }
};

/// index [super : sub]; throws unless sub is contained in super
inline std::int64_t lattice_index(const TwistLattice& sub, const TwistLattice& super) {
    if (!super.contains(sub)) throw lattice_error("sublattice is not contained in the lattice");
    Rational r = sub.covolume() / super.covolume();
    if (!r.is_integer()) throw lattice_error("non-integral lattice index");
    return r.num();
}

inline int restricted_aut_order(const std::vector<int>& ks, int d) {
    int g = d - 1;
    for (int k : ks) g = std::gcd(g, k);
    return g == 0 ? 1 : g;
}

inline int ascend_symmetry(int k, int d) { return k / std::gcd(k, d); }

/// lattice generated by e_j, (e_{j+1} - e_j)/k_j and (e_1 - d e_N)/k_0
inline TwistLattice base_lattice(const std::vector<int>& ks, int d, size_t n) {
    if (n == 0 || ks.size() != n) throw lattice_error("need one symmetry order per fundamental edge");
    std::vector<QVec> gens;
    for (size_t j = 0; j < n; ++j) {
        QVec e(n, Rational(0));
        e[j] = Rational(1);
        gens.push_back(e);
    }
    for (size_t j = 1; j < n; ++j) {
        QVec t(n, Rational(0));
        t[j] += Rational(1, ks[j]);
        t[j - 1] -= Rational(1, ks[j]);
        gens.push_back(t);
    }
    QVec t0(n, Rational(0));
    t0[0] += Rational(1, ks[0]);
    t0[n - 1] -= Rational(d, ks[0]);
    gens.push_back(t0);
    return TwistLattice::generated_by(gens, n);
}

inline Rational rotation_sum(const QVec& tau, const QVec& w) { return dot(tau, w); }

// ---------------------------------------------------------------- descriptors

struct OrbitRecord {
    int orbit_length = 1;
    int local_degree = 2;
    int local_symmetry = 1;
    QVec weight;
    bool operator==(const OrbitRecord&) const = default;
};

using LevelRecords = std::vector<OrbitRecord>;

struct SpineDescriptor {
    std::string name;
    int degree = 3;
    std::vector<int> fund_symmetries;
    std::optional<int> aut_order;       // overrides the gcd formula when set
    std::vector<LevelRecords> levels;   // levels[0] is level 1
    bool open_ended = false;            // levels are a prefix of an infinite rule

    size_t fund_count() const { return fund_symmetries.size(); }
    int alpha() const { return aut_order.value_or(restricted_aut_order(fund_symmetries, degree)); }
};

struct Diagnosis {
    bool ok = true;
    std::vector<std::string> messages;
    void fail(std::string m) {
        ok = false;
        messages.push_back(std::move(m));
    }
};

inline Diagnosis validate(const SpineDescriptor& d) {
    Diagnosis out;
    if (d.degree < 2) out.fail("degree must be at least 2");
    if (d.fund_symmetries.empty()) out.fail("at least one fundamental edge is required");
    for (int k : d.fund_symmetries)
        if (k < 1) out.fail("fundamental symmetry orders must be positive");
    if (!out.ok) return out;
    int a = d.alpha();
    for (size_t i = 0; i < d.levels.size(); ++i)
        for (const auto& r : d.levels[i]) {
            std::string where = "level " + std::to_string(i + 1);
            if (r.orbit_length < 1 || a % r.orbit_length != 0)
                out.fail(where + ": orbit length " + std::to_string(r.orbit_length) +
                         " does not divide the automorphism order " + std::to_string(a));
            if (r.local_degree < 2) out.fail(where + ": local degree must be at least 2");
            if (r.local_symmetry < 1) out.fail(where + ": local symmetry must be positive");
            if (r.weight.size() != d.fund_count()) out.fail(where + ": weight has wrong dimension");
        }
    return out;
}

/// appends `count` levels on which every vertex is fully symmetric (k_v = d_v, integral weight)
inline SpineDescriptor with_stable_tail(SpineDescriptor d, int count) {
    LevelRecords tail;
    if (!d.levels.empty())
        for (const auto& r : d.levels.back()) {
            OrbitRecord s = r;
            s.local_symmetry = s.local_degree;
            for (auto& x : s.weight) x = Rational(x.floor());
            tail.push_back(s);
        }
    for (int i = 0; i < count; ++i) d.levels.push_back(tail);
    return d;
}

// ---------------------------------------------------------------- one-level steps

/// does tau satisfy the level condition for some rotation k/m, 0 <= k < m/l
inline bool passes_level(const QVec& tau, const LevelRecords& level, int m, int l) {
    for (int k = 0; k < m / l; ++k) {
        bool all = true;
        for (const auto& v : level) {
            Rational r = (rotation_sum(tau, v.weight) + Rational(k, m)) * Rational(v.local_symmetry);
            if (!r.is_integer()) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

inline TwistLattice refine_lattice(const TwistLattice& prev, const LevelRecords& level, int m, int l) {
    if (l < 1 || m % l != 0) throw lattice_error("automorphism order l must divide m");
    auto b = prev.basis();
    const size_t n = b.size();
    std::vector<int> a(n);
    for (size_t j = 0; j < n; ++j) {
        std::int64_t bound = m;
        for (const auto& v : level)
            bound = lcm64(bound, (rotation_sum(b[j], v.weight) * Rational(v.local_symmetry)).den());
        int found = 0;
        for (std::int64_t c = 1; c <= bound && !found; ++c) {
            QVec t;
            for (const auto& x : b[j]) t.push_back(x * Rational(c));
            if (passes_level(t, level, m, l)) found = (int)c;
        }
        if (!found) throw lattice_error("no multiple of a basis vector passes within the bound");
        a[j] = found;
    }
    std::vector<QVec> gens;
    for (size_t j = 0; j < n; ++j) {
        QVec t;
        for (const auto& x : b[j]) t.push_back(x * Rational(a[j]));
        gens.push_back(t);
    }
    // combinations with 0 <= n_j < a_j
    std::vector<int> c(n, 0);
    while (true) {
        size_t j = 0;
        while (j < n && ++c[j] == a[j]) c[j++] = 0;
        if (j == n) break;
        QVec t(n, Rational(0));
        for (size_t i = 0; i < n; ++i)
            for (size_t r = 0; r < n; ++r) t[r] += b[i][r] * Rational(c[i]);
        if (passes_level(t, level, m, l)) gens.push_back(t);
    }
    return TwistLattice::generated_by(gens, n);
}

/// number of orbits of a cyclic group of order l acting on a cyclic orbit of length o
/// through a quotient of a cyclic group of order m (l | m, o | m)
inline int sub_orbits(int o, int m, int l) {
    int image = l / std::gcd(l, m / o);
    return o / image;
}

/// classes of one-level extensions of a class with automorphism order m, keyed by
/// the automorphism order of the extension
inline std::map<int, std::int64_t> count_extensions(const LevelRecords& level, int m, int alpha) {
    if (m < 1 || alpha % m != 0) throw lattice_error("automorphism order must divide alpha");
    std::vector<int> divs;
    for (int l = 1; l <= m; ++l)
        if (m % l == 0) divs.push_back(l);
    std::map<int, std::int64_t> F, N;
    for (int l : divs) {
        std::int64_t f = 1;
        for (const auto& v : level) {
            // orbit under the class's automorphism group
            int om = v.orbit_length / std::gcd(v.orbit_length, alpha / m) ;
            int copies = v.orbit_length / om;
            int g = v.local_degree / std::gcd(v.local_symmetry, v.local_degree);
            int orbits = copies * sub_orbits(om, m, l);
            for (int i = 0; i < orbits; ++i) f *= g;
        }
        F[l] = f;
    }
    for (auto it = divs.rbegin(); it != divs.rend(); ++it) {
        int l = *it;
        std::int64_t n = F[l];
        for (int lp : divs)
            if (lp != l && lp % l == 0) n -= N[lp];
        N[l] = n;
    }
    std::map<int, std::int64_t> out;
    for (int l : divs) {
        std::int64_t num = (std::int64_t)l * N[l];
        if (num % m != 0) throw lattice_error("non-integral class count");
        if (num / m > 0) out[l] = num / m;
    }
    return out;
}

// ---------------------------------------------------------------- induction

struct ClassGroup {
    int aut = 1;
    TwistLattice lattice;
    std::int64_t count = 0;  // number of conformal classes sharing aut and lattice
    std::string path;        // gluing-choice path of a representative
};

struct LevelReport {
    int level = 0;
    std::int64_t class_count = 0;
    std::map<int, std::int64_t> aut_profile;
    std::vector<ClassGroup> groups;
    Rational top;
};

struct ConjugacyReport {
    TwistLattice base;
    int alpha = 1;
    std::vector<LevelReport> per_level;  // per_level[0] is level 0
    bool infinite = false;
    std::int64_t final_top = 1;
    int stabilized_at = 0;
    std::string note;
};

inline ConjugacyReport analyze(const SpineDescriptor& desc, int max_levels = -1) {
    auto diag = validate(desc);
    if (!diag.ok) throw lattice_error(diag.messages.front());
    const size_t n = desc.fund_count();
    ConjugacyReport rep;
    rep.alpha = desc.alpha();
    rep.base = base_lattice(desc.fund_symmetries, desc.degree, n);
    std::vector<ClassGroup> groups{{rep.alpha, rep.base, 1, ""}};
    auto summarize = [&](int level) {
        LevelReport lr;
        lr.level = level;
        lr.top = Rational(0);
        for (const auto& g : groups) {
            lr.class_count += g.count;
            lr.aut_profile[g.aut] += g.count;
            lr.top += Rational(g.count) / Rational(lattice_index(g.lattice, rep.base));
        }
        if (!lr.top.is_integer() || lr.top < Rational(1))
            throw lattice_error("level " + std::to_string(level) + ": conjugacy count " + lr.top.str() +
                                " is not a positive integer");
        lr.groups = groups;
        rep.per_level.push_back(std::move(lr));
    };
    summarize(0);
    int depth = max_levels < 0 ? (int)desc.levels.size() : std::min<int>(max_levels, (int)desc.levels.size());
    for (int i = 0; i < depth; ++i) {
        const auto& level = desc.levels[i];
        std::map<std::pair<int, std::vector<std::vector<std::int64_t>>>, ClassGroup> next;
        for (const auto& g : groups) {
            auto counts = count_extensions(level, g.aut, rep.alpha);
            for (const auto& [l, c] : counts) {
                ClassGroup ng{l, refine_lattice(g.lattice, level, g.aut, l), g.count * c,
                              g.path + (g.path.empty() ? "" : ".") + std::to_string(l)};
                auto key = std::make_pair(l, ng.lattice.hnf_rows());
                // lattices at a common denominator compare by rows only after the denominators agree
                key.second.push_back({ng.lattice.denominator()});
                auto it = next.find(key);
                if (it == next.end())
                    next.emplace(key, ng);
                else
                    it->second.count += ng.count;
            }
        }
        groups.clear();
        for (auto& [k, g] : next) groups.push_back(g);
        summarize(i + 1);
        const auto& a = rep.per_level[i];
        const auto& b = rep.per_level[i + 1];
        if (b.class_count < a.class_count)
            throw lattice_error("class count decreased at level " + std::to_string(i + 1));
    }
    const auto& last = rep.per_level.back();
    rep.final_top = last.top.num();
    int stab = (int)rep.per_level.size() - 1;
    while (stab > 0 && rep.per_level[stab - 1].class_count == last.class_count) --stab;
    rep.stabilized_at = stab;
    if (desc.open_ended && rep.per_level.size() >= 2 &&
        rep.per_level[rep.per_level.size() - 2].class_count < last.class_count) {
        rep.infinite = true;
        rep.note = "infinite under supplied rule";
    }
    return rep;
}

// ---------------------------------------------------------------- JSON

inline nlohmann::ordered_json to_json(const TwistLattice& L) {
    nlohmann::ordered_json j;
    j["den"] = L.denominator();
    j["rows"] = L.hnf_rows();
    j["text"] = L.str();
    return j;
}

inline nlohmann::ordered_json to_json(const SpineDescriptor& d) {
    nlohmann::ordered_json j;
    j["version"] = "v1";
    j["kind"] = "descriptor";
    j["name"] = d.name;
    j["degree"] = d.degree;
    j["fund_symmetries"] = d.fund_symmetries;
    if (d.aut_order) j["aut_order"] = *d.aut_order;
    j["open_ended"] = d.open_ended;
    j["levels"] = nlohmann::ordered_json::array();
    for (const auto& lv : d.levels) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : lv) {
            nlohmann::ordered_json e;
            e["orbit_length"] = r.orbit_length;
            e["local_degree"] = r.local_degree;
            e["local_symmetry"] = r.local_symmetry;
            e["weight"] = nlohmann::ordered_json::array();
            for (const auto& w : r.weight) e["weight"].push_back(w.str());
            arr.push_back(e);
        }
        j["levels"].push_back(arr);
    }
    return j;
}

inline Rational rational_from_json(const nlohmann::json& v) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    throw lattice_error("expected a rational as an integer or \"p/q\" string");
}

inline SpineDescriptor descriptor_from_json(const nlohmann::json& j) {
    SpineDescriptor d;
    d.name = j.value("name", "");
    d.degree = j.at("degree").get<int>();
    d.fund_symmetries = j.at("fund_symmetries").get<std::vector<int>>();
    if (j.contains("aut_order")) d.aut_order = j.at("aut_order").get<int>();
    d.open_ended = j.value("open_ended", false);
    for (const auto& lv : j.at("levels")) {
        LevelRecords recs;
        for (const auto& e : lv) {
            OrbitRecord r;
            r.orbit_length = e.value("orbit_length", 1);
            r.local_degree = e.at("local_degree").get<int>();
            r.local_symmetry = e.value("local_symmetry", 1);
            for (const auto& w : e.at("weight")) r.weight.push_back(rational_from_json(w));
            recs.push_back(r);
        }
        d.levels.push_back(recs);
    }
    if (j.contains("stable_tail")) d = with_stable_tail(d, j.at("stable_tail").get<int>());
    return d;
}

inline nlohmann::ordered_json to_json(const ConjugacyReport& r) {
    nlohmann::ordered_json j;
    j["version"] = "v1";
    j["alpha"] = r.alpha;
    j["base_lattice"] = to_json(r.base);
    j["levels"] = nlohmann::ordered_json::array();
    for (const auto& lr : r.per_level) {
        nlohmann::ordered_json e;
        e["level"] = lr.level;
        e["class_count"] = lr.class_count;
        nlohmann::ordered_json prof;
        for (const auto& [a, c] : lr.aut_profile) prof[std::to_string(a)] = c;
        e["aut_profile"] = prof;
        e["top"] = lr.top.str();
        e["groups"] = nlohmann::ordered_json::array();
        for (const auto& g : lr.groups) {
            nlohmann::ordered_json ge;
            ge["aut"] = g.aut;
            ge["count"] = g.count;
            ge["lattice"] = to_json(g.lattice);
            ge["index"] = lattice_index(g.lattice, r.base);
            ge["path"] = g.path;
            e["groups"].push_back(ge);
        }
        j["levels"].push_back(e);
    }
    if (r.infinite)
        j["top"] = "infinite";
    else
        j["top"] = r.final_top;
    j["stabilized_at"] = r.stabilized_at;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

}  // namespace lamlab
