// Inductive construction of pictographs: a partial spine of labelled
// laminations grown by label propagation and extension steps, plus the
// exhaustive census of degree-3 truncated spines.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lamlab/cubic.hpp"
#include "lamlab/lamination.hpp"

namespace lamlab {

class build_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BuildVertex {
    std::string name;
    LabelledLamination lam;
    int parent = -1;      // vertex above; -1 at the top
    int parent_gap = -1;  // gap of the parent whose edge leads here
    int level = 0;        // 0 at and above v0
    bool bisector = false;
    int ret_target = -1;  // first-return image, -1 where undefined
    int ret_time = 0;
    std::optional<LamCover> ret_cover;
};

struct BuildState {
    int degree = 2;
    std::vector<BuildVertex> vertices;  // [0] = v0, [1] = its image

    int child_through(int v, int gap) const {
        for (size_t c = 0; c < vertices.size(); ++c)
            if (vertices[c].parent == v && vertices[c].parent_gap == gap) return (int)c;
        return -1;
    }
    bool has_children(int v) const {
        return std::any_of(vertices.begin(), vertices.end(), [&](const BuildVertex& x) { return x.parent == v; });
    }
    /// a strictly below b
    bool below(int a, int b) const {
        for (int p = vertices[a].parent; p >= 0; p = vertices[p].parent)
            if (p == b) return true;
        return false;
    }
    /// time-0 labels sitting in a gap of the vertex, grouped by gap
    std::map<int, std::vector<int>> open_gaps(int v) const {
        std::map<int, std::vector<int>> out;
        const auto& lam = vertices[v].lam;
        auto gs = gaps(lam.base);
        for (const auto& [l, s] : lam.labels)
            if (l.time == 0 && s.kind == SiteKind::Gap && child_through(v, gap_index(gs, s.at)) < 0)
                out[gap_index(gs, s.at)].push_back(l.crit);
        return out;
    }
    /// lower ends still carrying an undetermined critical orbit
    std::vector<int> frontier() const {
        std::vector<int> out;
        for (size_t v = 0; v < vertices.size(); ++v)
            if (!open_gaps((int)v).empty()) out.push_back((int)v);
        return out;
    }
};

namespace detail {

/// site of the image of a label site under a cover onto `img`; may add a mark
inline Site image_site(const LamCover& cov, const LabelledLamination& dom, const Site& s, LabelledLamination& img) {
    auto point_site = [&](const Angle& y) {
        int c = img.base.class_of(y);
        if (c >= 0) return Site{SiteKind::Class, img.base.classes[c].front()};
        if (!std::binary_search(img.base.marks.begin(), img.base.marks.end(), y)) {
            img.base.marks.push_back(y);
            img.base.normalize();
        }
        return Site{SiteKind::Mark, y};
    };
    if (s.kind == SiteKind::Gap) {
        auto dg = gaps(dom.base);
        auto ig = gaps(img.base);
        int g = gap_index(dg, s.at);
        int t = gap_index(ig, cov.map(dg[g].interior()));
        if (t < 0) throw build_error("gap has no image gap");
        return Site{SiteKind::Gap, ig[t].representative()};
    }
    return point_site(cov.map(s.at));
}

inline bool place(LabelledLamination& ll, const Label& l, const Site& s) {
    auto gs = gaps(ll.base);
    Site ns = normalize_site(ll.base, gs, s);
    if (auto old = ll.site_of(l)) {
        if (*old != ns) throw build_error("label " + l.str() + " would sit in two places");
        return false;
    }
    ll.labels.push_back({l, ns});
    normalize(ll);
    return true;
}

}  // namespace detail

/// push labels forward along first-return covers and up into parent gaps until
/// nothing changes
inline void propagate_forward(BuildState& s) {
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& v : s.vertices) {
            if (v.ret_target < 0 || !v.ret_cover) continue;
            auto& w = s.vertices[v.ret_target];
            for (const auto& [l, site] : std::vector(v.lam.labels)) {
                Site t = detail::image_site(*v.ret_cover, v.lam, site, w.lam);
                changed = detail::place(w.lam, Label{l.time + v.ret_time, l.crit}, t) || changed;
            }
        }
    }
}

inline void propagate_upward(BuildState& s) {
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& v : s.vertices) {
            if (v.parent < 0) continue;
            auto& p = s.vertices[v.parent];
            auto gs = gaps(p.lam.base);
            Site g{SiteKind::Gap, gs.at(v.parent_gap).representative()};
            for (const auto& [l, site] : v.lam.labels) changed = detail::place(p.lam, l, g) || changed;
        }
    }
}

/// state after choosing the fundamental cover of degree d onto the trivial lamination
inline BuildState init(int d, const LamCover& cover) {
    if (cover.degree != d) throw build_error("cover degree differs from d");
    Lamination img = cover_image(cover);
    if (!img.trivial()) throw build_error("the image of the fundamental cover must be trivial");
    if (cover.domain.classes.empty()) throw build_error("v0 needs a nontrivial class");
    BuildState s;
    s.degree = d;
    BuildVertex v0, v1;
    v0.name = "v0";
    v0.lam = LabelledLamination(cover.domain);
    int i = 1;
    for (const auto& c : cover.domain.classes)
        for (int k = class_degree(cover, c) - 1; k > 0; --k)
            v0.lam.labels.push_back({Label{0, i++}, Site{SiteKind::Class, c.front()}});
    for (const auto& g : gaps(cover.domain))
        for (int k = gap_degree(cover, g) - 1; k > 0; --k)
            v0.lam.labels.push_back({Label{0, i++}, Site{SiteKind::Gap, g.representative()}});
    normalize(v0.lam);
    v0.parent = 1;
    v0.parent_gap = 0;
    v0.ret_target = 1;
    v0.ret_time = 1;
    v0.ret_cover = cover;
    v1.name = "v1";
    s.vertices = {v0, v1};
    propagate_forward(s);
    propagate_upward(s);
    return s;
}

/// every admissible start in degree d
inline std::vector<BuildState> init_states(int d) {
    std::vector<BuildState> out;
    for (const auto& c : enumerate_covers(Lamination(), d))
        if (!c.domain.classes.empty()) out.push_back(init(d, c));
    return out;
}

struct ReturnTriple {
    bool defer = false;  // w_prime is a lower end; search again from it
    int k = 0;
    int w_prime = -1;
    int gap = -1;            // W, a gap of w_prime
    int v_gap = -1;          // V, the open gap of v_prime
    std::vector<int> I, J;   // critical indices in V and the time-0 ones in W
};

/// the minimal-time return of the open gap of a lower end
inline ReturnTriple first_return_search(const BuildState& s, int v_prime) {
    auto open = s.open_gaps(v_prime);
    if (open.empty()) throw build_error(s.vertices[v_prime].name + " has no undetermined gap");
    ReturnTriple r;
    r.v_gap = open.begin()->first;  // angle-least open gap
    r.I = open.begin()->second;
    std::sort(r.I.begin(), r.I.end());
    int max_time = 0;
    for (const auto& v : s.vertices)
        for (const auto& [l, st] : v.lam.labels) max_time = std::max(max_time, l.time);
    for (int k = 1; k <= max_time; ++k) {
        std::vector<ReturnTriple> found;
        for (size_t w = 0; w < s.vertices.size(); ++w) {
            const auto& lam = s.vertices[w].lam;
            auto gs = gaps(lam.base);
            for (size_t g = 0; g < gs.size(); ++g) {
                auto in_gap = [&](const Label& l) {
                    auto st = lam.site_of(l);
                    return st && st->kind == SiteKind::Gap && gap_index(gs, st->at) == (int)g;
                };
                std::vector<int> J;
                for (int j = 1; j < s.degree; ++j)
                    if (in_gap(Label{0, j})) J.push_back(j);
                if (J.empty()) continue;
                bool all = true;
                for (int i : r.I) all = all && in_gap(Label{k, i});
                if (!all) continue;
                // the labels may not already sit lower down
                bool lower = false;
                for (size_t u = 0; u < s.vertices.size() && !lower; ++u)
                    if (s.below((int)u, (int)w))
                        for (int i : r.I) lower = lower || s.vertices[u].lam.has(Label{k, i});
                if (lower) continue;
                ReturnTriple t = r;
                t.k = k;
                t.w_prime = (int)w;
                t.gap = (int)g;
                t.J = J;
                found.push_back(t);
            }
        }
        if (found.empty()) continue;
        if (found.size() > 1) throw build_error("first return is not unique");
        auto t = found.front();
        if (!s.has_children(t.w_prime)) t.defer = true;
        return t;
    }
    throw build_error("no first return for " + s.vertices[v_prime].name);
}

struct Bisect {};
struct Drop {
    Site site;
};
using DownChoice = std::variant<Bisect, Drop>;

/// move a label from a gap of `upper` into the vertex below that gap
inline BuildState propagate_downward(BuildState s, int upper, int gap, const Label& label, const DownChoice& choice) {
    auto gs = gaps(s.vertices[upper].lam.base);
    auto st = s.vertices[upper].lam.site_of(label);
    if (!st || st->kind != SiteKind::Gap || gap_index(gs, st->at) != gap)
        throw build_error("label " + label.str() + " is not in that gap");
    int c = s.child_through(upper, gap);
    if (std::holds_alternative<Bisect>(choice)) {
        BuildVertex b;
        b.name = s.vertices[upper].name + "." + std::to_string(gap) + "b";
        b.bisector = true;
        b.parent = upper;
        b.parent_gap = gap;
        b.level = c >= 0 ? s.vertices[c].level : s.vertices[upper].level;
        Lamination base;
        base.marks.push_back(Rational(0));
        b.lam = make_labelled(base, {{label, Site{SiteKind::Mark, Rational(0)}}});
        s.vertices.push_back(b);
        if (c >= 0) {
            s.vertices[c].parent = (int)s.vertices.size() - 1;
            s.vertices[c].parent_gap = 0;
        }
        propagate_upward(s);
        return s;
    }
    if (c < 0) throw build_error("nothing below that gap to drop into");
    Site site = std::get<Drop>(choice).site;
    auto& lam = s.vertices[c].lam;
    site.at = mod1(site.at);
    if (site.kind == SiteKind::Class && lam.base.class_of(site.at) < 0) throw build_error("no class at that angle");
    if (site.kind != SiteKind::Class && lam.base.class_of(site.at) >= 0)
        throw build_error("a mark or gap site cannot be a class point");
    if (site.kind == SiteKind::Mark && !std::binary_search(lam.base.marks.begin(), lam.base.marks.end(), site.at)) {
        lam.base.marks.push_back(site.at);
        lam.base.normalize();
    }
    if (lam.has(label)) throw build_error("label " + label.str() + " already placed below");
    detail::place(lam, label, site);
    propagate_forward(s);
    propagate_upward(s);
    return s;
}

namespace detail {
inline CriticalConstraint extension_constraint(const BuildState& s, int w, int k, const std::vector<int>& I) {
    CriticalConstraint c;
    c.free_points = 0;
    std::map<Site, int> over;
    for (int i : I) {
        auto st = s.vertices[w].lam.site_of(Label{k, i});
        if (!st) throw build_error("label " + Label{k, i}.str() + " has not been propagated down");
        over[*st] += 1;
    }
    c.over.assign(over.begin(), over.end());
    return c;
}
}  // namespace detail

/// the branched covers available to the extension step below v_prime
inline std::vector<LamCover> extension_choices(const BuildState& s, int w, int k, const std::vector<int>& I) {
    return enumerate_covers(s.vertices[w].lam.base, (int)I.size() + 1, detail::extension_constraint(s, w, k, I));
}

/// create the vertex below the open gap of v_prime, returning by `cover` onto w
inline BuildState extend(BuildState s, int v_prime, int v_gap, int w, int k, const std::vector<int>& I,
                         const LamCover& cover) {
    auto allowed = extension_choices(s, w, k, I);
    bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const LamCover& c) {
        return c.domain == cover.domain && c.offset == cover.offset;
    });
    if (!ok) throw build_error("cover is not among the extension choices");
    if (s.child_through(v_prime, v_gap) >= 0) throw build_error("that gap already has a vertex below it");
    BuildVertex v;
    v.name = s.vertices[v_prime].name + "." + std::to_string(v_gap);
    v.lam = LabelledLamination(cover.domain);
    v.parent = v_prime;
    v.parent_gap = v_gap;
    v.level = s.vertices[w].level + k;
    v.ret_target = w;
    v.ret_time = k;
    v.ret_cover = cover;
    // each time-0 label goes to a critical site over the site of its image label
    const auto& wl = s.vertices[w].lam;
    auto ig = gaps(wl.base);
    std::vector<std::pair<Site, int>> crit;  // domain site, remaining criticality
    for (const auto& c : cover.domain.classes)
        if (int m = class_degree(cover, c) - 1; m > 0) crit.push_back({Site{SiteKind::Class, c.front()}, m});
    for (const auto& g : gaps(cover.domain))
        if (int m = gap_degree(cover, g) - 1; m > 0) crit.push_back({Site{SiteKind::Gap, g.representative()}, m});
    LabelledLamination scratch = wl;
    for (int i : I) {
        Site target = *wl.site_of(Label{k, i});
        bool placed = false;
        for (auto& [site, m] : crit) {
            if (m == 0) continue;
            if (detail::image_site(cover, v.lam, site, scratch) != target) continue;
            v.lam.labels.push_back({Label{0, i}, site});
            --m;
            placed = true;
            break;
        }
        if (!placed) throw build_error("no critical site over " + Label{k, i}.str());
    }
    normalize(v.lam);
    s.vertices.push_back(v);
    propagate_forward(s);
    propagate_upward(s);
    return s;
}

// ---------------------------------------------------------------- cubic census

struct CensusOptions {
    std::optional<TauSequence> tau;  // keep only spines with this sequence
    std::optional<int> fund_edges;   // 1 or 2; both when absent
    int cap = 8;
};

namespace detail {
inline void grow_spines(std::vector<LabelledLamination>& prefix, int L, int fund, std::vector<TruncatedSpine>& out) {
    if ((int)prefix.size() == L) {
        out.push_back({fund, prefix});
        return;
    }
    for (auto& c : cubic_level_choices(prefix, L, fund)) {
        prefix.push_back(std::move(c));
        grow_spines(prefix, L, fund, out);
        prefix.pop_back();
    }
}

inline std::string spine_sort_key(const TruncatedSpine& s) { return to_json(canonical_form(s)).dump(); }
}  // namespace detail

/// all inequivalent truncated cubic spines of length L, in canonical sorted order
inline std::vector<TruncatedSpine> enumerate_cubic_spines(int L, const CensusOptions& opts = {}) {
    if (L < 1) throw build_error("length must be positive");
    if (L > opts.cap) throw build_error("length " + std::to_string(L) + " exceeds the cap " + std::to_string(opts.cap));
    std::vector<TruncatedSpine> all;
    for (int fund : {2, 1}) {
        if (opts.fund_edges && *opts.fund_edges != fund) continue;
        std::vector<LabelledLamination> prefix;
        detail::grow_spines(prefix, L, fund, all);
    }
    std::map<std::string, TruncatedSpine> uniq;
    for (auto& s : all) {
        if (opts.tau && tau_from_spine(s).values != opts.tau->values) continue;
        uniq.emplace(detail::spine_sort_key(s), std::move(s));
    }
    std::vector<TruncatedSpine> out;
    for (auto& [k, s] : uniq) out.push_back(std::move(s));
    return out;
}

/// independent census for small L: every degree-2 cover of the returning level
/// and every placement of the labels, kept when forward propagation agrees
inline std::vector<TruncatedSpine> brute_force_cubic_spines(int L, int fund) {
    if (L < 1 || L > 3) throw build_error("brute force is limited to lengths 1..3");
    // level 0: label 0 in the central gap, each later label in either gap or on
    // the level curve
    std::vector<std::vector<LabelledLamination>> partial;
    {
        const Lamination base = cubic_level0_base();
        const std::vector<Site> gap_sites{cubic_central_site(), cubic_side_site()};
        std::vector<Site> last_sites = gap_sites;
        if (fund == 1) last_sites = {Site{SiteKind::Class, Rational(0)}, Site{SiteKind::Mark, Rational(1, 6)},
                                     Site{SiteKind::Mark, Rational(1, 2)}};
        std::vector<std::vector<Site>> choices(L);
        for (int j = 1; j < L; ++j) choices[j - 1] = gap_sites;
        std::vector<size_t> pick(L, 0);
        const int slots = fund == 1 ? L : L - 1;
        if (fund == 1) choices[L - 1] = last_sites;
        while (true) {
            Lamination b = base;
            std::vector<std::pair<Label, Site>> labels{{Label{0, 2}, cubic_central_site()}};
            for (int j = 1; j <= slots; ++j) {
                const Site& st = choices[j - 1][pick[j - 1]];
                if (st.kind == SiteKind::Mark) b.marks.push_back(st.at);
                labels.push_back({Label{j, 2}, st});
            }
            b.normalize();
            partial.push_back({make_labelled(b, labels)});
            int i = 0;
            while (i < slots && ++pick[i] == choices[i].size()) pick[i++] = 0;
            if (i >= slots) break;
        }
    }
    for (int n = 1; n < L; ++n) {
        std::vector<std::vector<LabelledLamination>> next;
        for (const auto& pre : partial) {
            std::vector<LevelLabels> info;
            for (const auto& p : pre) info.push_back(level_labels(p));
            int t = detail::tau_below(info, n);
            int k = n - t;
            const auto& up = pre[t];
            // which labels the new level must carry
            std::vector<int> need;
            // fund 1 also carries the label on the level curve of the lower critical point
            for (int j : info[n - 1].central)
                if (j > 0 && j <= (fund == 1 ? L - n : L - n - 1)) need.push_back(j);
            for (const auto& cov : enumerate_covers(up.base, 2)) {
                auto dg = gaps(cov.domain);
                // label 0 must sit in the critical gap over label k
                std::vector<Site> sites;
                for (const auto& c : cov.domain.classes) sites.push_back({SiteKind::Class, c.front()});
                for (const auto& g : dg) sites.push_back({SiteKind::Gap, g.representative()});
                // candidate marks: preimages of marks of the level above
                for (const auto& m : up.base.marks)
                    for (int sh = 0; sh < 2; ++sh) {
                        Angle x = mod1((m - cov.offset + Rational(sh)) / Rational(2));
                        if (cov.domain.class_of(x) < 0) sites.push_back({SiteKind::Mark, x});
                    }
                std::vector<size_t> pick(need.size() + 1, 0);
                while (true) {
                    Lamination b = cov.domain;
                    std::vector<std::pair<Label, Site>> labels;
                    bool ok = true;
                    const Site& z = sites[pick[0]];
                    if (z.kind != SiteKind::Gap || gap_degree(cov, dg[gap_index(dg, z.at)]) != 2) ok = false;
                    labels.push_back({Label{0, 2}, z});
                    for (size_t a = 0; a < need.size(); ++a) {
                        const Site& st = sites[pick[a + 1]];
                        if (st.kind == SiteKind::Mark) b.marks.push_back(st.at);
                        labels.push_back({Label{need[a], 2}, st});
                    }
                    if (ok) {
                        b.normalize();
                        LabelledLamination ll = make_labelled(b, labels);
                        // forward propagation by k steps must land on the labels above
                        LabelledLamination img = up;
                        for (const auto& [l, st] : ll.labels) {
                            if (!ok) break;
                            auto want = up.site_of(Label{l.time + k, 2});
                            LabelledLamination scratch = img;
                            Site got = detail::image_site(cov, ll, st, scratch);
                            ok = want && *want == got;
                        }
                        if (ok) {
                            auto e = pre;
                            e.push_back(ll);
                            next.push_back(e);
                        }
                    }
                    size_t i = 0;
                    while (i < pick.size() && ++pick[i] == sites.size()) pick[i++] = 0;
                    if (i == pick.size()) break;
                }
            }
        }
        partial = std::move(next);
    }
    std::map<std::string, TruncatedSpine> uniq;
    for (auto& p : partial) {
        TruncatedSpine s{fund, p};
        uniq.emplace(detail::spine_sort_key(s), s);
    }
    std::vector<TruncatedSpine> out;
    for (auto& [k, s] : uniq) out.push_back(std::move(s));
    return out;
}

}  // namespace lamlab
