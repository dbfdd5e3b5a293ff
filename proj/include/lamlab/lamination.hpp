#pragma once

// Finite laminations on the circle R/Z, their branched covers and labels.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lamlab/rational.hpp"

namespace lamlab {

using Angle = Rational;

class lamination_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class cover_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- circle helpers

/// true iff x lies in the open counter-clockwise arc (a, b); a == b means the circle minus a
inline bool in_open_arc(const Angle& x, const Angle& a, const Angle& b) {
    if (x == a) return false;
    if (a == b) return true;
    if (a < b) return a < x && x < b;
    return x > a || x < b;
}

/// ccw length from a to b, in (0, 1]
inline Rational arc_length(const Angle& a, const Angle& b) {
    if (a == b) return Rational(1);
    return mod1(b - a);
}

// ---------------------------------------------------------------- laminations

struct Lamination {
    std::vector<std::vector<Angle>> classes;  // nontrivial classes, each sorted, list sorted
    std::vector<Angle> marks;                 // labelled singletons, sorted

    Lamination() = default;
    Lamination(std::vector<std::vector<Angle>> cls, std::vector<Angle> mk = {})
        : classes(std::move(cls)), marks(std::move(mk)) {
        normalize();
    }

    void normalize() {
        for (auto& c : classes) {
            for (auto& a : c) a = mod1(a);
            std::sort(c.begin(), c.end());
            c.erase(std::unique(c.begin(), c.end()), c.end());
        }
        classes.erase(std::remove_if(classes.begin(), classes.end(),
                                     [](const auto& c) { return c.size() < 2; }),
                      classes.end());
        std::sort(classes.begin(), classes.end());
        for (auto& m : marks) m = mod1(m);
        std::sort(marks.begin(), marks.end());
        marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    }

    bool trivial() const { return classes.empty(); }

    std::vector<Angle> class_points() const {
        std::vector<Angle> pts;
        for (const auto& c : classes) pts.insert(pts.end(), c.begin(), c.end());
        std::sort(pts.begin(), pts.end());
        return pts;
    }

    /// index of the class containing x, or -1
    int class_of(const Angle& x) const {
        for (size_t i = 0; i < classes.size(); ++i)
            if (std::binary_search(classes[i].begin(), classes[i].end(), x)) return (int)i;
        return -1;
    }

    bool operator==(const Lamination&) const = default;
};

inline Lamination rotate(const Lamination& lam, const Rational& theta) {
    Lamination r = lam;
    for (auto& c : r.classes)
        for (auto& a : c) a = a + theta;
    for (auto& m : r.marks) m = m + theta;
    r.normalize();
    return r;
}

/// two disjoint finite sets are unlinked iff b lies in a single complementary arc of a
inline bool unlinked(const std::vector<Angle>& a, const std::vector<Angle>& b) {
    if (a.size() < 2 || b.empty()) return true;
    // a is sorted; arc index of x = number of points of a below x (mod |a|)
    auto arc_of = [&](const Angle& x) {
        size_t i = std::lower_bound(a.begin(), a.end(), x) - a.begin();
        return i % a.size();
    };
    size_t first = arc_of(b.front());
    for (const auto& x : b)
        if (arc_of(x) != first) return false;
    return true;
}

struct Diagnostics {
    bool ok = true;
    std::vector<std::string> messages;
    void fail(std::string m) {
        ok = false;
        messages.push_back(std::move(m));
    }
    explicit operator bool() const { return ok; }
};

inline Diagnostics validate(const Lamination& lam) {
    Diagnostics d;
    std::set<Angle> seen;
    for (size_t i = 0; i < lam.classes.size(); ++i) {
        const auto& c = lam.classes[i];
        if (c.size() < 2) d.fail("class #" + std::to_string(i) + " is trivial");
        for (const auto& a : c) {
            if (a < Rational(0) || a >= Rational(1))
                d.fail("angle " + a.str() + " outside [0,1)");
            if (!seen.insert(a).second)
                d.fail("angle " + a.str() + " belongs to two classes (classes must be disjoint)");
        }
        if (!std::is_sorted(c.begin(), c.end())) d.fail("class #" + std::to_string(i) + " not sorted");
    }
    for (size_t i = 0; i < lam.classes.size(); ++i)
        for (size_t j = i + 1; j < lam.classes.size(); ++j)
            if (!unlinked(lam.classes[i], lam.classes[j]))
                d.fail("classes #" + std::to_string(i) + " and #" + std::to_string(j) +
                       " are not unlinked");
    for (const auto& m : lam.marks) {
        if (m < Rational(0) || m >= Rational(1)) d.fail("mark " + m.str() + " outside [0,1)");
        if (seen.count(m)) d.fail("mark " + m.str() + " coincides with a class point");
    }
    return d;
}

// ---------------------------------------------------------------- gaps

struct Arc {
    Angle start;
    Angle end;  // start == end: full circle minus one point
    bool operator==(const Arc&) const = default;
};

struct Gap {
    std::vector<Arc> arcs;  // ccw boundary order, first arc has the least start
    Rational length;

    Angle representative() const {
        const Arc& a = arcs.front();
        return mod1(a.start + arc_length(a.start, a.end) / Rational(2));
    }
    /// interior point whose images under the covers used here avoid class points
    /// and marks (those have denominators built from small primes)
    Angle interior() const {
        const Arc& a = arcs.front();
        return mod1(a.start + arc_length(a.start, a.end) / Rational(1009));
    }
    bool contains(const Angle& x) const {
        for (const auto& a : arcs)
            if (in_open_arc(x, a.start, a.end)) return true;
        return false;
    }
    bool operator==(const Gap&) const = default;
};

/// gaps of a lamination, sorted by the start of their first arc
inline std::vector<Gap> gaps(const Lamination& lam) {
    auto pts = lam.class_points();
    if (pts.empty()) return {Gap{{Arc{Rational(0), Rational(0)}}, Rational(1)}};
    const size_t n = pts.size();
    // the boundary of a gap leaves an arc along the chord back to the previous
    // point of the same class
    std::map<Angle, Angle> pred;
    for (const auto& c : lam.classes)
        for (size_t i = 0; i < c.size(); ++i) pred[c[(i + 1) % c.size()]] = c[i];
    std::map<Angle, size_t> arc_starting_at;
    for (size_t i = 0; i < n; ++i) arc_starting_at[pts[i]] = i;
    std::vector<bool> used(n, false);
    std::vector<Gap> out;
    for (size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        Gap g;
        g.length = Rational(0);
        size_t j = i;
        while (!used[j]) {
            used[j] = true;
            Arc a{pts[j], pts[(j + 1) % n]};
            g.arcs.push_back(a);
            g.length += arc_length(a.start, a.end);
            j = arc_starting_at.at(pred.at(a.end));
        }
        auto m = std::min_element(g.arcs.begin(), g.arcs.end(),
                                  [](const Arc& x, const Arc& y) { return x.start < y.start; });
        std::rotate(g.arcs.begin(), m, g.arcs.end());
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end(),
              [](const Gap& x, const Gap& y) { return x.arcs.front().start < y.arcs.front().start; });
    return out;
}

/// index of the gap containing a non-class point x
inline int gap_index(const std::vector<Gap>& gs, const Angle& x) {
    for (size_t i = 0; i < gs.size(); ++i)
        if (gs[i].contains(x)) return (int)i;
    return -1;
}

// ---------------------------------------------------------------- canonical form

namespace detail {
using Encoding = std::vector<Rational>;

inline void encode_lamination(const Lamination& lam, Encoding& e) {
    e.push_back(Rational((Rational::int_t)lam.classes.size()));
    for (const auto& c : lam.classes) {
        e.push_back(Rational((Rational::int_t)c.size()));
        e.insert(e.end(), c.begin(), c.end());
    }
    e.push_back(Rational((Rational::int_t)lam.marks.size()));
    e.insert(e.end(), lam.marks.begin(), lam.marks.end());
}

inline std::vector<Angle> origin_candidates(const Lamination& lam) {
    auto pts = lam.class_points();
    if (pts.empty()) pts = lam.marks;
    return pts;
}
}  // namespace detail

/// rotation placing a class point (or, failing that, a mark) at 0 with least encoding
inline Lamination canonical_form(const Lamination& lam) {
    auto cands = detail::origin_candidates(lam);
    if (cands.empty()) return lam;
    std::optional<Lamination> best;
    detail::Encoding best_e;
    for (const auto& p : cands) {
        Lamination r = rotate(lam, -p);
        detail::Encoding e;
        detail::encode_lamination(r, e);
        if (!best || e < best_e) {
            best = std::move(r);
            best_e = std::move(e);
        }
    }
    return *best;
}

// ---------------------------------------------------------------- labels

struct Label {
    int time = 0;
    int crit = 1;
    auto operator<=>(const Label&) const = default;
    std::string str() const { return std::to_string(time) + "_" + std::to_string(crit); }
};

enum class SiteKind { Class = 0, Mark = 1, Gap = 2 };

inline const char* site_kind_name(SiteKind k) {
    switch (k) {
        case SiteKind::Class: return "class";
        case SiteKind::Mark: return "mark";
        default: return "gap";
    }
}

/// where a label sits: a point of a class, a marked point, or an interior point of a gap
struct Site {
    SiteKind kind = SiteKind::Gap;
    Angle at;
    auto operator<=>(const Site&) const = default;
};

struct LabelledLamination {
    Lamination base;
    std::vector<std::pair<Label, Site>> labels;  // sorted by label, sites normalized

    LabelledLamination() = default;
    explicit LabelledLamination(Lamination b) : base(std::move(b)) {}

    std::optional<Site> site_of(const Label& l) const {
        for (const auto& [k, s] : labels)
            if (k == l) return s;
        return std::nullopt;
    }
    bool has(const Label& l) const { return site_of(l).has_value(); }

    std::vector<Label> labels_at(const Site& s) const {
        std::vector<Label> out;
        for (const auto& [k, t] : labels)
            if (t == s) out.push_back(k);
        return out;
    }

    bool operator==(const LabelledLamination&) const = default;
};

/// normal representative of a site: least class point, the mark, or the gap's representative
inline Site normalize_site(const Lamination& lam, const std::vector<Gap>& gs, const Site& s) {
    Site r = s;
    r.at = mod1(s.at);
    switch (s.kind) {
        case SiteKind::Class: {
            int c = lam.class_of(r.at);
            if (c < 0) throw lamination_error("class label at " + r.at.str() + " is not on a class");
            r.at = lam.classes[c].front();
            break;
        }
        case SiteKind::Mark:
            if (!std::binary_search(lam.marks.begin(), lam.marks.end(), r.at))
                throw lamination_error("mark label at " + r.at.str() + " is not a marked point");
            break;
        case SiteKind::Gap: {
            int g = gap_index(gs, r.at);
            if (g < 0) throw lamination_error("gap label at " + r.at.str() + " is not inside a gap");
            r.at = gs[g].representative();
            break;
        }
    }
    return r;
}

inline void normalize(LabelledLamination& ll) {
    ll.base.normalize();
    auto gs = gaps(ll.base);
    for (auto& [l, s] : ll.labels) s = normalize_site(ll.base, gs, s);
    std::sort(ll.labels.begin(), ll.labels.end());
    for (size_t i = 1; i < ll.labels.size(); ++i)
        if (ll.labels[i].first == ll.labels[i - 1].first)
            throw lamination_error("label " + ll.labels[i].first.str() + " attached twice");
}

inline LabelledLamination make_labelled(Lamination base, std::vector<std::pair<Label, Site>> labels) {
    LabelledLamination ll(std::move(base));
    ll.labels = std::move(labels);
    normalize(ll);
    return ll;
}

inline void add_label(LabelledLamination& ll, const Label& l, const Site& s) {
    ll.labels.emplace_back(l, s);
    normalize(ll);
}

inline LabelledLamination rotate(const LabelledLamination& ll, const Rational& theta) {
    LabelledLamination r;
    r.base = rotate(ll.base, theta);
    r.labels = ll.labels;
    for (auto& [l, s] : r.labels) s.at = mod1(s.at + theta);
    normalize(r);
    return r;
}

inline Diagnostics validate(const LabelledLamination& ll) {
    Diagnostics d = validate(ll.base);
    if (!d) return d;
    auto gs = gaps(ll.base);
    std::set<Label> seen;
    for (const auto& [l, s] : ll.labels) {
        if (!seen.insert(l).second) d.fail("label " + l.str() + " attached twice");
        if (l.time < 0 || l.crit < 1) d.fail("label " + l.str() + " has a bad time or index");
        try {
            if (normalize_site(ll.base, gs, s) != s) d.fail("label " + l.str() + " site not normalized");
        } catch (const lamination_error& e) {
            d.fail(e.what());
        }
    }
    for (const auto& m : ll.base.marks) {
        bool used = false;
        for (const auto& [l, s] : ll.labels) used = used || (s.kind == SiteKind::Mark && s.at == m);
        if (!used) d.fail("marked point " + m.str() + " carries no label");
    }
    return d;
}

namespace detail {
inline void encode_labelled(const LabelledLamination& ll, Encoding& e) {
    encode_lamination(ll.base, e);
    e.push_back(Rational((Rational::int_t)ll.labels.size()));
    for (const auto& [l, s] : ll.labels) {
        e.push_back(Rational(l.time));
        e.push_back(Rational(l.crit));
        e.push_back(Rational((int)s.kind));
        e.push_back(s.at);
    }
}
}  // namespace detail

inline detail::Encoding encoding(const LabelledLamination& ll) {
    detail::Encoding e;
    detail::encode_labelled(ll, e);
    return e;
}

inline LabelledLamination canonical_form(const LabelledLamination& ll) {
    auto cands = detail::origin_candidates(ll.base);
    if (cands.empty()) {
        LabelledLamination r = ll;
        normalize(r);
        return r;
    }
    std::optional<LabelledLamination> best;
    detail::Encoding best_e;
    for (const auto& p : cands) {
        LabelledLamination r = rotate(ll, -p);
        auto e = encoding(r);
        if (!best || e < best_e) {
            best = std::move(r);
            best_e = std::move(e);
        }
    }
    return *best;
}

/// Order of the rotation group preserving classes and labels. A lamination without
/// class points or marks has infinite symmetry; `bound` is returned for it.
inline int symmetry_order(const LabelledLamination& ll, std::optional<int> bound = std::nullopt) {
    auto pts = ll.base.class_points();
    pts.insert(pts.end(), ll.base.marks.begin(), ll.base.marks.end());
    std::sort(pts.begin(), pts.end());
    if (pts.empty()) return bound.value_or(1);
    LabelledLamination self = ll;
    normalize(self);
    auto ref = encoding(self);
    int k = 0;
    for (const auto& q : pts) {
        if (encoding(rotate(self, q - pts.front())) == ref) ++k;
    }
    return k;
}

inline int symmetry_order(const Lamination& lam, std::optional<int> bound = std::nullopt) {
    return symmetry_order(LabelledLamination(lam), bound);
}

inline int pushforward_symmetry(int k, int d) { return k / std::gcd(k, d); }

// ---------------------------------------------------------------- branched covers

struct LamCover {
    Lamination domain;
    int degree = 1;
    Angle offset = Rational(0);

    Angle map(const Angle& t) const { return mod1(Rational(degree) * t + offset); }
};

namespace detail {
inline std::vector<Angle> image_set(const LamCover& cov, const std::vector<Angle>& a) {
    std::vector<Angle> b;
    for (const auto& x : a) b.push_back(cov.map(x));
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

/// images of consecutive points of a go around the image set consecutively
inline bool consecutive_preserving(const LamCover& cov, const std::vector<Angle>& a,
                                   const std::vector<Angle>& b) {
    if (b.size() < 2) return true;
    if (a.size() % b.size() != 0) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        Angle x = cov.map(a[i]);
        Angle y = cov.map(a[(i + 1) % a.size()]);
        size_t ix = std::lower_bound(b.begin(), b.end(), x) - b.begin();
        if (b[(ix + 1) % b.size()] != y) return false;
    }
    return true;
}
}  // namespace detail

/// image lamination of a cover; throws cover_error if no branched cover exists
inline Lamination cover_image(const LamCover& cov) {
    if (cov.degree < 1) throw cover_error("degree must be positive");
    const auto& dom = cov.domain;
    std::vector<std::vector<Angle>> imgs;
    for (const auto& a : dom.classes) {
        auto b = detail::image_set(cov, a);
        if (!detail::consecutive_preserving(cov, a, b))
            throw cover_error("class image is not consecutive-preserving");
        imgs.push_back(std::move(b));
    }
    // merge overlapping images
    std::vector<size_t> parent(imgs.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<size_t(size_t)> find = [&](size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (size_t i = 0; i < imgs.size(); ++i)
        for (size_t j = i + 1; j < imgs.size(); ++j) {
            std::vector<Angle> inter;
            std::set_intersection(imgs[i].begin(), imgs[i].end(), imgs[j].begin(), imgs[j].end(),
                                  std::back_inserter(inter));
            if (!inter.empty()) parent[find(i)] = find(j);
        }
    std::map<size_t, std::set<Angle>> merged;
    for (size_t i = 0; i < imgs.size(); ++i) merged[find(i)].insert(imgs[i].begin(), imgs[i].end());
    for (size_t i = 0; i < imgs.size(); ++i)
        if (merged[find(i)].size() != imgs[i].size())
            throw cover_error("class does not map onto an entire image class");
    Lamination img;
    std::set<Angle> img_pts;
    for (const auto& [r, s] : merged) {
        img_pts.insert(s.begin(), s.end());
        if (s.size() >= 2) img.classes.emplace_back(s.begin(), s.end());
    }
    for (const auto& m : dom.marks) {
        Angle y = cov.map(m);
        if (!img_pts.count(y)) img.marks.push_back(y);
    }
    img.normalize();
    auto diag = validate(img);
    if (!diag) throw cover_error("image classes are linked: " + diag.messages.front());
    // every gap closure maps onto a gap closure
    auto dg = gaps(dom);
    auto ig = gaps(img);
    for (const auto& g : dg) {
        int target = gap_index(ig, cov.map(g.interior()));
        if (target < 0) throw cover_error("gap does not map into an image gap");
        for (const auto& a : g.arcs) {
            Angle x = mod1(a.start + arc_length(a.start, a.end) / Rational(1009));
            if (gap_index(ig, cov.map(x)) != target)
                throw cover_error("gap arcs map into different image gaps");
        }
        Rational ratio = Rational(cov.degree) * g.length / ig[target].length;
        if (!ratio.is_integer()) throw cover_error("gap degree is not integral");
    }
    return img;
}

inline int gap_degree(const LamCover& cov, const Gap& g) {
    auto img = cover_image(cov);
    auto ig = gaps(img);
    int t = gap_index(ig, cov.map(g.interior()));
    if (t < 0) throw cover_error("gap has no image gap");
    Rational r = Rational(cov.degree) * g.length / ig[t].length;
    if (!r.is_integer()) throw cover_error("non-integral gap degree");
    return (int)r.num();
}

inline int class_degree(const LamCover& cov, const std::vector<Angle>& a) {
    auto b = detail::image_set(cov, a);
    if (a.size() % b.size() != 0) throw cover_error("non-integral class degree");
    return (int)(a.size() / b.size());
}

inline int critical_count(const LamCover& cov) {
    auto img = cover_image(cov);
    auto ig = gaps(img);
    int total = 0;
    for (const auto& a : cov.domain.classes) total += class_degree(cov, a) - 1;
    for (const auto& g : gaps(cov.domain)) {
        int t = gap_index(ig, cov.map(g.interior()));
        Rational r = Rational(cov.degree) * g.length / ig[t].length;
        total += (int)r.num() - 1;
    }
    return total;
}

// ---------------------------------------------------------------- cover enumeration

struct CriticalConstraint {
    std::optional<int> on_classes;            // total criticality carried by domain classes
    std::optional<int> in_gaps;               // total criticality carried by domain gaps
    std::vector<std::pair<Site, int>> over;   // exact criticality over given image sites
    int free_points = -1;                     // unmarked branch values allowed per arc; -1: degree-1
};

namespace detail {

struct ImageSite {
    std::vector<Angle> points;  // image class points, or a single mark / free point
    bool is_class = false;
    bool is_free = false;
    int arc = -1, rank = -1;    // free points only
    Rational::int_t tag = 0;
};

struct CoverSearch {
    const Lamination& image;
    int d;
    std::vector<ImageSite> sites;
    std::vector<std::vector<Angle>> blocks;  // chosen nontrivial classes
    std::vector<Rational::int_t> block_tag;
    std::vector<int> free_used;              // per site
    std::vector<std::pair<std::vector<std::vector<Angle>>, std::vector<Rational::int_t>>> results;

    bool block_ok(const std::vector<Angle>& blk) const {
        for (const auto& b : blocks)
            if (!unlinked(b, blk) || !unlinked(blk, b)) return false;
        return true;
    }

    void site(size_t si) {
        if (si == sites.size()) {
            results.emplace_back(blocks, block_tag);
            return;
        }
        const ImageSite& s = sites[si];
        if (s.is_free && s.rank > 0) {
            // prefix rule: a free point is used only if its predecessor in the arc is
            if (!free_used[si - 1]) {
                site(si + 1);
                return;
            }
        }
        std::vector<Angle> pre;
        for (const auto& x : s.points)
            for (int j = 0; j < d; ++j) pre.push_back(mod1((x + Rational(j)) / Rational(d)));
        std::sort(pre.begin(), pre.end());
        std::vector<bool> assigned(pre.size(), false);
        size_t before = blocks.size();
        partition(si, pre, assigned, false);
        (void)before;
        if (s.is_free) {
            free_used[si] = 0;
            site(si + 1);  // free point left unused
        }
    }

    void partition(size_t si, const std::vector<Angle>& pre, std::vector<bool>& assigned, bool any_nontrivial) {
        const ImageSite& s = sites[si];
        size_t first = 0;
        while (first < pre.size() && assigned[first]) ++first;
        if (first == pre.size()) {
            if (s.is_free) {
                if (!any_nontrivial) return;
                free_used[si] = 1;
            }
            site(si + 1);
            if (s.is_free) free_used[si] = 0;
            return;
        }
        std::vector<size_t> rest;
        for (size_t i = first + 1; i < pre.size(); ++i)
            if (!assigned[i]) rest.push_back(i);
        const size_t m = s.points.size();
        for (unsigned long mask = 0; mask < (1ul << rest.size()); ++mask) {
            std::vector<Angle> blk{pre[first]};
            for (size_t b = 0; b < rest.size(); ++b)
                if (mask & (1ul << b)) blk.push_back(pre[rest[b]]);
            std::sort(blk.begin(), blk.end());
            if (blk.size() % m != 0) continue;
            if (m >= 2) {
                LamCover c{Lamination(), d, Rational(0)};
                auto img = image_set(c, blk);
                if (img != s.points) continue;
                if (!consecutive_preserving(c, blk, img)) continue;
            }
            if (blk.size() >= 2 && !block_ok(blk)) continue;
            for (const auto& x : blk) assigned[std::lower_bound(pre.begin(), pre.end(), x) - pre.begin()] = true;
            if (blk.size() >= 2) {
                blocks.push_back(blk);
                block_tag.push_back(s.tag);
            }
            partition(si, pre, assigned, any_nontrivial || blk.size() >= 2);
            if (blk.size() >= 2) {
                blocks.pop_back();
                block_tag.pop_back();
            }
            for (const auto& x : blk) assigned[std::lower_bound(pre.begin(), pre.end(), x) - pre.begin()] = false;
        }
    }
};

}  // namespace detail

/// All branched covers of `image` of the given degree (offset normalized so the
/// domain is in canonical form), deduplicated up to rotation of the domain.
inline std::vector<LamCover> enumerate_covers(const Lamination& image, int degree,
                                              const CriticalConstraint& cons = {}) {
    if (degree < 1) throw cover_error("enumerate_covers needs a positive degree");
    if (!validate(image)) throw lamination_error("invalid image lamination");
    // a degree-1 cover is a rotation; up to rotation there is only the image itself
    if (degree == 1) return {LamCover{image, 1, Rational(0)}};
    detail::CoverSearch S{image, degree, {}, {}, {}, {}, {}};
    Rational::int_t tag = 1;
    for (const auto& c : image.classes) S.sites.push_back({c, true, false, -1, -1, tag++});
    for (const auto& m : image.marks) S.sites.push_back({{m}, false, false, -1, -1, tag++});
    // free branch values: evenly spaced points inside each arc between image points
    int nfree = cons.free_points < 0 ? degree - 1 : cons.free_points;
    if (cons.on_classes && *cons.on_classes == 0) nfree = 0;
    std::vector<Angle> pts = image.class_points();
    pts.insert(pts.end(), image.marks.begin(), image.marks.end());
    std::sort(pts.begin(), pts.end());
    std::vector<Arc> arcs;
    if (pts.empty())
        arcs.push_back({Rational(0), Rational(0)});
    else
        for (size_t i = 0; i < pts.size(); ++i) arcs.push_back({pts[i], pts[(i + 1) % pts.size()]});
    for (size_t a = 0; a < arcs.size(); ++a)
        for (int r = 0; r < nfree; ++r) {
            Angle x = mod1(arcs[a].start + arc_length(arcs[a].start, arcs[a].end) * Rational(r + 1, nfree + 1));
            S.sites.push_back({{x}, false, true, (int)a, r, 1000 + (Rational::int_t)a});
        }
    S.free_used.assign(S.sites.size(), 0);
    S.site(0);

    auto ig = gaps(image);
    std::map<detail::Encoding, LamCover> uniq;
    for (auto& [blocks, tags] : S.results) {
        LamCover cov{Lamination(blocks), degree, Rational(0)};
        Lamination img;
        try {
            img = cover_image(cov);
        } catch (const cover_error&) {
            continue;
        }
        if (img.classes != image.classes) continue;
        if (!validate(cov.domain)) continue;
        // criticality bookkeeping
        int on_classes = 0, in_gaps = 0;
        std::map<Site, int> over;
        for (const auto& a : cov.domain.classes) {
            int k = class_degree(cov, a) - 1;
            on_classes += k;
            Angle y = cov.map(a.front());
            int ci = image.class_of(y);
            Site s = ci >= 0 ? Site{SiteKind::Class, image.classes[ci].front()} : Site{SiteKind::Mark, y};
            over[s] += k;
        }
        auto dg = gaps(cov.domain);
        for (const auto& g : dg) {
            int t = gap_index(ig, cov.map(g.interior()));
            Rational r = Rational(degree) * g.length / ig[t].length;
            int k = (int)r.num() - 1;
            in_gaps += k;
            over[Site{SiteKind::Gap, ig[t].representative()}] += k;
        }
        if (on_classes + in_gaps != degree - 1) continue;
        if (cons.on_classes && *cons.on_classes != on_classes) continue;
        if (cons.in_gaps && *cons.in_gaps != in_gaps) continue;
        bool ok = true;
        for (const auto& [s, k] : cons.over) {
            Site ns = s.kind == SiteKind::Mark ? Site{SiteKind::Mark, mod1(s.at)} : normalize_site(image, ig, s);
            auto it = over.find(ns);
            if ((it == over.end() ? 0 : it->second) != k) ok = false;
        }
        if (!ok) continue;
        // dedup key: domain labelled with the image site of each class and gap
        LabelledLamination key(cov.domain);
        for (size_t i = 0; i < cov.domain.classes.size(); ++i) {
            Angle y = cov.map(cov.domain.classes[i].front());
            int ci = image.class_of(y);
            int site_tag = ci >= 0 ? ci : 500 + (int)(std::find(image.marks.begin(), image.marks.end(), y) - image.marks.begin());
            if (ci < 0 && !std::binary_search(image.marks.begin(), image.marks.end(), y)) site_tag = 900 + gap_index(ig, y);
            key.labels.push_back({Label{site_tag, 1000 + (int)i}, Site{SiteKind::Class, cov.domain.classes[i].front()}});
        }
        for (size_t i = 0; i < dg.size(); ++i) {
            int t = gap_index(ig, cov.map(dg[i].interior()));
            key.labels.push_back({Label{t, 2000 + (int)i}, Site{SiteKind::Gap, dg[i].representative()}});
        }
        // label indices must not distinguish: replace crit with a constant after sorting by site
        for (auto& [l, s] : key.labels) l.crit = l.crit >= 2000 ? 2 : 1;
        // several labels may now coincide; keep them as a multiset encoding instead
        std::optional<detail::Encoding> best;
        std::optional<Rational> best_shift;
        auto cands = detail::origin_candidates(cov.domain);
        if (cands.empty()) cands.push_back(Rational(0));
        for (const auto& p : cands) {
            Lamination r = rotate(cov.domain, -p);
            auto rg = gaps(r);
            detail::Encoding e;
            detail::encode_lamination(r, e);
            std::vector<std::pair<Site, int>> tagged;
            for (const auto& [l, s] : key.labels) {
                Site rs{s.kind, mod1(s.at - p)};
                rs = normalize_site(r, rg, rs);
                tagged.push_back({rs, l.time * 4 + l.crit});
            }
            std::sort(tagged.begin(), tagged.end());
            for (const auto& [s, t] : tagged) {
                e.push_back(Rational((int)s.kind));
                e.push_back(s.at);
                e.push_back(Rational(t));
            }
            if (!best || e < *best) {
                best = e;
                best_shift = p;
            }
        }
        if (uniq.count(*best)) continue;
        // rotate domain by -p: t' = t - p, so t = t' + p and the map becomes d t' + d p
        LamCover out{rotate(cov.domain, -*best_shift), degree, mod1(Rational(degree) * *best_shift)};
        uniq.emplace(*best, std::move(out));
    }
    std::vector<LamCover> res;
    for (auto& [k, v] : uniq) res.push_back(std::move(v));
    return res;
}

// ---------------------------------------------------------------- degree-2 lifts

/// The degree-2 cover t -> 2t of `image` branched over a point p of a gap:
/// every image class lifts to one class on each sheet.
struct Degree2Lift {
    Lamination domain;
    Angle cut;  // sheet 0 is the open half circle (cut, cut + 1/2)

    Angle lift(const Angle& x, int sheet) const {
        Angle y0 = mod1(x / Rational(2));
        Angle y1 = mod1(y0 + Rational(1, 2));
        bool y0_first = in_open_arc(y0, cut, mod1(cut + Rational(1, 2)));
        return (y0_first == (sheet == 0)) ? y0 : y1;
    }
};

/// branch point chosen inside the given gap of the image, away from marks
inline Degree2Lift lift_degree2(const Lamination& image, const Gap& branch_gap) {
    const Arc& a = branch_gap.arcs.front();
    Rational len = arc_length(a.start, a.end);
    for (const auto& m : image.marks)
        if (in_open_arc(m, a.start, a.end)) len = std::min(len, arc_length(a.start, m));
    Angle p = mod1(a.start + len / Rational(2));
    Degree2Lift L;
    L.cut = mod1(p / Rational(2));
    for (const auto& c : image.classes)
        for (int sheet = 0; sheet < 2; ++sheet) {
            std::vector<Angle> lc;
            for (const auto& x : c) lc.push_back(L.lift(x, sheet));
            L.domain.classes.push_back(lc);
        }
    L.domain.normalize();
    return L;
}

// ---------------------------------------------------------------- JSON

inline Rational::int_t common_den(const std::vector<Angle>& xs) {
    Rational::int_t q = 1;
    for (const auto& x : xs) q = lcm64(q, x.den());
    return q;
}

inline nlohmann::ordered_json to_json(const Lamination& lam) {
    std::vector<Angle> all = lam.class_points();
    all.insert(all.end(), lam.marks.begin(), lam.marks.end());
    auto q = common_den(all);
    nlohmann::ordered_json j;
    j["den"] = q;
    j["classes"] = nlohmann::ordered_json::array();
    for (const auto& c : lam.classes) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& a : c) arr.push_back((a * Rational(q)).num());
        j["classes"].push_back(arr);
    }
    j["marks"] = nlohmann::ordered_json::array();
    for (const auto& m : lam.marks) j["marks"].push_back((m * Rational(q)).num());
    return j;
}

inline Lamination lamination_from_json(const nlohmann::json& j) {
    Rational::int_t q = j.at("den").get<Rational::int_t>();
    if (q <= 0) throw lamination_error("den must be positive");
    Lamination lam;
    for (const auto& c : j.at("classes")) {
        std::vector<Angle> cl;
        for (const auto& n : c) cl.push_back(Rational(n.get<Rational::int_t>(), q));
        lam.classes.push_back(cl);
    }
    if (j.contains("marks"))
        for (const auto& n : j.at("marks")) lam.marks.push_back(Rational(n.get<Rational::int_t>(), q));
    // keep raw order for validation; normalize only angle range
    for (auto& c : lam.classes)
        for (auto& a : c) a = mod1(a);
    for (auto& c : lam.classes) std::sort(c.begin(), c.end());
    std::sort(lam.classes.begin(), lam.classes.end());
    std::sort(lam.marks.begin(), lam.marks.end());
    return lam;
}

inline nlohmann::ordered_json to_json(const LabelledLamination& ll) {
    std::vector<Angle> all = ll.base.class_points();
    all.insert(all.end(), ll.base.marks.begin(), ll.base.marks.end());
    for (const auto& [l, s] : ll.labels) all.push_back(s.at);
    auto q = common_den(all);
    nlohmann::ordered_json j;
    j["den"] = q;
    auto b = to_json(ll.base);
    j["classes"] = nlohmann::ordered_json::array();
    for (const auto& c : ll.base.classes) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& a : c) arr.push_back((a * Rational(q)).num());
        j["classes"].push_back(arr);
    }
    j["marks"] = nlohmann::ordered_json::array();
    for (const auto& m : ll.base.marks) j["marks"].push_back((m * Rational(q)).num());
    j["labels"] = nlohmann::ordered_json::array();
    for (const auto& [l, s] : ll.labels) {
        nlohmann::ordered_json e;
        e["time"] = l.time;
        e["crit"] = l.crit;
        e["site"] = site_kind_name(s.kind);
        e["at"] = (s.at * Rational(q)).num();
        j["labels"].push_back(e);
    }
    return j;
}

inline LabelledLamination labelled_from_json(const nlohmann::json& j) {
    LabelledLamination ll(lamination_from_json(j));
    Rational::int_t q = j.at("den").get<Rational::int_t>();
    if (j.contains("labels"))
        for (const auto& e : j.at("labels")) {
            std::string k = e.at("site").get<std::string>();
            SiteKind kind = k == "class" ? SiteKind::Class : k == "mark" ? SiteKind::Mark : SiteKind::Gap;
            if (k != "class" && k != "mark" && k != "gap") throw lamination_error("unknown site kind '" + k + "'");
            ll.labels.push_back({Label{e.at("time").get<int>(), e.value("crit", 1)},
                                 Site{kind, Rational(e.at("at").get<Rational::int_t>(), q)}});
        }
    if (!validate(ll.base)) return ll;  // caller validates and reports
    normalize(ll);
    return ll;
}

}  // namespace lamlab
