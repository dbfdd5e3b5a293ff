// Truncated polynomial trees: the dynamics of F on the tree of level curves,
// cut off below a fixed height.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "lamlab/cubic.hpp"
#include "lamlab/lamination.hpp"
#include "lamlab/rational.hpp"

namespace lamlab {

class tree_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TreeVertex {
    std::string id;
    Rational height;
    int degree = 1;       // local degree of F at the vertex
    int edge_degree = 1;  // degree of F on the edge up to the parent
    std::string parent;   // empty at the top of the ray
    std::vector<std::string> children;  // empty string: child cut off below the truncation height
    std::optional<std::string> image;   // absent at the top of the ray

    bool boundary() const {
        return std::any_of(children.begin(), children.end(), [](const std::string& c) { return c.empty(); });
    }
    bool operator==(const TreeVertex&) const = default;
};

/// Vertices are addressed by paths: the ray above v0 is r1, r2, ... bottom up,
/// and the i-th child of a vertex p below the ray is p + "/" + i.
struct PolynomialTree {
    int degree = 2;
    Rational cutoff;
    std::map<std::string, TreeVertex> vertices;

    static constexpr const char* root = "v0";

    const TreeVertex& at(const std::string& id) const {
        auto it = vertices.find(id);
        if (it == vertices.end()) throw tree_error("no vertex " + id);
        return it->second;
    }
    bool has(const std::string& id) const { return vertices.count(id) > 0; }
    bool operator==(const PolynomialTree&) const = default;
};

inline std::string child_id(const std::string& parent, int i) { return parent + "/" + std::to_string(i); }

inline Diagnostics validate_tree(const PolynomialTree& t) {
    Diagnostics d;
    if (!t.has(PolynomialTree::root)) {
        d.fail("missing v0");
        return d;
    }
    const Rational dd(t.degree);
    int max_deg = 0;
    for (const auto& [id, v] : t.vertices) {
        max_deg = std::max(max_deg, v.degree);
        if (v.degree < 1 || v.degree > t.degree) d.fail(id + ": degree out of range");
        if (!v.parent.empty() && v.edge_degree != v.degree)
            d.fail(id + ": edge above has degree " + std::to_string(v.edge_degree) + " but the vertex has degree " +
                   std::to_string(v.degree));
        for (const auto& c : v.children)
            if (!c.empty() && (!t.has(c) || t.at(c).parent != id)) d.fail(id + ": bad child " + c);
        if (!v.boundary()) {
            int excess = v.parent.empty() ? 0 : v.edge_degree - 1;
            for (const auto& c : v.children)
                if (t.has(c)) excess += t.at(c).edge_degree - 1;
            if (2 * v.degree - 2 < excess) d.fail(id + ": more branching than critical points allow");
        }
        if (!v.image) continue;
        if (!t.has(*v.image)) {
            d.fail(id + ": image " + *v.image + " missing");
            continue;
        }
        const auto& w = t.at(*v.image);
        if (w.height != dd * v.height) d.fail(id + ": image height is not d times the height");
        if (!v.parent.empty() && t.at(v.parent).image && t.at(v.parent).image != w.parent)
            d.fail(id + ": F does not commute with the parent map");
        if (v.boundary()) continue;
        // every edge below F(v) is covered exactly deg(v) times
        std::map<std::string, int> cover;
        for (const auto& c : v.children) {
            const auto& cv = t.at(c);
            if (!cv.image || t.at(*cv.image).parent != w.id) {
                d.fail(c + ": child does not map to a child of " + w.id);
                continue;
            }
            cover[*cv.image] += cv.edge_degree;
        }
        for (const auto& c : w.children) {
            if (c.empty()) continue;
            if (cover[c] != v.degree)
                d.fail(id + ": edge to " + c + " covered " + std::to_string(cover[c]) + " times, expected " +
                       std::to_string(v.degree));
        }
    }
    if (max_deg != t.degree) d.fail("no vertex attains the degree of F");

    // every grand orbit meets a branch point; an orbit that reaches the cutoff may
    // branch below it, so only orbits lying wholly inside the truncation are checked
    std::map<std::string, std::string> up;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) {
        auto it = up.find(x);
        if (it == up.end() || it->second == x) return x;
        return it->second = find(it->second);
    };
    for (const auto& [id, v] : t.vertices)
        if (v.image && t.has(*v.image)) up[find(id)] = find(*v.image);
    std::map<std::string, std::pair<bool, bool>> orbit;  // branches, touches the cutoff
    for (const auto& [id, v] : t.vertices) {
        auto& o = orbit[find(id)];
        o.first = o.first || v.children.size() + !v.parent.empty() >= 3;
        o.second = o.second || v.boundary();
    }
    for (const auto& [rep, o] : orbit)
        if (!o.first && !o.second) d.fail(rep + ": grand orbit without branching");
    return d;
}

namespace detail {
inline int tree_level(const PolynomialTree& t, std::string id) {
    const Rational h0 = t.at(PolynomialTree::root).height;
    int l = 0;
    while (t.at(id).height < h0) {
        const auto& img = t.at(id).image;
        if (!img) throw tree_error("orbit of " + id + " leaves the tree");
        id = *img;
        ++l;
    }
    return l;
}
}  // namespace detail

/// product of local degrees along the orbit up to v0's height, over d^level
inline Rational weight(const PolynomialTree& t, const std::string& id) {
    int l = detail::tree_level(t, id);
    Rational w(1);
    std::string x = id;
    for (int i = 0; i < l; ++i) {
        w = w * Rational(t.at(x).degree, t.degree);
        x = *t.at(x).image;
    }
    return w;
}

/// modulus of the edge above the vertex relative to the fundamental edge it covers
inline Rational relative_modulus(const PolynomialTree& t, const std::string& lower) {
    int l = detail::tree_level(t, lower);
    Rational::int_t prod = 1;
    std::string x = lower;
    for (int i = 0; i < l; ++i) {
        prod *= t.at(x).edge_degree;
        x = *t.at(x).image;
    }
    return Rational(1, prod);
}

// ---------------------------------------------------------------- spine and first return

/// star of a spine vertex with the slot map of F on its children
struct SpineStar {
    Rational height;
    int degree = 1;
    int edge_degree = 1;
    std::vector<int> child_degrees;
    std::vector<std::string> spine_children;  // id for spine children, empty otherwise
    std::vector<int> slots;  // child i goes to child slots[i] of F(v); empty without an image
    std::optional<std::string> image;  // explicit only along the ray
    bool operator==(const SpineStar&) const = default;
};

struct SpineReturn {
    int degree = 2;
    std::vector<std::string> ray;  // r1, r2, ... bottom up
    std::map<std::string, SpineStar> stars;
    std::map<std::string, std::pair<std::string, int>> first_return;  // target and time
    bool operator==(const SpineReturn&) const = default;
};

inline SpineReturn spine_and_return(const PolynomialTree& t) {
    SpineReturn s;
    s.degree = t.degree;
    std::set<std::string> spine;
    std::string x = PolynomialTree::root;
    spine.insert(x);
    while (!t.at(x).parent.empty()) {
        x = t.at(x).parent;
        s.ray.push_back(x);
        spine.insert(x);
    }
    for (const auto& [id, v] : t.vertices)
        if (v.edge_degree > 1 || v.degree > 1) spine.insert(id);
    const std::set<std::string> ray(s.ray.begin(), s.ray.end());
    for (const auto& id : spine) {
        const auto& v = t.at(id);
        SpineStar st;
        st.height = v.height;
        st.degree = v.degree;
        st.edge_degree = v.edge_degree;
        if (ray.count(id)) st.image = v.image;
        const TreeVertex* w = v.image ? &t.at(*v.image) : nullptr;
        for (const auto& c : v.children) {
            if (c.empty()) throw tree_error("spine vertex " + id + " is cut off; lower the truncation height");
            const auto& cv = t.at(c);
            st.child_degrees.push_back(cv.edge_degree);
            st.spine_children.push_back(spine.count(c) ? c : "");
            if (w) {
                auto it = std::find(w->children.begin(), w->children.end(), *cv.image);
                st.slots.push_back((int)(it - w->children.begin()));
            }
        }
        s.stars[id] = st;
        // first return to the spine
        std::string y = id;
        for (int r = 1; t.at(y).image; ++r) {
            y = *t.at(y).image;
            if (spine.count(y)) {
                s.first_return[id] = {y, r};
                break;
            }
        }
    }
    return s;
}

/// rebuild the tree above the cutoff from the spine stars; off the spine F is a
/// local homeomorphism, so each off-spine star is a copy of the star of its image
inline PolynomialTree expand_from_spine(const SpineReturn& s, const Rational& cutoff) {
    PolynomialTree t;
    t.degree = s.degree;
    t.cutoff = cutoff;
    if (s.ray.empty()) throw tree_error("spine data has no ray");
    const Rational dd(s.degree);
    auto cmp = [&](const std::string& a, const std::string& b) {
        const auto& va = t.vertices.at(a);
        const auto& vb = t.vertices.at(b);
        if (va.height != vb.height) return va.height < vb.height;
        return a > b;
    };
    std::priority_queue<std::string, std::vector<std::string>, decltype(cmp)> todo(cmp);
    // the ray is known outright
    for (size_t i = 0; i < s.ray.size(); ++i) {
        const auto& st = s.stars.at(s.ray[i]);
        TreeVertex v;
        v.id = s.ray[i];
        v.height = st.height;
        v.degree = st.degree;
        v.edge_degree = st.edge_degree;
        v.parent = i + 1 < s.ray.size() ? s.ray[i + 1] : "";
        v.image = st.image;
        t.vertices[v.id] = v;
    }
    todo.push(s.ray.back());
    while (!todo.empty()) {
        std::string id = todo.top();
        todo.pop();
        TreeVertex& v = t.vertices.at(id);
        const TreeVertex* w = v.image ? &t.vertices.at(*v.image) : nullptr;
        auto st = s.stars.find(id);
        const bool on_spine = st != s.stars.end();
        size_t count;
        if (on_spine) {
            count = st->second.child_degrees.size();
        } else {
            if (!w) throw tree_error("off-spine vertex " + id + " has no image");
            count = w->children.size();
        }
        std::vector<std::string> kids(count);
        for (size_t i = 0; i < count; ++i) {
            TreeVertex c;
            std::optional<std::string> img;
            if (w) {
                int slot = on_spine ? st->second.slots.at(i) : (int)i;
                const std::string& target = w->children.at(slot);
                if (!target.empty()) img = target;
            }
            std::string spine_child = on_spine ? st->second.spine_children[i] : "";
            if (!spine_child.empty()) {
                const auto& cs = s.stars.at(spine_child);
                c.id = spine_child;
                c.height = cs.height;
                c.degree = cs.degree;
                c.edge_degree = st->second.child_degrees[i];
            } else {
                if (!img) continue;  // its image is cut off, so it is too
                c.id = child_id(id, (int)i);
                c.height = t.vertices.at(*img).height / dd;
                c.edge_degree = on_spine ? st->second.child_degrees[i] : 1;
                c.degree = c.edge_degree;
            }
            if (c.height < cutoff) continue;
            c.parent = id;
            c.image = img;
            if (!s.ray.empty() && std::find(s.ray.begin(), s.ray.end(), c.id) != s.ray.end())
                c.image = s.stars.at(c.id).image;
            kids[i] = c.id;
            t.vertices[c.id] = c;
            todo.push(c.id);
        }
        t.vertices.at(id).children = kids;
    }
    return t;
}

// ---------------------------------------------------------------- builders

namespace detail {

inline bool lands_on(const LabelledLamination& img, const std::vector<Gap>& ig, const Site& s, const Angle& y) {
    switch (s.kind) {
        case SiteKind::Class: {
            int c = img.base.class_of(s.at);
            return c >= 0 && img.base.class_of(y) == c;
        }
        case SiteKind::Mark: return y == s.at;
        case SiteKind::Gap: return gap_index(ig, y) >= 0 && gap_index(ig, y) == gap_index(ig, s.at);
    }
    return false;
}

/// offset c making t -> deg*t + c a cover of dom onto img that moves each label
/// forward by r; the least such c is returned
inline std::optional<Angle> return_offset(const LabelledLamination& dom, int deg, int r,
                                          const LabelledLamination& img) {
    auto ig = gaps(img.base);
    auto dg = gaps(dom.base);
    std::set<Angle> targets(img.base.marks.begin(), img.base.marks.end());
    for (const auto& x : img.base.class_points()) targets.insert(x);
    std::set<Angle> cands;
    auto dom_pts = dom.base.class_points();
    if (dom_pts.empty() || targets.empty()) cands.insert(Rational(0));
    else
        for (const auto& y : targets) cands.insert(mod1(y - Rational(deg) * dom_pts.front()));
    for (const auto& c : cands) {
        LamCover cov{dom.base, deg, c};
        bool ok = true;
        for (const auto& a : dom.base.classes) {
            auto b = image_set(cov, a);
            if (b.size() == 1) ok = targets.count(b[0]) > 0;
            else {
                int ci = img.base.class_of(b[0]);
                ok = ci >= 0 && img.base.classes[ci] == b && consecutive_preserving(cov, a, b);
            }
            if (!ok) break;
        }
        for (size_t g = 0; ok && g < dg.size(); ++g) {
            int gi = gap_index(ig, cov.map(dg[g].interior()));
            ok = gi >= 0 && (Rational(deg) * dg[g].length / ig[gi].length).is_integer();
        }
        for (const auto& [l, s] : dom.labels) {
            if (!ok) break;
            auto ts = img.site_of(Label{l.time + r, l.crit});
            if (!ts) continue;
            Angle x = s.kind == SiteKind::Gap ? dg[gap_index(dg, s.at)].interior() : s.at;
            ok = lands_on(img, ig, *ts, cov.map(x));
        }
        if (ok) return c;
    }
    return std::nullopt;
}

inline SpineStar star_from_diagram(const LabelledLamination& dom, const Rational& height, int deg, int r,
                                   const LabelledLamination* img) {
    SpineStar st;
    st.height = height;
    st.degree = deg;
    st.edge_degree = deg;
    auto dg = gaps(dom.base);
    std::optional<Angle> c;
    std::vector<Gap> ig;
    if (img) {
        c = return_offset(dom, deg, r, *img);
        if (!c) throw tree_error("no cover between consecutive spine diagrams");
        ig = gaps(img->base);
    }
    for (const auto& g : dg) {
        st.spine_children.push_back("");
        if (!img) {
            st.child_degrees.push_back(1);
            continue;
        }
        LamCover cov{dom.base, deg, *c};
        int gi = gap_index(ig, cov.map(g.interior()));
        Rational e = Rational(deg) * g.length / ig[gi].length;
        st.child_degrees.push_back((int)e.num());
        st.slots.push_back(gi);
    }
    return st;
}

}  // namespace detail

/// spine data of the tree of a degree-3 truncated spine of positive length
inline SpineReturn cubic_spine_return(const TruncatedSpine& s) {
    Pictograph p = pictograph_from_truncated(s);
    const bool two = s.fund_edges == 2;
    TauSequence tau = tau_from_spine(s);
    std::map<std::string, const PictographVertex*> by_name;
    for (const auto& v : p.column) by_name[v.name] = &v;

    SpineReturn out;
    out.degree = 3;
    // ray: x1 (2), F(v0) (3), F(x1) (6), 9 for two edges; F(v0) (3), 9 for one
    std::vector<Rational> ray_heights = two ? std::vector<Rational>{2, 3, 6, 9} : std::vector<Rational>{3, 9};
    for (size_t i = 0; i < ray_heights.size(); ++i) out.ray.push_back("r" + std::to_string(i + 1));
    for (size_t i = 0; i < ray_heights.size(); ++i) {
        SpineStar st;
        st.height = ray_heights[i];
        st.degree = st.edge_degree = 3;
        st.child_degrees = {3};
        st.spine_children = {i == 0 ? std::string(PolynomialTree::root) : out.ray[i - 1]};
        for (size_t j = 0; j < ray_heights.size(); ++j)
            if (ray_heights[j] == Rational(3) * ray_heights[i]) {
                st.image = out.ray[j];
                st.slots = {0};
            }
        out.stars[out.ray[i]] = st;
    }
    auto ray_at = [&](const Rational& h) {
        for (size_t j = 0; j < ray_heights.size(); ++j)
            if (ray_heights[j] == h) return out.ray[j];
        throw tree_error("ray has no vertex at height " + h.str());
    };
    const LabelledLamination& fv0 = by_name.at("F(v0)")->diagram;

    // walk down the nest: v0, (u1), v1, (u2), v2, ...
    std::vector<std::string> column;  // pictograph names in nest order
    for (const auto& v : p.column)
        if (v.name[0] == 'v' || v.name[0] == 'u') column.push_back(v.name);
    std::map<std::string, std::string> id_of;
    id_of["v0"] = PolynomialTree::root;
    for (size_t i = 0; i < column.size(); ++i) {
        const auto& pv = *by_name.at(column[i]);
        const char kind = pv.name[0];
        const int n = std::stoi(pv.name.substr(1));
        // first return target and time
        std::string target;
        int r = 1;
        if (n == 0) target = "F(v0)";
        else {
            int t = tau(n);
            r = n - t;
            target = kind == 'v' ? "v" + std::to_string(t) : (t == 0 ? "x1" : "u" + std::to_string(t));
        }
        const bool last = i + 1 == column.size();
        const LabelledLamination& img = target == "F(v0)" ? fv0 : by_name.at(target)->diagram;
        SpineStar st = detail::star_from_diagram(pv.diagram, pv.height, pv.degree, r, &img);
        if (!last) {
            // the next nest vertex sits in the gap holding the lower critical point
            auto dg = gaps(pv.diagram.base);
            auto z = pv.diagram.site_of(Label{0, 2});
            int gi = z && z->kind == SiteKind::Gap ? gap_index(dg, z->at) : 0;
            std::string cid = child_id(id_of.at(pv.name), gi);
            st.spine_children[gi] = cid;
            id_of[column[i + 1]] = cid;
        }
        out.stars[id_of.at(pv.name)] = st;
        std::string tid = target == "F(v0)" ? ray_at(3) : target == "x1" ? ray_at(2) : id_of.at(target);
        out.first_return[id_of.at(pv.name)] = {tid, r};
    }
    for (size_t i = 0; i < out.ray.size(); ++i)
        if (out.stars[out.ray[i]].image) out.first_return[out.ray[i]] = {*out.stars[out.ray[i]].image, 1};
    return out;
}

inline PolynomialTree cubic_tree(const TruncatedSpine& s, const Rational& cutoff) {
    return expand_from_spine(cubic_spine_return(s), cutoff);
}

/// the tree of z^2 + c with c escaping, cut off at the given height
inline PolynomialTree quadratic_tree(const Rational& cutoff) {
    SpineReturn s;
    s.degree = 2;
    s.ray = {"r1", "r2"};
    SpineStar r1{Rational(2), 2, 2, {2}, {PolynomialTree::root}, {0}, "r2"};
    SpineStar r2{Rational(4), 2, 2, {2}, {"r1"}, {}, std::nullopt};
    SpineStar v0{Rational(1), 2, 2, {1, 1}, {"", ""}, {0, 0}, std::nullopt};
    s.stars = {{"r1", r1}, {"r2", r2}, {PolynomialTree::root, v0}};
    s.first_return = {{"r1", {"r2", 1}}, {PolynomialTree::root, {"r1", 1}}};
    return expand_from_spine(s, cutoff);
}

// ---------------------------------------------------------------- JSON

inline nlohmann::ordered_json to_json(const PolynomialTree& t) {
    nlohmann::ordered_json j;
    j["version"] = "v1";
    j["kind"] = "tree";
    j["degree"] = t.degree;
    j["cutoff"] = t.cutoff.str();
    j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& [id, v] : t.vertices) {
        nlohmann::ordered_json e;
        e["id"] = id;
        e["height"] = v.height.str();
        e["degree"] = v.degree;
        e["edge_degree"] = v.edge_degree;
        e["parent"] = v.parent;
        e["children"] = v.children;
        e["image"] = v.image ? nlohmann::ordered_json(*v.image) : nlohmann::ordered_json(nullptr);
        j["vertices"].push_back(e);
    }
    return j;
}

inline PolynomialTree tree_from_json(const nlohmann::json& j) {
    PolynomialTree t;
    t.degree = j.at("degree").get<int>();
    t.cutoff = Rational::parse(j.value("cutoff", std::string("0")));
    for (const auto& e : j.at("vertices")) {
        TreeVertex v;
        v.id = e.at("id").get<std::string>();
        v.height = Rational::parse(e.at("height").get<std::string>());
        v.degree = e.value("degree", 1);
        v.edge_degree = e.value("edge_degree", v.degree);
        v.parent = e.value("parent", std::string());
        v.children = e.value("children", std::vector<std::string>{});
        if (e.contains("image") && !e["image"].is_null()) v.image = e["image"].get<std::string>();
        t.vertices[v.id] = v;
    }
    return t;
}

}  // namespace lamlab
