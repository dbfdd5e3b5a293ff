// SVG drawings of lamination diagrams and pictograph columns. Chords are
// hyperbolic geodesics of the unit disk drawn as circular arcs.
#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lamlab/cubic.hpp"
#include "lamlab/lamination.hpp"

namespace lamlab::svg {

namespace detail {

constexpr double tau = 6.283185307179586;

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", std::abs(x) < 5e-4 ? 0.0 : x);
    return buf;
}

inline double to_double(const Rational& r) { return (double)r.num() / (double)r.den(); }

struct Point {
    double x, y;
};

/// screen point at angle t (in turns) on the circle of radius r about (cx, cy)
inline Point at(double cx, double cy, double r, double t) {
    return {cx + r * std::cos(tau * t), cy - r * std::sin(tau * t)};
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

/// geodesic between two boundary angles, as an SVG path
inline std::string geodesic(double cx, double cy, double R, double a, double b) {
    double delta = std::fmod(b - a + 1.0, 1.0);
    if (delta > 0.5) {
        std::swap(a, b);
        delta = 1.0 - delta;
    }
    Point p = at(cx, cy, R, a), q = at(cx, cy, R, b);
    std::string d = "M " + num(p.x) + " " + num(p.y) + " ";
    if (std::abs(delta - 0.5) < 1e-9) return d + "L " + num(q.x) + " " + num(q.y);
    double half = delta * tau / 2;
    double r = R * std::tan(half);
    Point c = at(cx, cy, R / std::cos(half), a + delta / 2);
    double cross = (q.x - p.x) * (c.y - p.y) - (q.y - p.y) * (c.x - p.x);
    return d + "A " + num(r) + " " + num(r) + " 0 0 " + (cross > 0 ? "1" : "0") + " " + num(q.x) + " " + num(q.y);
}

}  // namespace detail

/// the body of one diagram centred at (cx, cy)
inline std::string diagram(const LabelledLamination& ll, double cx, double cy, double R) {
    using namespace detail;
    std::ostringstream o;
    o << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(R)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (const auto& c : ll.base.classes) {
        if (c.size() == 2) {
            o << "<path d=\"" << geodesic(cx, cy, R, to_double(c[0]), to_double(c[1]))
              << "\" fill=\"none\" stroke=\"black\"/>\n";
            continue;
        }
        for (size_t i = 0; i < c.size(); ++i)
            o << "<path d=\"" << geodesic(cx, cy, R, to_double(c[i]), to_double(c[(i + 1) % c.size()]))
              << "\" fill=\"none\" stroke=\"black\"/>\n";
    }
    for (const auto& m : ll.base.marks) {
        Point p = at(cx, cy, R, to_double(m));
        o << "<circle cx=\"" << num(p.x) << "\" cy=\"" << num(p.y) << "\" r=\"2\" fill=\"black\"/>\n";
    }
    // labels sharing a site are written together
    std::map<Site, std::string> text;
    for (const auto& [l, s] : ll.labels) {
        auto& t = text[s];
        t += (t.empty() ? "" : ",") + l.str();
    }
    for (const auto& [s, t] : text) {
        double r = s.kind == SiteKind::Gap ? 0.75 * R : 1.18 * R;
        Point p = at(cx, cy, r, to_double(s.at));
        o << "<text x=\"" << num(p.x) << "\" y=\"" << num(p.y)
          << "\" font-size=\"9\" text-anchor=\"middle\" dominant-baseline=\"middle\">" << escape(t) << "</text>\n";
    }
    return o.str();
}

inline std::string document(double w, double h, const std::string& body) {
    using detail::num;
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n" + body + "</svg>\n";
}

inline std::string render(const LabelledLamination& ll) { return document(200, 200, diagram(ll, 100, 100, 70)); }

inline std::string render(const Lamination& lam) { return render(LabelledLamination(lam)); }

namespace detail {
struct Row {
    std::string name;
    std::optional<Rational> height;
    const LabelledLamination* diagram;
};

inline std::string column(const std::vector<Row>& rows) {
    const double R = 40, step = 120, cx = 160;
    std::ostringstream o;
    for (size_t i = 0; i < rows.size(); ++i) {
        double cy = 60 + step * (double)i;
        if (i > 0)
            o << "<line x1=\"" << num(cx) << "\" y1=\"" << num(cy - step + R) << "\" x2=\"" << num(cx) << "\" y2=\""
              << num(cy - R) << "\" stroke=\"gray\"/>\n";
        o << "<text x=\"" << num(cx - R - 50) << "\" y=\"" << num(cy) << "\" font-size=\"11\">" << escape(rows[i].name)
          << "</text>\n";
        if (rows[i].height)
            o << "<text x=\"" << num(cx + R + 24) << "\" y=\"" << num(cy) << "\" font-size=\"9\">h="
              << rows[i].height->str() << "</text>\n";
        o << diagram(*rows[i].diagram, cx, cy, R);
    }
    return document(2 * cx + 40, 60 + step * (double)rows.size(), o.str());
}
}  // namespace detail

/// a pictograph column from top to bottom joined by spine edges, cut after
/// `depth` critical-nest levels
inline std::string render(const Pictograph& p, int depth = 8) {
    std::vector<detail::Row> rows;
    int nest = 0;
    for (const auto& v : p.column) {
        if (v.name[0] == 'v' && nest++ == depth) break;
        rows.push_back({v.name, v.height, &v.diagram});
    }
    return detail::column(rows);
}

inline std::string render(const TruncatedSpine& s, int depth = 8) {
    std::vector<detail::Row> rows;
    for (int n = 0; n < s.length() && n < depth; ++n)
        rows.push_back({"level " + std::to_string(n), std::nullopt, &s.levels[n]});
    return detail::column(rows);
}

}  // namespace lamlab::svg
