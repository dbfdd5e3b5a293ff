// lamlab command-line front end. Exit codes: 0 success, 1 domain error, 2 usage error.
#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "lamlab/builder.hpp"
#include "lamlab/svg.hpp"
#include "lamlab/tree.hpp"
#include "lamlab/twistlat.hpp"

using namespace lamlab;
using json = nlohmann::ordered_json;

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string tau;
    int fund_edges = 2;
    int length = 0;
    int cap = 8;
    int depth = 8;
    std::string format = "json";
    std::string out;
    std::string input;
    bool quadratic = false;
};

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    f << text;
}

nlohmann::json read_json(const std::string& path) {
    if (path.empty()) throw usage_error("an input file is required");
    std::ifstream f(path);
    if (!f) throw usage_error("cannot open " + path);
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw usage_error(std::string("parse failure: ") + e.what());
    }
}

TauSequence tau_arg(const Options& o) {
    if (o.tau.empty()) throw usage_error("--tau is required");
    TauSequence t;
    try {
        t = parse_tau(o.tau, o.fund_edges);
    } catch (const std::exception& e) {
        throw usage_error(e.what());
    }
    auto chk = check_tau(t);
    if (!chk) throw cubic_error("inadmissible tau: " + chk.messages.front());
    return t;
}

/// some spine realizing tau, in canonical order
TruncatedSpine spine_for(const TauSequence& t, int cap) {
    CensusOptions opts;
    opts.tau = t;
    opts.fund_edges = t.fund_edges;
    opts.cap = cap;
    auto all = enumerate_cubic_spines(t.length(), opts);
    if (all.empty()) throw cubic_error("no spine realizes tau " + t.str());
    return all.front();
}

std::string lattice_table(const ConjugacyReport& r, bool total = true) {
    std::ostringstream o;
    for (const auto& lv : r.per_level) {
        o << "level " << lv.level << ": classes " << lv.class_count << ", top " << lv.top.str();
        for (const auto& g : lv.groups)
            o << "; " << g.count << " x aut " << g.aut << " " << g.lattice.str() << " index "
              << lattice_index(g.lattice, r.base);
        o << "\n";
    }
    if (total) o << "Top = " << (r.infinite ? std::string("infinite") : std::to_string(r.final_top)) << "\n";
    return o.str();
}

int analyze_tau(const Options& o) {
    auto t = tau_arg(o);
    auto r = top_report(t);
    json j;
    j["version"] = "v1";
    j["kind"] = "tau_report";
    j["tau"] = t.values;
    j["fund_edges"] = t.fund_edges;
    j["relative_moduli"] = json::array();
    for (const auto& m : relative_moduli(t)) j["relative_moduli"].push_back(m.str());
    j["twist_periods"] = cubic_twist_periods(t);
    j["report"] = to_json(r);
    std::optional<ConjugacyReport> lat;
    if (t.fund_edges == 2) {
        lat = analyze(descriptor_from_spine(spine_for(t, o.cap)));
        j["lattices"] = to_json(*lat);
    }
    if (o.format == "json") {
        emit(o, j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream s;
    s << "tau " << t.str() << " (" << t.fund_edges << " fundamental edges)\n";
    s << "marked levels";
    for (size_t i = 1; i < r.marked.size(); ++i) s << " " << r.marked[i];
    s << "\n";
    for (size_t i = 0; i < r.marked.size(); ++i)
        s << "j=" << i << " l=" << r.marked[i] << " m=" << r.moduli_sums[i].str() << " t=" << r.t[i]
          << " T=" << r.T[i] << "\n";
    if (lat) s << lattice_table(*lat, false);
    s << "Top = " << r.top << "\n";
    emit(o, s.str());
    return 0;
}

int enumerate(const Options& o) {
    if (o.length < 1) throw usage_error("--length must be positive");
    CensusOptions opts;
    opts.cap = o.cap;
    if (!o.tau.empty()) opts.tau = tau_arg(o);
    if (o.fund_edges == 1 || o.fund_edges == 2) opts.fund_edges = o.fund_edges;
    std::ostringstream s;
    for (const auto& sp : enumerate_cubic_spines(o.length, opts)) {
        auto t = tau_from_spine(sp);
        json j;
        j["tau"] = t.values;
        j["fund_edges"] = sp.fund_edges;
        j["tree_code"] = tree_code_str(tree_code(sp));
        j["top"] = top_count(t);
        j["spine"] = to_json(canonical_form(sp));
        s << j.dump() << "\n";
    }
    emit(o, s.str());
    return 0;
}

int tree_code_cmd(const Options& o) {
    std::vector<TruncatedSpine> spines;
    if (!o.input.empty()) {
        spines.push_back(spine_from_json(read_json(o.input)));
        auto d = validate_spine(spines[0]);
        if (!d) throw cubic_error(d.messages.front());
    } else {
        auto t = tau_arg(o);
        CensusOptions opts;
        opts.tau = t;
        opts.fund_edges = t.fund_edges;
        opts.cap = o.cap;
        spines = enumerate_cubic_spines(t.length(), opts);
    }
    std::set<std::string> codes;
    for (const auto& s : spines) codes.insert(tree_code_str(tree_code(s)));
    std::ostringstream s;
    if (o.format == "json")
        s << json(codes).dump() << "\n";
    else
        for (const auto& c : codes) s << c << "\n";
    emit(o, s.str());
    return 0;
}

int spine_top(const Options& o) {
    auto s = spine_from_json(read_json(o.input));
    auto d = validate_spine(s);
    if (!d) throw cubic_error(d.messages.front());
    auto t = tau_from_spine(s);
    auto r = top_report(t);
    json j;
    j["version"] = "v1";
    j["tau"] = t.values;
    j["tree_code"] = tree_code_str(tree_code(s));
    j["report"] = to_json(r);
    emit(o, o.format == "json" ? j.dump(2) + "\n" : "Top = " + std::to_string(r.top) + "\n");
    return 0;
}

int descriptor_analyze(const Options& o) {
    auto j = read_json(o.input);
    auto d = descriptor_from_json(j);
    auto v = validate(d);
    if (!v.ok) throw lattice_error(v.messages.front());
    auto r = analyze(d);
    emit(o, o.format == "json" ? to_json(r).dump(2) + "\n" : lattice_table(r));
    return 0;
}

std::string kind_of(const nlohmann::json& j) {
    if (j.contains("kind")) return j["kind"].get<std::string>();
    if (j.contains("labels")) return "labelled";
    if (j.contains("classes")) return "lamination";
    return "";
}

Diagnostics check_object(const nlohmann::json& j, const std::string& kind) {
    if (kind == "lamination") return validate(lamination_from_json(j));
    if (kind == "labelled") {
        auto base = lamination_from_json(j);
        auto d = validate(base);
        if (!d) return d;
        return validate(labelled_from_json(j));
    }
    if (kind == "spine") {
        for (const auto& lv : j.at("levels")) {
            auto b = validate(lamination_from_json(lv));
            if (!b) return b;
        }
        return validate_spine(spine_from_json(j));
    }
    if (kind == "descriptor") {
        Diagnostics d;
        for (auto& m : validate(descriptor_from_json(j)).messages) d.fail(m);
        return d;
    }
    if (kind == "tree") return validate_tree(tree_from_json(j));
    throw usage_error("unrecognized object kind '" + kind + "'");
}

int validate_cmd(const Options& o) {
    auto j = read_json(o.input);
    auto kind = kind_of(j);
    Diagnostics d;
    try {
        d = check_object(j, kind);
    } catch (const usage_error&) {
        throw;
    } catch (const std::exception& e) {
        d.fail(e.what());
    }
    json out;
    out["kind"] = kind;
    out["ok"] = (bool)d;
    out["diagnostics"] = d.messages;
    std::string text = out.dump() + "\n";
    if (d) {
        emit(o, text);
        return 0;
    }
    std::cerr << text;
    return 1;
}

int render_cmd(const Options& o) {
    std::string svg_text;
    if (o.quadratic) {
        svg_text = svg::render(quadratic_pictograph(), o.depth);
    } else if (!o.tau.empty()) {
        svg_text = svg::render(pictograph_from_truncated(spine_for(tau_arg(o), o.cap)), o.depth);
    } else {
        auto j = read_json(o.input);
        auto kind = kind_of(j);
        auto d = check_object(j, kind);
        if (!d) throw lamination_error(d.messages.front());
        if (kind == "lamination")
            svg_text = svg::render(lamination_from_json(j));
        else if (kind == "labelled")
            svg_text = svg::render(labelled_from_json(j));
        else if (kind == "spine")
            svg_text = svg::render(spine_from_json(j), o.depth);
        else
            throw usage_error("cannot render a " + kind);
    }
    emit(o, svg_text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lamlab: laminations, pictographs and twist lattices"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* c) {
        c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text", "svg"}));
        c->add_option("--out", o.out, "output path (default stdout)");
    };
    auto tau_opts = [&](CLI::App* c) {
        c->add_option("--tau", o.tau, "comma-separated tau sequence");
        c->add_option("--fund-edges", o.fund_edges, "fundamental edges")->check(CLI::IsMember({1, 2}));
        c->add_option("--cap", o.cap, "largest length allowed in a census")->check(CLI::PositiveNumber);
    };

    auto* a = app.add_subcommand("analyze-tau", "marked levels, moduli, twist periods and Top for a tau sequence");
    common(a);
    tau_opts(a);
    auto* e = app.add_subcommand("enumerate", "census of truncated cubic spines as JSON lines");
    common(e);
    tau_opts(e);
    e->add_option("--length", o.length, "spine length")->required();
    auto* tc = app.add_subcommand("tree-code", "tree codes of a spine file or of every spine with a tau");
    common(tc);
    tau_opts(tc);
    tc->add_option("input", o.input, "spine JSON");
    auto* st = app.add_subcommand("spine-top", "Top for a spine file");
    common(st);
    st->add_option("input", o.input, "spine JSON")->required();
    auto* da = app.add_subcommand("descriptor-analyze", "twist lattices and Top for a spine descriptor");
    common(da);
    da->add_option("input", o.input, "descriptor JSON")->required();
    auto* v = app.add_subcommand("validate", "check every invariant of a JSON object");
    common(v);
    v->add_option("input", o.input, "JSON file")->required();
    auto* r = app.add_subcommand("render", "SVG of a lamination, spine or pictograph");
    common(r);
    tau_opts(r);
    r->add_option("input", o.input, "lamination or spine JSON");
    r->add_flag("--quadratic", o.quadratic, "the quadratic pictograph");
    r->add_option("--depth", o.depth, "levels drawn")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int rc = app.exit(err);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*a) return analyze_tau(o);
        if (*e) return enumerate(o);
        if (*tc) return tree_code_cmd(o);
        if (*st) return spine_top(o);
        if (*da) return descriptor_analyze(o);
        if (*v) return validate_cmd(o);
        if (*r) return render_cmd(o);
    } catch (const usage_error& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 2;
}
