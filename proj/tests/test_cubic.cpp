#include "doctest.h"
#include "support.hpp"

using namespace lamlab;
using R = Rational;

namespace {

TauSequence tau(const char* s, int fund = 2) { return parse_tau(s, fund); }

/// (i, n) is marked iff the chain n + i, tau(n + i), ... passes through n
bool chain_hits(const TauSequence& t, int m, int n) {
    while (m > n) m = t(m);
    return m == n;
}

/// marked levels straight from the definition, via the chain description of the grid
std::vector<int> marked_oracle(const TauSequence& t) {
    const int L = t.length();
    std::set<int> s;
    for (int n = 1; n < L; ++n)
        for (int i = 1; i + n + 1 <= L; ++i)
            if (chain_hits(t, n + i, n) && !chain_hits(t, n + i + 1, n + 1)) s.insert(n);
    if (t.fund_edges == 1)
        for (int n = t(L); n > 0; n = t(n)) s.insert(n);
    std::vector<int> out{0};
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

TruncatedSpine only_spine(const char* t, int fund = 2) {
    auto T = tau(t, fund);
    CensusOptions o;
    o.tau = T;
    o.fund_edges = fund;
    auto all = enumerate_cubic_spines(T.length(), o);
    REQUIRE(all.size() >= 1);
    return all.front();
}

}  // namespace

TEST_CASE("tau admissibility rules") {
    CHECK(check_tau(tau("0,1,2,0")).ok);
    CHECK_FALSE(check_tau(tau("1")).ok);
    CHECK_FALSE(check_tau(tau("0,2")).ok);
    CHECK_FALSE(check_tau(tau("0,0,2")).ok);
    CHECK_FALSE(check_tau(tau("0", 3)).ok);
    CHECK(tau("(0, 0, 1)").values == std::vector<int>{0, 0, 1});
    CHECK_THROWS_AS(tau("0,x"), cubic_error);
}

TEST_CASE("relative moduli are powers of one half") {
    auto t = tau("0,0,1,2,0");
    CHECK(relative_moduli(t) == std::vector<Rational>{R(1, 2), R(1, 2), R(1, 4), R(1, 4)});
    for (const auto& m : relative_moduli(tau("0,0,0,0,0,0"))) CHECK(m == R(1, 2));
    CHECK(relative_modulus(tau("0,1,2,3"), 3) == R(1, 8));
}

TEST_CASE("marked levels") {
    CHECK(marked_levels(tau("0,0,1,2,0")) == std::vector<int>{0, 2});
    CHECK(marked_levels(tau("0,1,2,3")) == std::vector<int>{0});
    CHECK(marked_levels(tau("0,1,0,1,0")) == std::vector<int>{0, 1});
    CHECK(marked_levels(tau("0,1,2,3", 1)) == std::vector<int>{0, 1, 2, 3});
    // an iterated return lands f^2(c2) in P_1 minus P_2
    CHECK(marked_levels(tau("0,1,2,0")) == std::vector<int>{0, 1, 2});
    CHECK(first_return_marked_levels(tau("0,1,2,0")) == std::vector<int>{0, 2});
    for (int L = 1; L <= 7; ++L)
        for (int fund : {1, 2})
            for (const auto& t : testing::all_taus(L, fund)) CHECK(marked_levels(t) == marked_oracle(t));
}

TEST_CASE("Top for small tau sequences") {
    auto r = top_report(tau("0,0,1,2,0"));
    CHECK(r.marked == std::vector<int>{0, 2});
    CHECK(r.moduli_sums == std::vector<Rational>{R(0), R(1)});
    CHECK(r.t == std::vector<std::int64_t>{1, 1});
    CHECK(r.top == 2);
    CHECK(top_count(tau("0")) == 1);
    CHECK(top_count(tau("0,1,2,3")) == 1);
    CHECK(top_count(TauSequence{}) == 1);
    CHECK(top_count(tau("0,0,1,2,3,4,0")) == 2);
    CHECK(cubic_twist_periods(tau("0,1,2,3")) == std::vector<std::int64_t>{1, 1, 1, 1});
    CHECK_THROWS_AS(top_report(tau("0,2")), cubic_error);
}

TEST_CASE("solenoid rule") {
    std::vector<std::int64_t> levels;
    std::vector<Rational> sums;
    marked_data_from_prefix(solenoid_rule_tau(6), 6, levels, sums);
    CHECK(levels == std::vector<std::int64_t>{2, 4, 9, 19, 39, 79});
    CHECK(sums[0] == R(1));
    CHECK(sums[1] == R(3, 2));
    for (size_t j = 2; j < sums.size(); ++j) CHECK(sums[j] == sums[j - 1] + R(1, 2) + sums[j - 1] / R(2));
    // the first-return reading agrees with marked_levels on this rule
    auto t = solenoid_rule_tau(3);
    auto m = marked_levels(t);
    CHECK(std::vector<int>(m.begin() + 1, m.end()) == std::vector<int>{2, 4, 9});

    auto rep = solenoid_analysis(levels, sums);
    CHECK(rep.sol == std::optional<std::int64_t>(2));
    CHECK(rep.period_unbounded);
    CHECK_FALSE(rep.circles);

    // bounded periods: every marked level integral
    auto flat = solenoid_analysis({1, 2, 3, 4, 5, 6, 7, 8}, {R(1), R(2), R(3), R(4), R(5), R(6), R(7), R(8)});
    CHECK(flat.circles);
    CHECK_FALSE(flat.period_unbounded);
    CHECK_THROWS_AS(solenoid_analysis({2, 1}, {R(1), R(2)}), cubic_error);
}

TEST_CASE("tableau and tau determine each other") {
    // the top piece holds the whole orbit
    auto g = tableau(tau("0"));
    CHECK(g.at(0, 0));
    CHECK(g.at(0, 1));
    CHECK(g.at(1, 0));
    auto h = tableau(tau("0,0,1,2,0"));
    CHECK(h.at(2, 2));
    CHECK_FALSE(h.at(2, 3));
    for (int L = 1; L <= 7; ++L)
        for (const auto& t : testing::all_taus(L)) {
            auto grid = tableau(t);
            CHECK(tau_from_tableau(grid) == t);
            for (int n = 0; n <= L; ++n)
                for (int i = 1; i + n <= L; ++i) CHECK(grid.at(i, n) == chain_hits(t, n + i, n));
        }
}

TEST_CASE("spines of small length") {
    for (const auto& s : testing::census(1, 2)) CHECK(tau_from_spine(s).values == std::vector<int>{0});
    auto s = only_spine("0,0,1");
    CHECK(tree_code_str(tree_code(s)) == "(1,0),(2,0),(1,1)");
    CHECK(validate_spine(s).ok);
    CHECK(canonical_form(s) == canonical_form(canonical_form(s)));
}

TEST_CASE("tree codes separate the two spines of tau 0,1,0,1,0") {
    CensusOptions o;
    o.tau = tau("0,1,0,1,0");
    o.fund_edges = 2;
    std::set<std::string> codes;
    for (const auto& s : enumerate_cubic_spines(5, o)) codes.insert(tree_code_str(tree_code(s)));
    CHECK(codes == std::set<std::string>{"(1,0),(1,1),(3,0),(1,1),(2,3)", "(1,0),(1,1),(3,0),(1,1),(1,3)"});
}

TEST_CASE("tree codes satisfy k(1) = 1 and t(i) <= i") {
    for (int L = 1; L <= 5; ++L)
        for (const auto& s : testing::census(L, 2)) {
            auto c = tree_code(s);
            CHECK(c[0].first == 1);
            for (size_t i = 0; i < c.size(); ++i) {
                CHECK(c[i].first >= 0);
                CHECK(c[i].second >= 0);
                CHECK(c[i].second <= (int)i + 1);
            }
        }
}

TEST_CASE("pictographs complete truncated spines") {
    auto two = only_spine("0,0,1");
    auto p = pictograph_from_truncated(two);
    CHECK(p.column.front().name == "F(v0)");
    // the lowest diagram is the figure eight of c2 carrying 0_2
    const auto& last = p.column.back();
    CHECK(last.diagram.base.classes.size() == 1);
    CHECK(last.diagram.base.classes[0].size() == 2);
    CHECK(arc_length(last.diagram.base.classes[0][0], last.diagram.base.classes[0][1]) == R(1, 2));
    CHECK(last.diagram.has(Label{0, 2}));
    CHECK(truncate(p) == two);

    auto one = only_spine("0,0,1", 1);
    auto q = pictograph_from_truncated(one);
    CHECK(truncate(q) == one);
    const auto& low = q.column.back();
    CHECK(low.degree == 2);
    CHECK(low.diagram.has(Label{0, 2}));

    auto quad = quadratic_pictograph();
    REQUIRE(quad.column.size() == 2);
    CHECK(quad.column[0].diagram.base.trivial());
    CHECK(quad.column[0].diagram.has(Label{1, 1}));
    CHECK(quad.column[1].diagram.base == Lamination({{R(0), R(1, 2)}}));
    CHECK(quad.column[1].diagram.has(Label{0, 1}));
}

TEST_CASE("spine JSON round trip") {
    auto s = only_spine("0,1,0,1");
    auto back = spine_from_json(nlohmann::json::parse(to_json(s).dump()));
    CHECK(back == s);
    CHECK(to_json(s)["kind"] == "spine");
}
