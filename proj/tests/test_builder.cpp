#include "doctest.h"
#include "support.hpp"

using namespace lamlab;
using R = Rational;

namespace {

std::vector<std::string> keys(const std::vector<TruncatedSpine>& v) {
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(detail::spine_sort_key(s));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("starting states") {
    auto two = init_states(2);
    REQUIRE(two.size() == 1);
    CHECK(two[0].frontier().empty());
    CHECK(two[0].vertices[0].lam.has(Label{0, 1}));
    CHECK(two[0].vertices[1].lam.has(Label{1, 1}));

    auto three = init_states(3);
    REQUIRE(three.size() == 3);
    CHECK(three[0].frontier() == std::vector<int>{0});
    CHECK(three[1].frontier().empty());
    CHECK(three[2].frontier().empty());
    for (const auto& s : three) {
        CHECK(s.vertices[0].ret_target == 1);
        CHECK(s.vertices[0].ret_time == 1);
        CHECK(critical_count(*s.vertices[0].ret_cover) == 2);
    }
    CHECK_THROWS_AS(init(3, enumerate_covers(Lamination(), 2).front()), build_error);
}

TEST_CASE("first return of the free critical point") {
    auto s = init_states(3)[0];
    auto r = first_return_search(s, 0);
    CHECK_FALSE(r.defer);
    CHECK(r.k == 1);
    CHECK(r.w_prime == 1);
    CHECK(r.I == std::vector<int>{2});
    CHECK(r.J == std::vector<int>{1, 2});
    CHECK_THROWS_AS(first_return_search(s, 1), build_error);
}

TEST_CASE("extending below the open gap") {
    auto s = init_states(3)[0];
    auto r = first_return_search(s, 0);
    auto choices = extension_choices(s, r.w_prime, r.k, r.I);
    REQUIRE(choices.size() == 1);
    auto t = extend(s, 0, r.v_gap, r.w_prime, r.k, r.I, choices[0]);
    REQUIRE(t.vertices.size() == 3);
    const auto& v = t.vertices[2];
    CHECK(v.parent == 0);
    CHECK(v.level == 1);
    CHECK(v.ret_target == 1);
    CHECK(v.lam.has(Label{0, 2}));
    CHECK(t.frontier() == std::vector<int>{2});
    CHECK_THROWS_AS(extend(t, 0, r.v_gap, r.w_prime, r.k, r.I, choices[0]), build_error);

    auto wrong = choices[0];
    wrong.offset = wrong.offset + R(1, 2);
    CHECK_THROWS_AS(extend(s, 0, r.v_gap, r.w_prime, r.k, r.I, wrong), build_error);
}

TEST_CASE("moving labels down") {
    auto s = init_states(3)[0];
    // v1 holds label 1_2 in its only gap, above v0
    auto b = propagate_downward(s, 1, 0, Label{1, 2}, Bisect{});
    REQUIRE(b.vertices.size() == 3);
    CHECK(b.vertices[2].bisector);
    CHECK(b.vertices[0].parent == 2);
    CHECK(b.vertices[2].lam.has(Label{1, 2}));
    // 0_1 already sits on the class of v0
    CHECK_THROWS_AS(propagate_downward(s, 1, 0, Label{0, 1}, Drop{Site{SiteKind::Class, R(0)}}), build_error);
    CHECK_THROWS_AS(propagate_downward(s, 0, 0, Label{0, 1}, Bisect{}), build_error);
}

TEST_CASE("census counts and filters") {
    std::vector<size_t> all{4, 8, 16, 38, 90}, two{1, 2, 4, 8, 18};
    for (int L = 1; L <= 5; ++L) {
        CHECK(enumerate_cubic_spines(L).size() == all[L - 1]);
        CHECK(testing::census(L, 2).size() == two[L - 1]);
    }
    CensusOptions o;
    o.tau = parse_tau("0,0,1,2,0", 2);
    o.fund_edges = 2;
    auto f = enumerate_cubic_spines(5, o);
    REQUIRE(f.size() == 1);
    CHECK(tau_from_spine(f[0]).values == o.tau->values);

    CensusOptions capped;
    capped.cap = 3;
    CHECK_THROWS_AS(enumerate_cubic_spines(4, capped), build_error);
    CHECK_THROWS_AS(enumerate_cubic_spines(0), build_error);
}

TEST_CASE("tree codes separate spines with two fundamental edges") {
    for (int L = 1; L <= 6; ++L) {
        std::set<std::string> codes;
        auto c = testing::census(L, 2);
        for (const auto& s : c) codes.insert(tree_code_str(tree_code(s)));
        CHECK(codes.size() == c.size());
    }
}

TEST_CASE("brute force agrees with the enumerator") {
    for (int fund : {1, 2})
        for (int L = 1; L <= 3; ++L) {
            CAPTURE(fund);
            CAPTURE(L);
            CHECK(keys(brute_force_cubic_spines(L, fund)) == keys(testing::census(L, fund)));
        }
    CHECK_THROWS_AS(brute_force_cubic_spines(4, 2), build_error);
}

TEST_CASE("enumeration is deterministic") {
    auto a = enumerate_cubic_spines(5);
    auto b = enumerate_cubic_spines(5);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(to_json(a[i]) == to_json(b[i]));
    for (const auto& s : a) CHECK(validate_spine(s));
}
