// Randomized and exhaustive invariant checks. Each property runs at least
// kCases cases; generators and oracles live in support.hpp.
#include "doctest.h"
#include "support.hpp"

#include "lamlab/tree.hpp"

using namespace lamlab;
using namespace testing;
using R = Rational;

namespace {

constexpr int kCases = 500;

R random_angle(int max_den) {
    int q = uniform(1, max_den);
    return R(uniform(0, q - 1), q);
}

/// a random cover of a random image lamination, or nothing when there is none
std::optional<LamCover> random_cover(int max_degree = 4, bool nontrivial_image = false) {
    Lamination img = uniform(0, 3) == 0 && !nontrivial_image ? Lamination() : random_lamination(uniform(2, 6));
    if (img.trivial() && (nontrivial_image || uniform(0, 1))) img.marks.push_back(random_angle(6));
    int d = uniform(2, max_degree);
    auto all = enumerate_covers(img, d);
    if (all.empty()) return std::nullopt;
    return all[uniform(0, (int)all.size() - 1)];
}

/// random covers shared by the cover properties, one per image
const std::vector<LamCover>& cover_pool() {
    static std::vector<LamCover> pool;
    while (pool.size() < (size_t)kCases) {
        auto cov = random_cover();
        if (cov) pool.push_back(*cov);
    }
    return pool;
}

std::vector<TruncatedSpine> census_upto(int L, std::optional<int> fund = std::nullopt) {
    std::vector<TruncatedSpine> out;
    for (int l = 1; l <= L; ++l) {
        CensusOptions o;
        o.fund_edges = fund;
        auto c = enumerate_cubic_spines(l, o);
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

/// distinct tau sequences of census spines, both fundamental-edge counts
const std::vector<TauSequence>& realized_taus(int L) {
    static std::map<int, std::vector<TauSequence>> cache;
    if (cache.count(L)) return cache[L];
    std::set<std::pair<int, std::vector<int>>> seen;
    auto& out = cache[L];
    for (const auto& s : census_upto(L)) {
        auto t = tau_from_spine(s);
        if (seen.insert({t.fund_edges, t.values}).second) out.push_back(t);
    }
    return out;
}

std::int64_t lcm_degrees(const SpineDescriptor& d, size_t upto) {
    std::int64_t l = 1;
    for (size_t i = 0; i < upto; ++i)
        for (const auto& r : d.levels[i]) l = lcm64(l, r.local_degree);
    return l;
}

}  // namespace

TEST_CASE("property: Riemann-Hurwitz and gap images on random covers") {
    for (const auto& c : cover_pool()) {
        const auto* cov = &c;
        CHECK(critical_count(*cov) == cov->degree - 1);
        CHECK(criticality_oracle(*cov) == cov->degree - 1);
        // each gap lands in the closure of a single image gap; a lone image gap
        // has no true boundary to test against
        auto img = cover_image(*cov);
        auto igs = gaps(img);
        if (igs.size() < 2) continue;
        for (const auto& g : gaps(cov->domain)) {
            std::set<int> hit;
            for (const auto& a : g.arcs) {
                R len = arc_length(a.start, a.end);
                for (int k = 1; k <= 3; ++k) hit.insert(gap_index(igs, cov->map(mod1(a.start + len * R(k, 4 * cov->degree)))));
            }
            CHECK(hit.size() == 1);
        }
    }
}

TEST_CASE("property: canonical form ignores rotation") {
    for (int i = 0; i < kCases; ++i) {
        auto lam = random_lamination(uniform(2, 10));
        if (lam.trivial()) lam.marks.push_back(random_angle(8));
        R theta = random_angle(24);
        auto c = canonical_form(lam);
        CHECK(canonical_form(rotate(lam, theta)) == c);
        CHECK(canonical_form(c) == c);
    }
}

TEST_CASE("property: covers commute with rotation") {
    for (const auto& c : cover_pool()) {
        const auto* cov = &c;
        R theta = random_angle(12);
        LamCover turned{rotate(cov->domain, theta), cov->degree, cov->offset};
        CHECK(cover_image(turned) == rotate(cover_image(*cov), R(cov->degree) * theta));
    }
}

TEST_CASE("property: symmetry pushes forward") {
    int cases = 0;
    while (cases < kCases) {
        auto cov = random_cover(3, true);
        if (!cov || cov->domain.trivial()) continue;
        auto img = cover_image(*cov);
        ++cases;
        int k = symmetry_order(cov->domain);
        CHECK(symmetry_order(img) % pushforward_symmetry(k, cov->degree) == 0);
    }
}

TEST_CASE("property: lattice chains on random descriptors") {
    for (int i = 0; i < kCases; ++i) {
        auto d = random_descriptor();
        auto L = base_lattice(d.fund_symmetries, d.degree, d.fund_count());
        for (size_t lv = 0; lv < d.levels.size(); ++lv) {
            auto next = refine_lattice(L, d.levels[lv], 1, 1);
            CHECK(L.contains(next));
            CHECK(lattice_index(next, L) >= 1);
            std::int64_t m = lcm_degrees(d, lv + 1);
            for (size_t j = 0; j < d.fund_count(); ++j) {
                QVec e(d.fund_count(), R(0));
                e[j] = R(m);
                CHECK(next.contains(e));
            }
            L = next;
        }
    }
}

TEST_CASE("property: integral tops, monotone counts and stable tails") {
    for (int i = 0; i < kCases; ++i) {
        auto d = random_descriptor();
        auto r = analyze(d);
        for (size_t lv = 0; lv < r.per_level.size(); ++lv) {
            CHECK(r.per_level[lv].top.is_integer());
            CHECK(r.per_level[lv].top >= R(1));
            if (lv) CHECK(r.per_level[lv].class_count >= r.per_level[lv - 1].class_count);
        }
        // three fully symmetric levels change nothing
        auto t = analyze(with_stable_tail(d, 3));
        const auto& last = r.per_level.back();
        for (size_t lv = r.per_level.size(); lv < t.per_level.size(); ++lv) {
            CHECK(t.per_level[lv].class_count == last.class_count);
            CHECK(t.per_level[lv].top == last.top);
        }
    }
}

TEST_CASE("property: twist periods at most double between marked levels") {
    int cases = 0;
    for (const auto& t : realized_taus(8)) {
        ++cases;
        auto r = top_report(t);
        for (size_t j = 1; j < r.T.size(); ++j) {
            CHECK(r.T[j] % r.T[j - 1] == 0);
            CHECK(r.T[j] / r.T[j - 1] <= 2);
        }
        CHECK((r.top & (r.top - 1)) == 0);
    }
    CHECK(cases >= kCases);
}

TEST_CASE("property: cubic twist periods match descriptor lattices") {
    int cases = 0;
    for (const auto& s : census_upto(7, 2)) {
        auto tau = tau_from_spine(s);
        auto T = cubic_twist_periods(tau);
        auto r = analyze(descriptor_from_spine(s));
        for (int n = 0; n < s.length(); ++n) {
            ++cases;
            const auto& lv = r.per_level.at(2 * n);
            REQUIRE(lv.groups.size() == 1);
            std::int64_t idx = lattice_index(lv.groups[0].lattice, r.base);
            CHECK(idx == T[n] * ((std::int64_t)1 << spine_returns(s, n)));
        }
        CHECK(r.final_top == top_count(tau));
    }
    CHECK(cases >= kCases);
}

TEST_CASE("property: realized tau sequences are admissible") {
    // admissibility is necessary, not sufficient: 0,1,1 passes but no spine has it
    auto realized = realized_taus(8);
    CHECK(realized.size() >= (size_t)kCases);
    std::set<std::pair<int, std::vector<int>>> seen;
    for (const auto& t : realized) {
        CHECK(check_tau(t));
        seen.insert({t.fund_edges, t.values});
    }
    for (int fund : {1, 2}) CHECK(seen.count({fund, {0, 0, 1}}) == 1);
    CHECK(check_tau(parse_tau("0,1,1")));
    CHECK(seen.count({2, {0, 1, 1}}) == 0);
}

TEST_CASE("property: spine round trips and marked levels") {
    auto all = census_upto(7);
    REQUIRE(all.size() >= (size_t)kCases);
    std::set<std::string> keys;
    for (const auto& s : all) {
        keys.insert(std::to_string(s.length()) + detail::spine_sort_key(s));
        CHECK(validate_spine(s));
        CHECK(truncate(pictograph_from_truncated(s)) == s);
        auto tau = tau_from_spine(s);
        CHECK(tableau(s) == tableau(tau));
        CHECK(tau_from_tableau(tableau(s), s.fund_edges).values == tau.values);
        // a level is marked exactly when its diagram has no labelled symmetry
        auto m = marked_levels(tau);
        std::set<int> marked(m.begin() + 1, m.end());
        for (int n = 1; n < s.length(); ++n) CHECK(marked.count(n) == (symmetry_order(s.levels[n]) == 1));
        auto code = tree_code(s);
        CHECK(tree_code(canonical_form(s)) == code);
    }
    CHECK(keys.size() == all.size());
}

TEST_CASE("property: tree weights and heights over the census") {
    int cases = 0;
    for (const auto& s : census_upto(5)) {
        auto t = cubic_tree(s, R(1, 729));
        REQUIRE(validate_tree(t));
        for (const auto& [id, v] : t.vertices) {
            if (v.image) CHECK(t.at(*v.image).height == R(3) * v.height);
            if (v.height > R(1) || v.boundary()) continue;
            ++cases;
            R sum(0);
            for (const auto& c : v.children) sum += weight(t, c);
            CHECK(sum == weight(t, id));
        }
    }
    CHECK(cases >= kCases);
}
