#include "doctest.h"
#include "support.hpp"

using namespace lamlab;
using R = Rational;

TEST_CASE("unlinked classes validate, crossing diameters do not") {
    CHECK(validate(Lamination({{R(0), R(1, 2)}})).ok);
    auto bad = validate(Lamination({{R(0), R(1, 2)}, {R(1, 4), R(3, 4)}}));
    CHECK_FALSE(bad.ok);
    CHECK(bad.messages.front().find("unlinked") != std::string::npos);
    CHECK(validate(Lamination({{R(0), R(1, 3), R(2, 3)}}, {R(1, 6)})).ok);
}

TEST_CASE("gaps of small laminations") {
    auto g0 = gaps(Lamination());
    REQUIRE(g0.size() == 1);
    CHECK(g0[0].length == R(1));

    auto g1 = gaps(Lamination({{R(0), R(1, 2)}}));
    REQUIRE(g1.size() == 2);
    CHECK(g1[0].length == R(1, 2));
    CHECK(g1[1].length == R(1, 2));

    // a triangle bounds three gaps; its inside meets the circle in no arc
    auto g3 = gaps(Lamination({{R(0), R(1, 3), R(2, 3)}}));
    CHECK(g3.size() == 3);

    // two parallel chords: the middle gap has two boundary arcs
    Lamination two({{R(1, 12), R(5, 12)}, {R(7, 12), R(11, 12)}});
    auto g2 = gaps(two);
    REQUIRE(g2.size() == 3);
    int two_arc = 0;
    for (const auto& g : g2) {
        CHECK(g.length == R(1, 3));
        if (g.arcs.size() == 2) ++two_arc;
    }
    CHECK(two_arc == 1);
}

TEST_CASE("a quadrilateral class with a chord beside it") {
    Lamination lam({{R(0), R(1, 8), R(1, 2), R(5, 8)}, {R(1, 4), R(3, 8)}});
    REQUIRE(validate(lam).ok);
    auto gs = gaps(lam);
    CHECK(gs.size() == 5);
    Rational total(0);
    for (const auto& g : gs) total += g.length;
    CHECK(total == R(1));
}

TEST_CASE("canonical form puts a class point at zero") {
    CHECK(canonical_form(Lamination({{R(1, 4), R(3, 4)}})) == Lamination({{R(0), R(1, 2)}}));
    CHECK(canonical_form(Lamination()) == Lamination());
    Lamination a({{R(1, 5), R(2, 5)}, {R(3, 5), R(4, 5)}});
    CHECK(canonical_form(a) == canonical_form(rotate(a, R(2, 7))));
}

TEST_CASE("symmetry orders") {
    auto fig8 = make_labelled(Lamination({{R(0), R(1, 2)}}), {{Label{0, 1}, Site{SiteKind::Class, R(0)}}});
    CHECK(symmetry_order(fig8) == 2);
    auto side = make_labelled(Lamination({{R(0), R(1, 2)}}), {{Label{1, 2}, Site{SiteKind::Gap, R(1, 4)}}});
    CHECK(symmetry_order(side) == 1);
    CHECK(symmetry_order(Lamination({{R(0), R(1, 3), R(2, 3)}})) == 3);
    CHECK(symmetry_order(Lamination(), 5) == 5);
    CHECK(symmetry_order(Lamination()) == 1);
    CHECK(pushforward_symmetry(4, 2) == 2);
    CHECK(pushforward_symmetry(3, 3) == 1);
    CHECK(pushforward_symmetry(2, 3) == 2);
}

TEST_CASE("local degrees of covers") {
    LamCover fig8{Lamination({{R(0), R(1, 2)}}), 2, R(0)};
    CHECK(cover_image(fig8) == Lamination());
    CHECK(class_degree(fig8, {R(0), R(1, 2)}) == 2);
    for (const auto& g : gaps(fig8.domain)) CHECK(gap_degree(fig8, g) == 1);
    CHECK(critical_count(fig8) == 1);

    LamCover trivial{Lamination(), 3, R(0)};
    CHECK(cover_image(trivial) == Lamination());
    CHECK(gap_degree(trivial, gaps(trivial.domain).front()) == 3);

    LamCover tri{Lamination({{R(0), R(1, 3), R(2, 3)}}), 3, R(0)};
    CHECK(class_degree(tri, {R(0), R(1, 3), R(2, 3)}) == 3);
    CHECK(critical_count(tri) == 2);

    LamCover rot{Lamination({{R(0), R(1, 2)}}), 1, R(1, 4)};
    CHECK(cover_image(rot) == Lamination({{R(1, 4), R(3, 4)}}));
    CHECK(critical_count(rot) == 0);
}

TEST_CASE("a cover collapsing three marked points onto one") {
    // degree 3: the preimages 0, 1/3, 2/3 of a marked point, each a singleton
    LamCover cov{Lamination({}, {R(0), R(1, 3), R(2, 3)}), 3, R(0)};
    Lamination img = cover_image(cov);
    CHECK(img.marks == std::vector<Angle>{R(0)});
    CHECK(critical_count(cov) == 2);
}

TEST_CASE("covers are rejected when classes do not land on classes") {
    // {0, 1/3} and {1/2, 2/3} map onto {0, 2/3} and {0, 1/3}, which overlap
    LamCover bad{Lamination({{R(0), R(1, 3)}, {R(1, 2), R(2, 3)}}), 2, R(0)};
    CHECK_THROWS_AS(cover_image(bad), cover_error);
}

TEST_CASE("enumerated covers of small images") {
    CriticalConstraint one_class;
    one_class.on_classes = 1;
    auto fig8 = enumerate_covers(Lamination(), 2, one_class);
    REQUIRE(fig8.size() == 1);
    CHECK(fig8[0].domain == Lamination({{R(0), R(1, 2)}}));

    CriticalConstraint over_mark;
    over_mark.over = {{Site{SiteKind::Mark, R(0)}, 1}};
    auto marked = enumerate_covers(Lamination({}, {R(0)}), 2, over_mark);
    CHECK(marked.size() == 1);

    // frozen: trivial domain and figure eight in degree 2; in degree 3 the trivial
    // domain, one chord, the triangle, and two chords
    CHECK(enumerate_covers(Lamination(), 2).size() == 2);
    CHECK(enumerate_covers(Lamination(), 3).size() == 4);
    CHECK(enumerate_covers(Lamination({{R(0), R(1, 3)}}), 2).size() == 5);
    auto rot = enumerate_covers(Lamination({{R(0), R(1, 3)}}), 1);
    REQUIRE(rot.size() == 1);
    CHECK(cover_image(rot[0]) == Lamination({{R(0), R(1, 3)}}));
    CHECK(critical_count(rot[0]) == 0);
    CHECK_THROWS_AS(enumerate_covers(Lamination(), 0), cover_error);
}

TEST_CASE("degree-2 lifts double the classes") {
    Lamination img({{R(0), R(1, 3)}});
    auto gs = gaps(img);
    for (const auto& g : gs) {
        auto lift = lift_degree2(img, g);
        CHECK(lift.domain.classes.size() == 2);
        CHECK(validate(lift.domain).ok);
        LamCover cov{lift.domain, 2, R(0)};
        CHECK(cover_image(cov) == img);
        CHECK(critical_count(cov) == 1);
    }
}

TEST_CASE("labelled laminations reject misplaced labels") {
    Lamination base({{R(0), R(1, 2)}});
    CHECK_THROWS_AS(make_labelled(base, {{Label{0, 1}, Site{SiteKind::Class, R(1, 4)}}}), lamination_error);
    CHECK_THROWS_AS(make_labelled(base, {{Label{0, 1}, Site{SiteKind::Gap, R(0)}}}), lamination_error);
    CHECK_THROWS_AS(make_labelled(base, {{Label{1, 1}, Site{SiteKind::Gap, R(1, 8)}},
                                         {Label{1, 1}, Site{SiteKind::Gap, R(5, 8)}}}),
                    lamination_error);
    // gap sites normalize to the gap representative
    auto ll = make_labelled(base, {{Label{1, 1}, Site{SiteKind::Gap, R(1, 8)}}});
    CHECK(ll.labels[0].second.at == R(1, 4));
}

TEST_CASE("JSON round trip") {
    auto ll = make_labelled(Lamination({{R(0), R(1, 6)}, {R(1, 2), R(2, 3)}}, {R(1, 3)}),
                            {{Label{0, 2}, Site{SiteKind::Gap, R(1, 12)}}, {Label{2, 2}, Site{SiteKind::Mark, R(1, 3)}}});
    auto j = nlohmann::json::parse(to_json(ll).dump());
    CHECK(labelled_from_json(j) == ll);
    CHECK(lamination_from_json(nlohmann::json::parse(to_json(ll.base).dump())) == ll.base);
    CHECK(to_json(ll.base)["den"] == 6);
}
