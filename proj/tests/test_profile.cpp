#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace epirelax;
using namespace epitest;

namespace {

// Independent arclength from the raw arc samples.
double hypot_sum(const std::vector<Polyline>& arcs) {
    double total = 0.0;
    for (const Polyline& arc : arcs)
        for (std::size_t i = 1; i < arc.size(); ++i)
            total += std::hypot(arc[i].x - arc[i - 1].x, arc[i].y - arc[i - 1].y);
    return total;
}

double trapezoid_sum(const std::vector<Polyline>& arcs) {
    double total = 0.0;
    for (const Polyline& arc : arcs)
        for (std::size_t i = 1; i < arc.size(); ++i)
            total += 0.5 * (arc[i].y + arc[i - 1].y) * (arc[i].x - arc[i - 1].x);
    return total;
}

}  // namespace

TEST_SUITE("profile") {

TEST_CASE("flat profile: one arc, zero variation") {
    Profile p = flat(0.0, 1.0, 1.0);
    CHECK(p.arcs().size() == 1);
    CHECK(p.total_variation() == doctest::Approx(0.0));
    CHECK(p.value(0.3) == doctest::Approx(1.0));
}

TEST_CASE("step profile is lsc-valid with one jump node") {
    Profile p = step_profile();
    CHECK(p.nodes().size() == 1);
    CHECK(p.value(0.5) == doctest::Approx(1.0));
    CHECK(p.total_variation() == doctest::Approx(1.0));
}

TEST_CASE("point value above both limits is rejected") {
    ProfileSpec s;
    s.a = 0.0;
    s.b = 1.0;
    s.arcs.push_back({Point{0.0, 1.0}, Point{0.5, 1.0}});
    s.arcs.push_back({Point{0.5, 1.0}, Point{1.0, 1.0}});
    s.nodes.push_back(ProfileNode{0.5, 1.0, 1.0, 2.0});
    CHECK_THROWS_WITH_AS(build_profile(s), doctest::Contains("NotLowerSemicontinuous"), Error);
}

TEST_CASE("validation errors") {
    ProfileSpec s;
    s.a = 1.0;
    s.b = 0.0;
    CHECK_THROWS_WITH_AS(build_profile(s), doctest::Contains("EmptyDomain"), Error);

    ProfileSpec neg;
    neg.a = 0.0;
    neg.b = 1.0;
    neg.arcs.push_back({Point{0.0, -0.1}, Point{1.0, 0.5}});
    CHECK_THROWS_WITH_AS(build_profile(neg), doctest::Contains("NegativeHeight"), Error);

    ProfileSpec bad;
    bad.a = 0.0;
    bad.b = 1.0;
    bad.arcs.push_back({Point{0.0, 1.0}, Point{0.7, 1.0}});
    bad.arcs.push_back({Point{0.5, 1.0}, Point{1.0, 1.0}});
    CHECK_THROWS_WITH_AS(build_profile(bad), doctest::Contains("NonMonotoneBreakpoints"), Error);
}

TEST_CASE("decompose: flat, step, needle") {
    GraphLengths flat_len = decompose(flat(0.0, 1.0, 1.0)).lengths();
    CHECK(flat_len.regular == doctest::Approx(1.0));
    CHECK(flat_len.jump == 0.0);
    CHECK(flat_len.cut == 0.0);

    GraphLengths step_len = decompose(step_profile()).lengths();
    CHECK(step_len.regular == doctest::Approx(1.0));
    CHECK(step_len.jump == doctest::Approx(1.0));  // (1/2,1) -> (1/2,2)
    CHECK(step_len.cut == 0.0);

    GraphLengths needle_len = decompose(needle_profile()).lengths();
    CHECK(needle_len.regular == doctest::Approx(1.0));
    CHECK(needle_len.jump == 0.0);
    CHECK(needle_len.cut == doctest::Approx(1.0));  // (1/2,0) -> (1/2,1)
}

TEST_CASE("graph_lengths with windows") {
    ExtendedGraph g = decompose(flat(0.0, 1.0, 1.0));
    GraphLengths w = graph_lengths(g, {{0.0, 0.5}});
    CHECK(w.regular == doctest::Approx(0.5));
    CHECK(w.total == doctest::Approx(0.5));

    Profile saw = sawtooth();
    CHECK(decompose(saw).lengths().total == doctest::Approx(std::sqrt(2.0)));
    CHECK(decompose(saw).lengths().total ==
          doctest::Approx(hypot_sum(saw.arcs())));  // per-segment hypotenuse oracle

    // The cut abscissa 1/2 lies in the window, so its full length counts.
    GraphLengths nw = graph_lengths(decompose(needle_profile()), {{0.4, 0.6}});
    CHECK(nw.cut == doctest::Approx(1.0));
    CHECK(nw.regular == doctest::Approx(0.2));

    CHECK_THROWS_WITH_AS(graph_lengths(g, {{-0.5, 0.5}}),
                         doctest::Contains("WindowOutOfDomain"), Error);
}

TEST_CASE("area_above_zero") {
    CHECK(area_above_zero(flat(0.0, 3.0, 2.0)) == doctest::Approx(6.0));
    CHECK(area_above_zero(slope01()) == doctest::Approx(0.5));
    Profile p = step_profile();
    CHECK(area_above_zero(p) == doctest::Approx(1.5));
    CHECK(area_above_zero(p) == doctest::Approx(trapezoid_sum(p.arcs())));
}

TEST_CASE("cuts_exceeding") {
    Profile nd = needle_profile();
    CHECK(cuts_exceeding(nd, 0.5) == std::vector<double>{0.5});
    CHECK(cuts_exceeding(nd, 2.0).empty());
    CHECK(cuts_exceeding(flat(0.0, 1.0, 1.0), 0.1).empty());
    CHECK_THROWS_WITH_AS(cuts_exceeding(nd, 0.0), doctest::Contains("NonPositiveEps"), Error);
}

TEST_CASE("length additivity and cut monotonicity on random profiles") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        Profile p = random_profile(rng);
        GraphLengths L = decompose(p).lengths();
        CHECK(std::abs(L.total - (L.regular + L.jump + L.cut)) <= 1e-12);

        for (const ProfileNode& nd : p.nodes())
            CHECK(nd.value <= std::min(nd.left, nd.right) + 1e-12);

        auto big = cuts_exceeding(p, 0.2);
        auto small = cuts_exceeding(p, 0.1);
        for (double x : big) CHECK(std::find(small.begin(), small.end(), x) != small.end());
    }
}

TEST_CASE("no interior breakpoints: regular length is the polyline arclength") {
    Profile saw = sawtooth();
    GraphLengths L = decompose(saw).lengths();
    CHECK(L.jump == 0.0);
    CHECK(L.cut == 0.0);
    CHECK(L.regular == doctest::Approx(hypot_sum(saw.arcs())));
}

}  // TEST_SUITE
