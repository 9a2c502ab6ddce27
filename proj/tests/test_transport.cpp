#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "helpers.hpp"
#include "torph/transport.hpp"

using namespace torph;

namespace {

Diagram bars(std::vector<std::pair<double, double>> pts) {
    Diagram d;
    d.degree = 0;
    d.range_min = -10.0;
    d.range_max = 10.0;
    for (const auto& [b, dd] : pts) d.points.push_back({b, dd, false});
    std::sort(d.points.begin(), d.points.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
        return a.birth != b.birth ? a.birth > b.birth : a.death > b.death;
    });
    return d;
}

}  // namespace

TEST_CASE("assignment solver on a known matrix") {
    const std::vector<std::vector<double>> cost = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
    const auto col = detail::solve_assignment(cost);
    REQUIRE(col.size() == 3);
    CHECK(col[0] == 1);
    CHECK(col[1] == 0);
    CHECK(col[2] == 2);
}

TEST_CASE("transport distances: hand values") {
    const Diagram empty = bars({});
    const auto one = bars({{1.0, 0.0}});

    CHECK(dist_p(empty, empty, 2.0) == 0.0);
    CHECK(bottleneck(empty, empty) == 0.0);
    CHECK(dist_p(one, empty, 1.0) == 0.5);  // only the diagonal is available
    CHECK(dist_p(one, empty, 2.0) == 0.5);
    CHECK(bottleneck(one, empty) == 0.5);

    // nearby bar: matching beats two diagonal moves
    const auto near = bars({{0.9, 0.1}});
    CHECK(dist_p(one, near, 1.0) == 0.1);
    CHECK(bottleneck(one, near) == 0.1);

    // short faraway bar: the diagonal wins, 0.5 + 0.05 < 0.8
    const auto faraway = bars({{0.2, 0.1}});
    CHECK(dist_p(one, faraway, 1.0) == 0.55);
    CHECK(bottleneck(one, faraway) == 0.5);

    // borderline bar: matching still wins for p = 1 and p = 2
    const auto mid = bars({{0.6, 0.4}});
    CHECK(dist_p(one, mid, 1.0) == 0.4);
    CHECK_THAT(dist_p(one, mid, 2.0), Catch::Matchers::WithinRel(0.4, 1e-15));
    CHECK(bottleneck(one, mid) == 0.4);
}

TEST_CASE("exhaustive matching oracle") {
    std::mt19937_64 rng(7);
    int nontrivial = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto D = testutil::random_diagram(rng, 6);
        const auto E = testutil::random_diagram(rng, 6);
        if (!D.points.empty() && !E.points.empty()) ++nontrivial;
        for (double p : {0.5, 1.0, 2.0, 3.0}) {
            const double fast = dist_p(D, E, p);
            const double slow = testutil::brute_force_dist_p(D, E, p);
            CAPTURE(trial, p, fast, slow);
            CHECK(std::abs(fast - slow) <= 1e-9 * std::max(1.0, slow));
        }
        const double bfast = bottleneck(D, E);
        const double bslow = testutil::brute_force_bottleneck(D, E);
        CAPTURE(trial, bfast, bslow);
        CHECK(std::abs(bfast - bslow) <= 1e-12 * std::max(1.0, bslow));
    }
    CHECK(nontrivial > 150);  // the oracle must see real instances
}

TEST_CASE("metric laws on random diagrams") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const auto A = testutil::random_diagram(rng, 8);
        const auto B = testutil::random_diagram(rng, 8);
        const auto C = testutil::random_diagram(rng, 8);
        for (double p : {1.0, 2.0}) {
            const double ab = dist_p(A, B, p), ba = dist_p(B, A, p);
            CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, ab));
            CHECK(dist_p(A, A, p) == 0.0);
            const double ac = dist_p(A, C, p), bc = dist_p(B, C, p);
            CHECK(ac <= ab + bc + 1e-9);
        }
        // below order 1 the power sum itself is the metric
        const double ab = dist_p(A, B, 0.5), ac = dist_p(A, C, 0.5), bc = dist_p(B, C, 0.5);
        CHECK(std::sqrt(ac) <= std::sqrt(ab) + std::sqrt(bc) + 1e-9);

        const double b_ab = bottleneck(A, B);
        CHECK(std::abs(b_ab - bottleneck(B, A)) <= 1e-12);
        CHECK(bottleneck(A, A) == 0.0);
        CHECK(bottleneck(A, C) <= bottleneck(A, B) + bottleneck(B, C) + 1e-12);
        // the sup of any matching dominates its min-max
        for (double p : {1.0, 2.0, 3.0}) CHECK(b_ab <= dist_p(A, B, p) + 1e-12);
    }
}

TEST_CASE("plans cover every point exactly once and reproduce the cost") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        const auto D = testutil::random_diagram(rng, 10);
        const auto E = testutil::random_diagram(rng, 10);
        for (double p : {1.0, 2.0}) {
            const auto plan = transport_plan(D, E, p);
            std::multiset<int> sources, targets;
            CompensatedSum total;
            for (const auto& pr : plan.pairs) {
                REQUIRE((pr.source >= 0 || pr.target >= 0));
                if (pr.source >= 0) sources.insert(pr.source);
                if (pr.target >= 0) targets.insert(pr.target);
                if (pr.source >= 0 && pr.target >= 0)
                    total.add(std::pow(
                        point_dist_inf(D.points[static_cast<std::size_t>(pr.source)],
                                       E.points[static_cast<std::size_t>(pr.target)]),
                        p));
                else if (pr.source >= 0) {
                    const double l = diagonal_dist(D.points[static_cast<std::size_t>(pr.source)]);
                    if (l > 0.0) total.add(std::pow(l, p));
                } else {
                    const double l = diagonal_dist(E.points[static_cast<std::size_t>(pr.target)]);
                    if (l > 0.0) total.add(std::pow(l, p));
                }
            }
            for (int i = 0; i < static_cast<int>(D.points.size()); ++i)
                CHECK(sources.count(i) == 1);
            for (int j = 0; j < static_cast<int>(E.points.size()); ++j)
                CHECK(targets.count(j) == 1);
            const double recomputed = std::pow(total.value(), 1.0 / p);
            CHECK(std::abs(recomputed - plan.cost) <= 1e-12 * std::max(1.0, plan.cost));
        }
    }
}

TEST_CASE("interpolation bounds hold across a parameter grid") {
    std::mt19937_64 rng(31);
    const double inf = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 25; ++trial) {
        const auto D = testutil::random_diagram(rng, 7);
        const auto E = testutil::random_diagram(rng, 7);
        for (double p : {0.5, 1.0})
            for (double q : {2.0, inf})
                for (double theta : {0.25, 0.5, 0.75}) {
                    const auto rec = interpolation_check(D, E, p, q, theta);
                    CAPTURE(trial, p, q, theta, rec.lhs, rec.rhs_first, rec.rhs_second);
                    const double expect_pt =
                        1.0 / (theta / p + (std::isinf(q) ? 0.0 : (1.0 - theta) / q));
                    CHECK(std::abs(rec.p_theta - expect_pt) <= 1e-12 * expect_pt);
                    CHECK(rec.lhs <= rec.rhs_first + 1e-9 * std::max(1.0, rec.rhs_first));
                    CHECK(rec.lhs <= rec.rhs_second + 1e-9 * std::max(1.0, rec.rhs_second));
                }
    }
}

TEST_CASE("interpolation argument validation") {
    const auto D = bars({{1.0, 0.0}});
    CHECK_THROWS_AS(interpolation_check(D, D, 0.0, 2.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(interpolation_check(D, D, 2.0, 2.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(interpolation_check(D, D, 2.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(interpolation_check(D, D, 1.0, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(interpolation_check(D, D, 1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(transport_plan(D, D, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(transport_plan(D, D, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}

TEST_CASE("many-short-bars family: closed-form distance to the empty diagram") {
    const Diagram empty = bars({});
    for (int n : {8, 16, 32}) {
        const auto d = gen_discontinuity_sequence(n, 3.0);
        CHECK(static_cast<int>(d.points.size()) == n * n);
        const double expect = std::pow(8.0 * n, -1.0 / 3.0);  // (n^2 (1/2n)^3)^(1/3)
        CHECK_THAT(dist_p(d, empty, 3.0), Catch::Matchers::WithinRel(expect, 1e-12));
        CHECK(bottleneck(d, empty) == 0.5 / n);
    }
    CHECK_THROWS_AS(gen_discontinuity_sequence(0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(gen_discontinuity_sequence(4, 1.0), std::invalid_argument);
}
