#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "torph/stochastic.hpp"

using namespace torph;

namespace {

const auto abs_ground = [](double a, double b) { return std::abs(a - b); };

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.dim = 1;
    cfg.cutoff = 3;
    cfg.beta = 3.0;
    cfg.n = 2.0;
    cfg.p = 2.0;
    cfg.q = 0.75;
    cfg.alpha = 0.75;
    cfg.deltas = {0.25, 0.0625, 0.0};
    cfg.seeds = {11, 22, 33};
    cfg.degrees = {0, 1};
    cfg.mode = PerturbMode::smooth;
    cfg.thetas = {0.0, 1.0, 5.0};
    return cfg;
}

bool same_rows(const StabilityRow& a, const StabilityRow& b) {
    return a.delta == b.delta && a.mean_sup_diff == b.mean_sup_diff &&
           a.mean_norm_f == b.mean_norm_f && a.mean_norm_g == b.mean_norm_g &&
           a.mean_distp_p == b.mean_distp_p && a.ratio == b.ratio &&
           a.raw_distp_p == b.raw_distp_p && a.raw_sup_diff == b.raw_sup_diff &&
           a.w1l1_betti == b.w1l1_betti && a.w1l1_euler == b.w1l1_euler &&
           a.curve_margin == b.curve_margin && a.euler_margin == b.euler_margin &&
           a.fourier_lhs == b.fourier_lhs && a.fourier_rhs == b.fourier_rhs;
}

}  // namespace

TEST_CASE("empirical distance between sample sets: basics") {
    CHECK(empirical_wasserstein(std::vector<double>{}, {}, abs_ground, 1.0) == 0.0);
    CHECK(empirical_wasserstein<double>({2.0}, {5.0}, abs_ground, 1.0) == 3.0);
    CHECK(empirical_wasserstein<double>({2.0}, {5.0}, abs_ground, 2.0) == 3.0);
    CHECK(empirical_wasserstein<double>({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, abs_ground, 2.0) == 0.0);

    // hand-built matrix: the identity assignment is forced
    const double m[3][3] = {{1, 9, 9}, {9, 1, 9}, {9, 9, 1}};
    const auto by_index = [&m](int i, int j) { return m[i][j]; };
    CHECK(empirical_wasserstein<int>({0, 1, 2}, {0, 1, 2}, by_index, 1.0) == 1.0);

    CHECK_THROWS_AS(empirical_wasserstein<double>({1.0}, {1.0, 2.0}, abs_ground, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(empirical_wasserstein<double>({1.0}, {2.0}, abs_ground, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        empirical_wasserstein<double>({1.0}, {2.0}, abs_ground,
                                      std::numeric_limits<double>::infinity()),
        std::invalid_argument);
    const auto bad_ground = [](double, double) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS_AS(empirical_wasserstein<double>({1.0}, {2.0}, bad_ground, 1.0),
                    std::invalid_argument);
}

TEST_CASE("empirical distance on the line matches the sorted coupling") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_int_distribution<int> nn(1, 8);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = nn(rng);
        std::vector<double> A(static_cast<std::size_t>(n)), B(static_cast<std::size_t>(n));
        for (auto& x : A) x = u(rng);
        for (auto& x : B) x = u(rng);
        auto sa = A, sb = B;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        for (double order : {1.0, 2.0}) {
            CompensatedSum s;
            for (int i = 0; i < n; ++i)
                s.add(std::pow(std::abs(sa[static_cast<std::size_t>(i)] -
                                        sb[static_cast<std::size_t>(i)]),
                               order));
            const double expect = std::pow(s.value() / n, 1.0 / order);
            const double got = empirical_wasserstein(A, B, abs_ground, order);
            CHECK(std::abs(got - expect) <= 1e-12 * std::max(1.0, expect));
        }
    }
}

TEST_CASE("empirical distance is a metric on equal-size multisets") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> A(4), B(4), C(4);
        for (auto& x : A) x = u(rng);
        for (auto& x : B) x = u(rng);
        for (auto& x : C) x = u(rng);
        for (double order : {1.0, 2.0}) {
            const double ab = empirical_wasserstein(A, B, abs_ground, order);
            const double ba = empirical_wasserstein(B, A, abs_ground, order);
            const double ac = empirical_wasserstein(A, C, abs_ground, order);
            const double cb = empirical_wasserstein(C, B, abs_ground, order);
            CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, ab));
            CHECK(empirical_wasserstein(A, A, abs_ground, order) == 0.0);
            CHECK(ab <= ac + cb + 1e-9);
        }
    }
}

TEST_CASE("ensembles are pure functions of their seeds") {
    const std::vector<std::uint64_t> seeds{4, 8, 15};
    const auto a = make_trig_ensemble(1, 4, 3.0, seeds, 1);
    const auto b = make_trig_ensemble(1, 4, 3.0, seeds, 1);
    const auto c = make_trig_ensemble(1, 4, 3.0, seeds, 3);  // worker count is irrelevant
    REQUIRE(a.samples.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.samples[i].field.values == b.samples[i].field.values);
        CHECK(a.samples[i].field.values == c.samples[i].field.values);
        CHECK(a.samples[i].euler == c.samples[i].euler);
        REQUIRE(a.samples[i].diagrams.size() == 2);
        CHECK(a.samples[i].betti.size() == 2);
    }

    const auto pa = perturb_ensemble(a, 0.125, PerturbMode::smooth, 1);
    const auto pb = perturb_ensemble(b, 0.125, PerturbMode::smooth, 2);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(pa.samples[i].field.values == pb.samples[i].field.values);
    // distinct deltas draw distinct noise streams
    CHECK(perturb_seed(4, 0.125) != perturb_seed(4, 0.25));
    CHECK(perturb_seed(4, 0.125) != perturb_seed(8, 0.125));
}

TEST_CASE("coupled mean sup distance") {
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4};
    const auto base = make_trig_ensemble(1, 4, 3.0, seeds, 1);
    CHECK(coupled_sup_wasserstein_bound(base, base) == 0.0);

    const double delta = 0.2;
    const auto smooth = perturb_ensemble(base, delta, PerturbMode::smooth, 1);
    const double bs = coupled_sup_wasserstein_bound(base, smooth);
    CHECK(std::abs(bs - delta) <= 1e-9);  // each sample moves by exactly delta in sup norm

    const auto shift = perturb_ensemble(base, delta, PerturbMode::shift, 1);
    const double bsh = coupled_sup_wasserstein_bound(base, shift);
    CHECK(std::abs(bsh - delta) <= 1e-12);

    auto other = make_trig_ensemble(1, 4, 3.0, {9, 9, 9, 9}, 1);
    CHECK_THROWS_AS(coupled_sup_wasserstein_bound(base, other), std::invalid_argument);
}

TEST_CASE("diagram stability sweep: structure and reproducibility") {
    const auto cfg = tiny_config();
    const auto rep = stability_experiment(cfg);
    const auto rep2 = stability_experiment(cfg);

    REQUIRE(rep.rows.size() == cfg.deltas.size());
    REQUIRE(rep.c_fit.size() == cfg.degrees.size());
    REQUIRE(rep.slope.size() == cfg.degrees.size());
    REQUIRE(rep2.rows.size() == rep.rows.size());
    for (std::size_t r = 0; r < rep.rows.size(); ++r) {
        CHECK(same_rows(rep.rows[r], rep2.rows[r]));
        const auto& row = rep.rows[r];
        REQUIRE(row.mean_distp_p.size() == cfg.degrees.size());
        REQUIRE(row.raw_distp_p.size() == cfg.degrees.size());
        REQUIRE(row.raw_sup_diff.size() == cfg.seeds.size());
        for (std::size_t t = 0; t < cfg.degrees.size(); ++t) {
            REQUIRE(row.raw_distp_p[t].size() == cfg.seeds.size());
            // the reported mean is the mean of the raw samples
            CompensatedSum s;
            for (double v : row.raw_distp_p[t]) s.add(v);
            const double mean = s.value() / static_cast<double>(cfg.seeds.size());
            CHECK(std::abs(mean - row.mean_distp_p[t]) <=
                  1e-12 * std::max(1.0, row.mean_distp_p[t]));
            // the per-row mean ratio never exceeds the fitted max
            CHECK(row.ratio[t] <= rep.c_fit[t] + 1e-12);
        }
        if (row.delta == 0.0) {
            CHECK(row.mean_sup_diff == 0.0);
            for (std::size_t t = 0; t < cfg.degrees.size(); ++t) {
                CHECK(row.mean_distp_p[t] == 0.0);
                CHECK(row.ratio[t] == 0.0);
            }
        } else {
            CHECK(std::abs(row.mean_sup_diff - row.delta) <= 1e-9);
        }
    }
    CHECK(rep.c_fit == rep2.c_fit);
    for (std::size_t t = 0; t < cfg.degrees.size(); ++t) {
        if (std::isnan(rep.slope[t]))
            CHECK(std::isnan(rep2.slope[t]));
        else
            CHECK(rep.slope[t] == rep2.slope[t]);
    }
}

TEST_CASE("experiment config validation") {
    const auto good = tiny_config();
    auto c = good;
    c.dim = 0;
    CHECK_THROWS_AS(stability_experiment(c), std::invalid_argument);
    c = good;
    c.n = 1.0;  // not above dim
    CHECK_THROWS_AS(stability_experiment(c), std::invalid_argument);
    c = good;
    c.q = 2.5;  // not below p
    CHECK_THROWS_AS(stability_experiment(c), std::invalid_argument);
    c = good;
    c.q = 0.25;  // not above dim/n
    CHECK_THROWS_AS(stability_experiment(c), std::invalid_argument);
    c = good;
    c.alpha = 1.0;
    CHECK_THROWS_AS(curve_stability_experiment(c), std::invalid_argument);
    c = good;
    c.alpha = 0.25;
    CHECK_THROWS_AS(curve_stability_experiment(c), std::invalid_argument);
    c = good;
    c.seeds.clear();
    CHECK_THROWS_AS(stability_experiment(c), std::invalid_argument);
    c = good;
    c.deltas.clear();
    CHECK_THROWS_AS(stability_experiment(c), std::invalid_argument);
    c = good;
    c.deltas = {0.1, -0.1};
    CHECK_THROWS_AS(stability_experiment(c), std::invalid_argument);
    c = good;
    c.degrees = {2};
    CHECK_THROWS_AS(stability_experiment(c), std::invalid_argument);
}

TEST_CASE("curve stability sweep: margins, slopes, transform bound") {
    const auto cfg = tiny_config();
    const auto rep = curve_stability_experiment(cfg);
    const auto rep2 = curve_stability_experiment(cfg);

    REQUIRE(rep.rows.size() == cfg.deltas.size());
    REQUIRE(rep.c_fit_curve.size() == cfg.degrees.size());
    for (std::size_t r = 0; r < rep.rows.size(); ++r) {
        CHECK(same_rows(rep.rows[r], rep2.rows[r]));
        const auto& row = rep.rows[r];
        REQUIRE(row.w1l1_betti.size() == cfg.degrees.size());
        for (std::size_t t = 0; t < cfg.degrees.size(); ++t) {
            CHECK(row.w1l1_betti[t] >= 0.0);
            CHECK(row.curve_margin[t] <= rep.c_fit_curve[t] + 1e-12);
        }
        CHECK(row.euler_margin <= rep.c_fit_euler + 1e-12);
        CHECK(row.fourier_lhs <= row.fourier_rhs + 1e-9);
        if (row.delta == 0.0) {
            CHECK(row.w1l1_euler == 0.0);
            for (double w : row.w1l1_betti) CHECK(w == 0.0);
        }
    }
    CHECK(rep.c_fit_curve == rep2.c_fit_curve);
    CHECK(rep.c_fit_euler == rep2.c_fit_euler);
}

TEST_CASE("curve samples move at most twice as fast as diagram samples") {
    const std::vector<std::uint64_t> seeds{7, 14, 21};
    const auto base = make_trig_ensemble(1, 4, 3.0, seeds, 1);
    for (double delta : {0.3, 0.05}) {
        const auto pert = perturb_ensemble(base, delta, PerturbMode::smooth, 1);
        for (int k : {0, 1}) {
            std::vector<StepCurve> cf, cg;
            std::vector<Diagram> df, dg;
            for (const auto& s : base.samples) {
                cf.push_back(s.betti[static_cast<std::size_t>(k)]);
                df.push_back(s.diagrams[static_cast<std::size_t>(k)]);
            }
            for (const auto& s : pert.samples) {
                cg.push_back(s.betti[static_cast<std::size_t>(k)]);
                dg.push_back(s.diagrams[static_cast<std::size_t>(k)]);
            }
            const double w_curve = empirical_wasserstein(cf, cg, l1_dist, 1.0);
            const double w_diag = empirical_wasserstein(
                df, dg, [](const Diagram& a, const Diagram& b) { return dist_p(a, b, 1.0); },
                1.0);
            CAPTURE(delta, k, w_curve, w_diag);
            CHECK(w_curve <= 2.0 * w_diag + 1e-9);
        }
    }

    // single-sample ensembles degenerate to the pointwise inequality
    const auto f1 = make_trig_ensemble(1, 4, 3.0, {42}, 1);
    const auto g1 = perturb_ensemble(f1, 0.2, PerturbMode::smooth, 1);
    const double w1 = empirical_wasserstein<StepCurve>({f1.samples[0].betti[0]},
                                                       {g1.samples[0].betti[0]}, l1_dist, 1.0);
    CHECK(w1 == l1_dist(f1.samples[0].betti[0], g1.samples[0].betti[0]));
    CHECK(w1 <= 2.0 * dist_p(f1.samples[0].diagrams[0], g1.samples[0].diagrams[0], 1.0) + 1e-9);
}

TEST_CASE("mean-transform bound between coupled ensembles") {
    const std::vector<std::uint64_t> seeds{5, 6, 7, 8};
    const auto f = make_trig_ensemble(1, 4, 3.0, seeds, 1);
    const auto g = perturb_ensemble(f, 0.15, PerturbMode::smooth, 1);

    const std::vector<double> thetas{0.0, 0.5, 1.0, 2.0, 5.0};
    const auto rep = fourier_bound_check(f, g, thetas);
    REQUIRE(rep.lhs_per_theta.size() == thetas.size());
    CHECK(rep.lhs == *std::max_element(rep.lhs_per_theta.begin(), rep.lhs_per_theta.end()));
    CHECK(rep.rhs == std::sqrt(2.0) * rep.wasserstein);
    CHECK(rep.lhs <= rep.rhs + 1e-9);

    const auto same = fourier_bound_check(f, f, thetas);
    CHECK(same.lhs == 0.0);
    CHECK(same.wasserstein == 0.0);

    // at frequency zero the transform is the signed area of the Euler curve,
    // i.e. the alternating sum of total bar lengths
    const auto zero = fourier_bound_check(f, g, {0.0});
    CompensatedSum af, ag;
    for (const auto& s : f.samples) {
        for (const auto& d : s.diagrams) af.add((d.degree % 2 ? -1.0 : 1.0) * pers_p(d, 1.0));
    }
    for (const auto& s : g.samples) {
        for (const auto& d : s.diagrams) ag.add((d.degree % 2 ? -1.0 : 1.0) * pers_p(d, 1.0));
    }
    const double expect = std::abs(af.value() - ag.value()) / static_cast<double>(seeds.size());
    CHECK(std::abs(zero.lhs - expect) <= 1e-9 * std::max(1.0, expect));

    auto other = make_trig_ensemble(1, 4, 3.0, {1, 2, 3, 4}, 1);
    CHECK_THROWS_AS(fourier_bound_check(f, other, thetas), std::invalid_argument);
}
