#pragma once

// Ensembles of random fields with their diagrams and curves, empirical
// Wasserstein distances between sample sets, and the two stability
// experiment harnesses. Everything is a pure function of seeds.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "torph/curves.hpp"
#include "torph/field.hpp"
#include "torph/functionals.hpp"
#include "torph/persistence.hpp"
#include "torph/transport.hpp"

namespace torph {

struct EnsembleSample {
    ScalarField field;
    std::vector<Diagram> diagrams;  // degrees 0..dim
    std::vector<StepCurve> betti;   // degrees 0..dim
    StepCurve euler;
};

struct Ensemble {
    std::string generator;
    std::vector<std::uint64_t> seeds;
    std::vector<EnsembleSample> samples;
};

inline EnsembleSample analyze_field(ScalarField f) {
    EnsembleSample s;
    const auto K = build_complex(f);
    s.diagrams = compute_diagrams(K);
    s.betti.reserve(s.diagrams.size());
    for (const auto& d : s.diagrams) s.betti.push_back(betti_curve(d));
    s.euler = euler_curve(s.diagrams);
    s.field = std::move(f);
    return s;
}

inline Ensemble make_trig_ensemble(int dim, int cutoff, double beta,
                                   const std::vector<std::uint64_t>& seeds, int jobs = 1) {
    Ensemble ens;
    ens.generator = "trig(cutoff=" + std::to_string(cutoff) + ",beta=" + std::to_string(beta) +
                    ",dim=" + std::to_string(dim) + ")";
    ens.seeds = seeds;
    ens.samples.resize(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        ens.samples[i] = analyze_field(sample_trig_field(dim, cutoff, beta, seeds[i]));
    });
    return ens;
}

// Noise stream for the coupled copy at a given delta; depends only on the
// sample's base seed and the delta bits.
inline std::uint64_t perturb_seed(std::uint64_t base_seed, double delta) {
    return splitmix64(base_seed ^ splitmix64(std::bit_cast<std::uint64_t>(delta)));
}

inline Ensemble perturb_ensemble(const Ensemble& ens, double delta, PerturbMode mode,
                                 int jobs = 1) {
    Ensemble out;
    out.generator = ens.generator + "+noise";
    out.seeds = ens.seeds;
    out.samples.resize(ens.samples.size());
    parallel_for(ens.samples.size(), jobs, [&](std::size_t i) {
        out.samples[i] = analyze_field(
            perturb(ens.samples[i].field, delta, mode, perturb_seed(ens.seeds[i], delta)));
    });
    return out;
}

// Exact order-W distance between two equal-size sample multisets:
// ( min over bijections of (1/N) sum ground(A_i, B_sigma(i))^order )^{1/order}.
template <typename T, typename Ground>
double empirical_wasserstein(const std::vector<T>& A, const std::vector<T>& B, Ground ground,
                             double order) {
    if (A.size() != B.size())
        throw std::invalid_argument("empirical_wasserstein: sample counts differ");
    if (!(order >= 1.0) || !std::isfinite(order))
        throw std::invalid_argument("empirical_wasserstein: order must be finite and >= 1");
    const std::size_t n = A.size();
    if (n == 0) return 0.0;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = ground(A[i], B[j]);
            if (!std::isfinite(d))
                throw std::invalid_argument("empirical_wasserstein: non-finite ground distance");
            cost[i][j] = d == 0.0 ? 0.0 : std::pow(d, order);
        }
    const auto col = detail::solve_assignment(cost);
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(cost[i][static_cast<std::size_t>(col[i])]);
    return std::pow(s.value() / static_cast<double>(n), 1.0 / order);
}

// Mean over the coupling of sup|f_i - g_i|: an upper bound for the order-1
// Wasserstein distance between the two field laws under the sup metric.
inline double coupled_sup_wasserstein_bound(const Ensemble& ens_f, const Ensemble& ens_g) {
    if (ens_f.seeds != ens_g.seeds)
        throw std::invalid_argument("coupled_sup_wasserstein_bound: ensembles not coupled");
    CompensatedSum s;
    for (std::size_t i = 0; i < ens_f.samples.size(); ++i)
        s.add(sup_norm_diff(ens_f.samples[i].field, ens_g.samples[i].field));
    return ens_f.samples.empty() ? 0.0 : s.value() / static_cast<double>(ens_f.samples.size());
}

struct ExperimentConfig {
    int dim = 1;
    int cutoff = 8;
    double beta = 4.0;
    double n = 2.0;      // Sobolev smoothness entering the bounds
    double p = 2.0;      // diagram distance order
    double q = 0.75;     // norm exponent, d/n < q < p
    double alpha = 0.75; // curve bound exponent, d/n < alpha < 1
    std::vector<double> deltas;
    std::vector<std::uint64_t> seeds;
    std::vector<int> degrees{0};
    PerturbMode mode = PerturbMode::smooth;
    std::vector<double> thetas{0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
    int jobs = 1;
};

struct StabilityRow {
    double delta = 0.0;
    double mean_sup_diff = 0.0;
    double mean_norm_f = 0.0;      // mean Sobolev norm of the base fields
    double mean_norm_g = 0.0;
    std::vector<double> mean_distp_p;  // per cfg degree, mean of dist_p^p
    std::vector<double> ratio;         // per degree: mean of per-sample fitted ratios
    std::vector<std::vector<double>> raw_distp_p;  // [degree][seed]
    std::vector<double> raw_sup_diff;              // [seed]

    // curve experiment fields
    std::vector<double> w1l1_betti;   // per cfg degree
    double w1l1_euler = 0.0;
    std::vector<double> curve_margin; // per degree: W / (rhs without constant)
    double euler_margin = 0.0;
    double fourier_lhs = 0.0;
    double fourier_rhs = 0.0;
};

struct StabilityReport {
    ExperimentConfig cfg;
    std::vector<StabilityRow> rows;
    // diagram experiment fits (per cfg degree)
    std::vector<double> c_fit;
    std::vector<double> slope;  // of log mean dist_p^p vs log delta; NaN if degenerate
    // curve experiment fits (per cfg degree + Euler)
    std::vector<double> c_fit_curve;
    std::vector<double> slope_curve;  // of log W_{1,L1} vs log delta
    double c_fit_euler = 0.0;
    double slope_euler = 0.0;
};

namespace detail {

inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    CompensatedSum st, sy, stt, sty;
    std::size_t n = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) continue;
        const double t = std::log(xs[i]);
        const double y = std::log(ys[i]);
        st.add(t);
        sy.add(y);
        stt.add(t * t);
        sty.add(t * y);
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double denom = n * stt.value() - st.value() * st.value();
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sty.value() - st.value() * sy.value()) / denom;
}

inline void check_experiment_config(const ExperimentConfig& cfg) {
    if (cfg.dim < 1 || cfg.dim > 3)
        throw std::invalid_argument("experiment: dim must be 1, 2 or 3");
    if (!(cfg.n > cfg.dim)) throw std::invalid_argument("experiment: need smoothness n > dim");
    if (!(cfg.p > cfg.q)) throw std::invalid_argument("experiment: need p > q");
    if (!(cfg.q > cfg.dim / cfg.n)) throw std::invalid_argument("experiment: need q > dim/n");
    if (!(cfg.alpha > cfg.dim / cfg.n) || !(cfg.alpha < 1.0))
        throw std::invalid_argument("experiment: need dim/n < alpha < 1");
    if (cfg.seeds.empty()) throw std::invalid_argument("experiment: no seeds");
    if (cfg.deltas.empty()) throw std::invalid_argument("experiment: no deltas");
    for (double d : cfg.deltas)
        if (!(d >= 0.0) || !std::isfinite(d))
            throw std::invalid_argument("experiment: deltas must be finite and >= 0");
    for (int k : cfg.degrees)
        if (k < 0 || k > cfg.dim)
            throw std::invalid_argument("experiment: degree outside [0, dim]");
}

}  // namespace detail

// Sweeps delta, measuring dist_p between coupled diagrams against the
// envelope C * max(norm_f, norm_g)^q * delta^{p-q}.
inline StabilityReport stability_experiment(const ExperimentConfig& cfg) {
    detail::check_experiment_config(cfg);
    StabilityReport rep;
    rep.cfg = cfg;
    const std::size_t nk = cfg.degrees.size();
    rep.c_fit.assign(nk, 0.0);

    const Ensemble base =
        make_trig_ensemble(cfg.dim, cfg.cutoff, cfg.beta, cfg.seeds, cfg.jobs);
    std::vector<double> norm_f(base.samples.size());
    for (std::size_t i = 0; i < base.samples.size(); ++i)
        norm_f[i] = sobolev_norm(base.samples[i].field, cfg.n);

    for (double delta : cfg.deltas) {
        const Ensemble pert = perturb_ensemble(base, delta, cfg.mode, cfg.jobs);
        StabilityRow row;
        row.delta = delta;
        row.raw_distp_p.assign(nk, std::vector<double>(base.samples.size(), 0.0));
        row.raw_sup_diff.resize(base.samples.size());

        CompensatedSum sup_sum, nf_sum, ng_sum;
        std::vector<CompensatedSum> dist_sum(nk), ratio_sum(nk);
        parallel_for(base.samples.size(), cfg.jobs, [&](std::size_t i) {
            row.raw_sup_diff[i] = sup_norm_diff(base.samples[i].field, pert.samples[i].field);
            for (std::size_t t = 0; t < nk; ++t) {
                const int k = cfg.degrees[t];
                const double d = dist_p(base.samples[i].diagrams[k],
                                        pert.samples[i].diagrams[k], cfg.p);
                row.raw_distp_p[t][i] = std::pow(d, cfg.p);
            }
        });
        for (std::size_t i = 0; i < base.samples.size(); ++i) {
            sup_sum.add(row.raw_sup_diff[i]);
            nf_sum.add(norm_f[i]);
            const double ng = sobolev_norm(pert.samples[i].field, cfg.n);
            ng_sum.add(ng);
            const double envelope =
                std::pow(std::max(norm_f[i], ng), cfg.q) * std::pow(delta, cfg.p - cfg.q);
            for (std::size_t t = 0; t < nk; ++t) {
                dist_sum[t].add(row.raw_distp_p[t][i]);
                const double r = envelope > 0.0 ? row.raw_distp_p[t][i] / envelope : 0.0;
                ratio_sum[t].add(r);
                rep.c_fit[t] = std::max(rep.c_fit[t], r);
            }
        }
        const double inv_n = 1.0 / static_cast<double>(base.samples.size());
        row.mean_sup_diff = sup_sum.value() * inv_n;
        row.mean_norm_f = nf_sum.value() * inv_n;
        row.mean_norm_g = ng_sum.value() * inv_n;
        for (std::size_t t = 0; t < nk; ++t) {
            row.mean_distp_p.push_back(dist_sum[t].value() * inv_n);
            row.ratio.push_back(ratio_sum[t].value() * inv_n);
        }
        rep.rows.push_back(std::move(row));
    }

    rep.slope.assign(nk, 0.0);
    for (std::size_t t = 0; t < nk; ++t) {
        std::vector<double> xs, ys;
        for (const auto& row : rep.rows) {
            xs.push_back(row.delta);
            ys.push_back(row.mean_distp_p[t]);
        }
        rep.slope[t] = detail::loglog_slope(xs, ys);
    }
    return rep;
}

// Sweeps delta, measuring W_{1,L1} between Betti-curve (and Euler-curve)
// ensembles against [E norm_f^alpha + E norm_g^alpha] * (E sup diff)^{1-alpha},
// plus the Fourier-transform consequence of the Euler-curve bound.
inline StabilityReport curve_stability_experiment(const ExperimentConfig& cfg) {
    detail::check_experiment_config(cfg);
    StabilityReport rep;
    rep.cfg = cfg;
    const std::size_t nk = cfg.degrees.size();
    rep.c_fit_curve.assign(nk, 0.0);

    const Ensemble base =
        make_trig_ensemble(cfg.dim, cfg.cutoff, cfg.beta, cfg.seeds, cfg.jobs);
    std::vector<double> norm_f(base.samples.size());
    for (std::size_t i = 0; i < base.samples.size(); ++i)
        norm_f[i] = sobolev_norm(base.samples[i].field, cfg.n);

    const auto euler_of = [](const EnsembleSample& s) { return s.euler; };
    for (double delta : cfg.deltas) {
        const Ensemble pert = perturb_ensemble(base, delta, cfg.mode, cfg.jobs);
        StabilityRow row;
        row.delta = delta;
        row.raw_sup_diff.resize(base.samples.size());

        CompensatedSum sup_sum, naf_sum, nag_sum, nf_sum, ng_sum;
        for (std::size_t i = 0; i < base.samples.size(); ++i) {
            row.raw_sup_diff[i] = sup_norm_diff(base.samples[i].field, pert.samples[i].field);
            sup_sum.add(row.raw_sup_diff[i]);
            const double ng = sobolev_norm(pert.samples[i].field, cfg.n);
            nf_sum.add(norm_f[i]);
            ng_sum.add(ng);
            naf_sum.add(std::pow(norm_f[i], cfg.alpha));
            nag_sum.add(std::pow(ng, cfg.alpha));
        }
        const double inv_n = 1.0 / static_cast<double>(base.samples.size());
        row.mean_sup_diff = sup_sum.value() * inv_n;
        row.mean_norm_f = nf_sum.value() * inv_n;
        row.mean_norm_g = ng_sum.value() * inv_n;
        const double rhs_base = (naf_sum.value() * inv_n + nag_sum.value() * inv_n) *
                                std::pow(row.mean_sup_diff, 1.0 - cfg.alpha);

        for (std::size_t t = 0; t < nk; ++t) {
            const int k = cfg.degrees[t];
            std::vector<StepCurve> cf, cg;
            for (const auto& s : base.samples) cf.push_back(s.betti[k]);
            for (const auto& s : pert.samples) cg.push_back(s.betti[k]);
            const double w = empirical_wasserstein(cf, cg, l1_dist, 1.0);
            row.w1l1_betti.push_back(w);
            const double margin = rhs_base > 0.0 ? w / rhs_base : 0.0;
            row.curve_margin.push_back(margin);
            rep.c_fit_curve[t] = std::max(rep.c_fit_curve[t], margin);
        }

        std::vector<StepCurve> ef, eg;
        for (const auto& s : base.samples) ef.push_back(euler_of(s));
        for (const auto& s : pert.samples) eg.push_back(euler_of(s));
        row.w1l1_euler = empirical_wasserstein(ef, eg, l1_dist, 1.0);
        row.euler_margin = rhs_base > 0.0 ? row.w1l1_euler / rhs_base : 0.0;
        rep.c_fit_euler = std::max(rep.c_fit_euler, row.euler_margin);

        // Fourier consequence: sup_theta |E F[chi_f] - E F[chi_g]| <= sqrt2 W
        double lhs = 0.0;
        for (double th : cfg.thetas) {
            std::complex<double> mf(0.0, 0.0), mg(0.0, 0.0);
            for (const auto& s : base.samples) mf += fourier_transform(s.euler, {th})[0];
            for (const auto& s : pert.samples) mg += fourier_transform(s.euler, {th})[0];
            lhs = std::max(lhs, std::abs(mf - mg) * inv_n);
        }
        row.fourier_lhs = lhs;
        row.fourier_rhs = std::sqrt(2.0) * row.w1l1_euler;
        rep.rows.push_back(std::move(row));
    }

    rep.slope_curve.assign(nk, 0.0);
    for (std::size_t t = 0; t < nk; ++t) {
        std::vector<double> xs, ys;
        for (const auto& row : rep.rows) {
            xs.push_back(row.delta);
            ys.push_back(row.w1l1_betti[t]);
        }
        rep.slope_curve[t] = detail::loglog_slope(xs, ys);
    }
    {
        std::vector<double> xs, ys;
        for (const auto& row : rep.rows) {
            xs.push_back(row.delta);
            ys.push_back(row.w1l1_euler);
        }
        rep.slope_euler = detail::loglog_slope(xs, ys);
    }
    return rep;
}

struct FourierBoundReport {
    std::vector<double> thetas;
    std::vector<double> lhs_per_theta;  // |E F[chi_f](theta) - E F[chi_g](theta)|
    double lhs = 0.0;                   // max over thetas
    double wasserstein = 0.0;           // W_{1,L1} between Euler-curve samples
    double rhs = 0.0;                   // sqrt(2) * wasserstein
};

inline FourierBoundReport fourier_bound_check(const Ensemble& ens_f, const Ensemble& ens_g,
                                              const std::vector<double>& thetas) {
    if (ens_f.seeds != ens_g.seeds)
        throw std::invalid_argument("fourier_bound_check: ensembles not coupled");
    FourierBoundReport rep;
    rep.thetas = thetas;
    const double inv_n =
        ens_f.samples.empty() ? 0.0 : 1.0 / static_cast<double>(ens_f.samples.size());
    for (double th : thetas) {
        std::complex<double> mf(0.0, 0.0), mg(0.0, 0.0);
        for (const auto& s : ens_f.samples) mf += fourier_transform(s.euler, {th})[0];
        for (const auto& s : ens_g.samples) mg += fourier_transform(s.euler, {th})[0];
        rep.lhs_per_theta.push_back(std::abs(mf - mg) * inv_n);
        rep.lhs = std::max(rep.lhs, rep.lhs_per_theta.back());
    }
    std::vector<StepCurve> ef, eg;
    for (const auto& s : ens_f.samples) ef.push_back(s.euler);
    for (const auto& s : ens_g.samples) eg.push_back(s.euler);
    rep.wasserstein = empirical_wasserstein(ef, eg, l1_dist, 1.0);
    rep.rhs = std::sqrt(2.0) * rep.wasserstein;
    return rep;
}

}  // namespace torph
