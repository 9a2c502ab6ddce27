#pragma once

// Scalar functionals of a diagram's bar lengths: power sums, counting
// functions, and fits against the counting function's growth/decay.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "torph/persistence.hpp"

namespace torph {

// Sum of length^p over all bars (the p-th power of the p-norm, not the
// norm itself). Zero-length bars contribute nothing for every p > 0.
inline double pers_p(const Diagram& d, double p) {
    if (!(p > 0.0) || !std::isfinite(p))
        throw std::invalid_argument("pers_p: order must be in (0, inf)");
    CompensatedSum s;
    for (const auto& pt : d.points) {
        const double l = pt.length();
        if (l > 0.0) s.add(std::pow(l, p));
    }
    return s.value();
}

// Longest bar length (sup norm of the length sequence); 0 for empty diagrams.
inline double pers_infinity(const Diagram& d) {
    double m = 0.0;
    for (const auto& pt : d.points) m = std::max(m, pt.length());
    return m;
}

inline long long count_bars_geq(const Diagram& d, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("count_bars_geq: eps must be positive");
    long long n = 0;
    for (const auto& pt : d.points)
        if (pt.length() >= eps) ++n;
    return n;
}

// Evaluates p * integral_0^inf eps^{p-1} N(eps) d eps by exact piecewise
// integration: N is constant between consecutive distinct bar lengths, so
// the integral telescopes to sum_j N(u_j) (u_j^p - u_{j-1}^p). Equals
// pers_p up to roundoff; computed along a genuinely different path.
inline double mellin_pers_p(const Diagram& d, double p) {
    if (!(p > 0.0) || !std::isfinite(p))
        throw std::invalid_argument("mellin_pers_p: order must be in (0, inf)");
    std::vector<double> lens;
    lens.reserve(d.points.size());
    for (const auto& pt : d.points) {
        const double l = pt.length();
        if (l > 0.0) lens.push_back(l);
    }
    std::sort(lens.begin(), lens.end());
    CompensatedSum s;
    double prev_pow = 0.0;
    std::size_t i = 0;
    while (i < lens.size()) {
        std::size_t j = i;
        while (j < lens.size() && lens[j] == lens[i]) ++j;
        // N(eps) = lens.size() - i for eps in (lens[i-1], lens[i]]
        const double cur_pow = std::pow(lens[i], p);
        s.add(static_cast<double>(lens.size() - i) * (cur_pow - prev_pow));
        prev_pow = cur_pow;
        i = j;
    }
    return s.value();
}

struct TailEstimate {
    std::vector<double> epsilons;     // strictly decreasing
    std::vector<long long> counts;    // N(eps), nondecreasing along epsilons
    std::vector<bool> used;           // counts > 0 enter the fit
    std::vector<double> residuals;    // log N - fit, 0 where unused
    double slope = 0.0;               // of log N(eps) against log(1/eps)
    double intercept = 0.0;
};

// Least-squares slope of log N(eps) vs log(1/eps) over a grid spanning at
// least two decades. Grid points with N = 0 are dropped from the fit.
inline TailEstimate tail_exponent(const Diagram& d, std::vector<double> eps_grid) {
    for (double e : eps_grid)
        if (!(e > 0.0) || !std::isfinite(e))
            throw std::invalid_argument("tail_exponent: eps grid must be positive and finite");
    if (eps_grid.size() < 4)
        throw std::invalid_argument("tail_exponent: need at least 4 grid points");
    std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());
    if (std::adjacent_find(eps_grid.begin(), eps_grid.end()) != eps_grid.end())
        throw std::invalid_argument("tail_exponent: eps grid has duplicates");
    if (!(eps_grid.front() / eps_grid.back() >= 100.0 * (1.0 - 1e-12)))
        throw std::invalid_argument("tail_exponent: eps grid must span two decades");

    TailEstimate est;
    est.epsilons = std::move(eps_grid);
    est.counts.reserve(est.epsilons.size());
    for (double e : est.epsilons) est.counts.push_back(count_bars_geq(d, e));

    // fit on (t, y) = (log(1/eps), log N)
    std::vector<double> ts, ys;
    est.used.resize(est.epsilons.size(), false);
    for (std::size_t i = 0; i < est.epsilons.size(); ++i) {
        if (est.counts[i] <= 0) continue;
        est.used[i] = true;
        ts.push_back(std::log(1.0 / est.epsilons[i]));
        ys.push_back(std::log(static_cast<double>(est.counts[i])));
    }
    if (ts.size() < 2)
        throw std::invalid_argument("tail_exponent: fewer than 2 grid points see any bar");

    const double n = static_cast<double>(ts.size());
    CompensatedSum st, sy, stt, sty;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st.add(ts[i]);
        sy.add(ys[i]);
        stt.add(ts[i] * ts[i]);
        sty.add(ts[i] * ys[i]);
    }
    const double denom = n * stt.value() - st.value() * st.value();
    if (denom == 0.0) throw std::invalid_argument("tail_exponent: degenerate grid");
    est.slope = (n * sty.value() - st.value() * sy.value()) / denom;
    est.intercept = (sy.value() - est.slope * st.value()) / n;

    est.residuals.assign(est.epsilons.size(), 0.0);
    std::size_t j = 0;
    for (std::size_t i = 0; i < est.epsilons.size(); ++i) {
        if (!est.used[i]) continue;
        est.residuals[i] = ys[j] - (est.intercept + est.slope * ts[j]);
        ++j;
    }
    return est;
}

// Upper bound C * ||f||^{d/n} eps^{-d/n} + betti for the number of bars of
// length >= eps of a field with finite order-n Sobolev norm on a d-torus.
inline double sobolev_bar_bound(double sobolev, double n, int d, double eps,
                                int betti_of_space, double C) {
    if (d < 1 || d > 3) throw std::invalid_argument("sobolev_bar_bound: d must be 1, 2 or 3");
    if (!(n > d)) throw std::invalid_argument("sobolev_bar_bound: need smoothness n > d");
    if (!(eps > 0.0)) throw std::invalid_argument("sobolev_bar_bound: eps must be positive");
    if (!(C > 0.0)) throw std::invalid_argument("sobolev_bar_bound: constant must be positive");
    if (sobolev < 0.0 || betti_of_space < 0)
        throw std::invalid_argument("sobolev_bar_bound: negative norm or Betti number");
    const double expnt = static_cast<double>(d) / n;
    return C * std::pow(sobolev, expnt) * std::pow(eps, -expnt) + betti_of_space;
}

}  // namespace torph
