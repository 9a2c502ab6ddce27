#pragma once

// Shared test utilities: seeded generators and independent brute-force
// oracles the library implementations are checked against.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "torph/persistence.hpp"
#include "torph/transport.hpp"

namespace testutil {

// Diagram with point count in [0, max_points], births/deaths in [lo, hi].
// Roughly one point in eight is a zero-length bar (must be inert).
inline torph::Diagram random_diagram(std::mt19937_64& rng, int max_points, double lo = -1.0,
                                     double hi = 2.0) {
    std::uniform_int_distribution<int> np(0, max_points);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    torph::Diagram d;
    d.degree = 0;
    d.range_min = lo;
    d.range_max = hi;
    const int n = np(rng);
    for (int i = 0; i < n; ++i) {
        const double death = lo + (hi - lo) * u(rng);
        const double len = u(rng) < 0.125 ? 0.0 : (hi - death) * u(rng);
        d.points.push_back({death + len, death, false});
    }
    std::sort(d.points.begin(), d.points.end(),
              [](const torph::DiagramPoint& a, const torph::DiagramPoint& b) {
                  return a.birth != b.birth ? a.birth > b.birth : a.death > b.death;
              });
    return d;
}

// Positive-length points only; the matching problem ignores the rest.
inline std::vector<torph::DiagramPoint> positive_points(const torph::Diagram& d) {
    std::vector<torph::DiagramPoint> out;
    for (const auto& pt : d.points)
        if (pt.length() > 0.0) out.push_back(pt);
    return out;
}

// Exhaustive optimal partial matching: every D point goes to an unused E
// point or the diagonal, leftovers of E go to the diagonal. Returns the
// minimal sum of move-cost^p (not its p-th root).
inline double brute_force_cost_p(const torph::Diagram& D, const torph::Diagram& E, double p) {
    const auto dp = positive_points(D);
    const auto ep = positive_points(E);
    std::vector<char> used(ep.size(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, double)> rec = [&](std::size_t i, double acc) {
        if (acc >= best) return;
        if (i == dp.size()) {
            double total = acc;
            for (std::size_t j = 0; j < ep.size(); ++j)
                if (!used[j]) total += std::pow(torph::diagonal_dist(ep[j]), p);
            best = std::min(best, total);
            return;
        }
        rec(i + 1, acc + std::pow(torph::diagonal_dist(dp[i]), p));
        for (std::size_t j = 0; j < ep.size(); ++j) {
            if (used[j]) continue;
            used[j] = 1;
            rec(i + 1, acc + std::pow(torph::point_dist_inf(dp[i], ep[j]), p));
            used[j] = 0;
        }
    };
    rec(0, 0.0);
    return best;
}

inline double brute_force_dist_p(const torph::Diagram& D, const torph::Diagram& E, double p) {
    return std::pow(brute_force_cost_p(D, E, p), 1.0 / p);
}

// Exhaustive bottleneck: minimal over matchings of the largest move.
inline double brute_force_bottleneck(const torph::Diagram& D, const torph::Diagram& E) {
    const auto dp = positive_points(D);
    const auto ep = positive_points(E);
    std::vector<char> used(ep.size(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, double)> rec = [&](std::size_t i, double acc) {
        if (acc >= best) return;
        if (i == dp.size()) {
            double total = acc;
            for (std::size_t j = 0; j < ep.size(); ++j)
                if (!used[j]) total = std::max(total, torph::diagonal_dist(ep[j]));
            best = std::min(best, total);
            return;
        }
        rec(i + 1, std::max(acc, torph::diagonal_dist(dp[i])));
        for (std::size_t j = 0; j < ep.size(); ++j) {
            if (used[j]) continue;
            used[j] = 1;
            rec(i + 1, std::max(acc, torph::point_dist_inf(dp[i], ep[j])));
            used[j] = 0;
        }
    };
    rec(0, 0.0);
    return best;
}

}  // namespace testutil
