#pragma once

// Optimal partial transport between diagrams. Points may match each other
// (sup-metric cost) or the diagonal (half their length); the partial
// problem becomes a perfect matching on an (n_D + n_E)-square matrix with
// diagonal surrogates, solved exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "torph/functionals.hpp"
#include "torph/persistence.hpp"

namespace torph {

inline double point_dist_inf(const DiagramPoint& a, const DiagramPoint& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

inline double diagonal_dist(const DiagramPoint& a) { return 0.5 * a.length(); }

struct TransportPair {
    int source = -1;  // index into D.points, -1 = diagonal
    int target = -1;  // index into E.points, -1 = diagonal
};

struct TransportPlan {
    double p = 1.0;
    double cost = 0.0;  // p-th root of the total matched cost
    std::vector<TransportPair> pairs;
};

namespace detail {

// Min-cost perfect matching on a dense square matrix (successive shortest
// augmenting paths with potentials). Returns the column of each row.
inline std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return {};
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) col_of_row[p[j] - 1] = j - 1;
    return col_of_row;
}

struct PartialInstance {
    std::vector<int> dpts, epts;            // indices of positive-length points
    std::vector<std::vector<double>> dist;  // raw sup-metric costs, square
};

inline PartialInstance partial_instance(const Diagram& D, const Diagram& E) {
    PartialInstance inst;
    for (std::size_t i = 0; i < D.points.size(); ++i)
        if (D.points[i].length() > 0.0) inst.dpts.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < E.points.size(); ++j)
        if (E.points[j].length() > 0.0) inst.epts.push_back(static_cast<int>(j));
    const std::size_t nd = inst.dpts.size(), ne = inst.epts.size(), n = nd + ne;
    inst.dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i < nd && j < ne)
                inst.dist[i][j] =
                    point_dist_inf(D.points[inst.dpts[i]], E.points[inst.epts[j]]);
            else if (i < nd)
                inst.dist[i][j] = diagonal_dist(D.points[inst.dpts[i]]);
            else if (j < ne)
                inst.dist[i][j] = diagonal_dist(E.points[inst.epts[j]]);
        }
    }
    return inst;
}

}  // namespace torph::detail

// p-th order partial transport distance, p in (0, inf). For p < 1 the
// matching minimizes the same power sum; the result is the p-th root.
inline TransportPlan transport_plan(const Diagram& D, const Diagram& E, double p) {
    if (!(p > 0.0) || !std::isfinite(p))
        throw std::invalid_argument("transport_plan: order must be in (0, inf)");
    auto inst = detail::partial_instance(D, E);
    const std::size_t nd = inst.dpts.size(), ne = inst.epts.size(), n = nd + ne;

    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i][j] = inst.dist[i][j] == 0.0 ? 0.0 : std::pow(inst.dist[i][j], p);

    const auto col = detail::solve_assignment(cost);
    TransportPlan plan;
    plan.p = p;
    CompensatedSum total;
    for (std::size_t i = 0; i < n; ++i) {
        const int j = col[i];
        total.add(cost[i][static_cast<std::size_t>(j)]);
        if (i < nd && j < static_cast<int>(ne))
            plan.pairs.push_back({inst.dpts[i], inst.epts[j]});
        else if (i < nd)
            plan.pairs.push_back({inst.dpts[i], -1});
        else if (j < static_cast<int>(ne))
            plan.pairs.push_back({-1, inst.epts[j]});
        // surrogate-to-surrogate carries nothing
    }
    // zero-length points move to the diagonal for free
    for (std::size_t i = 0; i < D.points.size(); ++i)
        if (D.points[i].length() <= 0.0) plan.pairs.push_back({static_cast<int>(i), -1});
    for (std::size_t j = 0; j < E.points.size(); ++j)
        if (E.points[j].length() <= 0.0) plan.pairs.push_back({-1, static_cast<int>(j)});
    plan.cost = std::pow(total.value(), 1.0 / p);
    return plan;
}

inline double dist_p(const Diagram& D, const Diagram& E, double p) {
    return transport_plan(D, E, p).cost;
}

// Bottleneck distance: smallest eps admitting a perfect matching that uses
// only moves of cost <= eps. Exact: binary search over realized costs.
inline double bottleneck(const Diagram& D, const Diagram& E) {
    auto inst = detail::partial_instance(D, E);
    const std::size_t n = inst.dist.size();
    if (n == 0) return 0.0;

    std::vector<double> cands;
    cands.reserve(n * n);
    for (const auto& row : inst.dist)
        for (double c : row) cands.push_back(c);
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    std::vector<int> match_row(n);
    std::vector<char> visited(n);
    std::function<bool(std::size_t, double)> augment = [&](std::size_t i, double eps) {
        for (std::size_t j = 0; j < n; ++j) {
            if (visited[j] || inst.dist[i][j] > eps) continue;
            visited[j] = 1;
            if (match_row[j] < 0 || augment(static_cast<std::size_t>(match_row[j]), eps)) {
                match_row[j] = static_cast<int>(i);
                return true;
            }
        }
        return false;
    };
    auto feasible = [&](double eps) {
        std::fill(match_row.begin(), match_row.end(), -1);
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(visited.begin(), visited.end(), 0);
            if (!augment(i, eps)) return false;
        }
        return true;
    };

    std::size_t lo = 0, hi = cands.size() - 1;  // largest candidate is always feasible
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (feasible(cands[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return cands[lo];
}

struct InterpolationRecord {
    double p_theta = 0.0;
    double lhs = 0.0;        // dist_{p_theta}
    double rhs_first = 0.0;  // 2^{1-theta} dist_p^theta (Pers_q(D)+Pers_q(E))^{1-theta}
    double rhs_second = 0.0; // 2^theta dist_q^{1-theta} (Pers_p(D)+Pers_p(E))^theta
};

// Evaluates both interpolation bounds for 1/p_theta = theta/p + (1-theta)/q.
// q may be +infinity; Pers_inf is then the longest bar and dist_q the
// bottleneck distance.
inline InterpolationRecord interpolation_check(const Diagram& D, const Diagram& E, double p,
                                               double q, double theta) {
    if (!(p > 0.0) || !std::isfinite(p))
        throw std::invalid_argument("interpolation_check: p must be in (0, inf)");
    if (!(q > p)) throw std::invalid_argument("interpolation_check: need q > p");
    if (!(theta > 0.0) || !(theta < 1.0))
        throw std::invalid_argument("interpolation_check: theta must be in (0, 1)");

    const bool qinf = std::isinf(q);
    InterpolationRecord rec;
    rec.p_theta = 1.0 / (theta / p + (qinf ? 0.0 : (1.0 - theta) / q));
    rec.lhs = dist_p(D, E, rec.p_theta);

    const double dp = dist_p(D, E, p);
    const double pers_q_sum =
        qinf ? pers_infinity(D) + pers_infinity(E)
             : std::pow(pers_p(D, q), 1.0 / q) + std::pow(pers_p(E, q), 1.0 / q);
    rec.rhs_first =
        std::pow(2.0, 1.0 - theta) * std::pow(dp, theta) * std::pow(pers_q_sum, 1.0 - theta);

    const double dq = qinf ? bottleneck(D, E) : dist_p(D, E, q);
    const double pers_p_sum = std::pow(pers_p(D, p), 1.0 / p) + std::pow(pers_p(E, p), 1.0 / p);
    rec.rhs_second =
        std::pow(2.0, theta) * std::pow(dq, 1.0 - theta) * std::pow(pers_p_sum, theta);
    return rec;
}

// Diagram with n^2 copies of the bar (1/n, 0). Its dist_p to the empty
// diagram is n^{2/p}/(2n) while its Betti curve moves away at L1 speed n:
// the family separates transport distances from curve distances.
inline Diagram gen_discontinuity_sequence(int n, double p) {
    if (n < 1) throw std::invalid_argument("gen_discontinuity_sequence: n must be >= 1");
    if (!(p > 1.0)) throw std::invalid_argument("gen_discontinuity_sequence: p must exceed 1");
    Diagram d;
    d.degree = 0;
    d.range_min = 0.0;
    d.range_max = 1.0 / n;
    d.points.assign(static_cast<std::size_t>(n) * n, DiagramPoint{1.0 / n, 0.0, false});
    return d;
}

}  // namespace torph
