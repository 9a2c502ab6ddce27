#pragma once

// Betti and Euler characteristic curves of superlevel filtrations, as
// compactly supported step functions of the level.

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "torph/persistence.hpp"
#include "torph/step_curve.hpp"

namespace torph {

// beta_k(x) - beta_k(x above max): each bar contributes 1 on (death, birth].
// Essential bars contribute on (range_min, birth]; the constant value on
// [anything <= range_min] is carried by convention at range_min itself by
// Diagram::rank_at, not by the curve, which is 0 off its support.
inline StepCurve betti_curve(const Diagram& d) {
    std::map<double, double> jumps;
    for (const auto& pt : d.points) {
        const double death = pt.essential ? d.range_min : pt.death;
        if (!(pt.birth > death)) continue;
        jumps[death] += 1.0;
        jumps[pt.birth] -= 1.0;
    }
    return curve_from_jumps(jumps);
}

// Alternating sum of the Betti curves of one filtration.
inline StepCurve euler_curve(const std::vector<Diagram>& diagrams) {
    if (diagrams.empty()) throw std::invalid_argument("euler_curve: no diagrams");
    for (const auto& d : diagrams)
        if (d.range_min != diagrams[0].range_min || d.range_max != diagrams[0].range_max)
            throw std::invalid_argument("euler_curve: diagrams from different filtrations");
    std::map<double, double> jumps;
    for (const auto& d : diagrams) {
        const double w = d.degree % 2 ? -1.0 : 1.0;
        for (const auto& pt : d.points) {
            const double death = pt.essential ? d.range_min : pt.death;
            if (!(pt.birth > death)) continue;
            jumps[death] += w;
            jumps[pt.birth] -= w;
        }
    }
    return curve_from_jumps(jumps);
}

// Euler characteristic of the closed band {x - eps <= f <= x + eps} via
// the valuation identity chi(band) = chi{f >= x-eps} + chi{-f >= -x-eps}
// - chi(space). Step curves vanish below their support, which matches
// chi = 0 for tori; valid whenever neither evaluation point sits on a
// jump of its curve.
inline long long level_set_euler(const StepCurve& euler_f, const StepCurve& euler_neg_f,
                                 long long chi_space, double x, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("level_set_euler: eps must be positive");
    const double a = x - eps;
    const double b = -x - eps;
    if (euler_f.has_breakpoint(a) || euler_neg_f.has_breakpoint(b))
        throw std::invalid_argument("level_set_euler: level hits a critical value; shrink eps");
    const double v = euler_f.value_at(a) + euler_neg_f.value_at(b) - double(chi_space);
    return std::llround(v);
}

}  // namespace torph
