#pragma once

// Piecewise-constant, compactly supported functions of the filtration
// level. Piece i takes values[i] on the half-open interval
// (breakpoints[i], breakpoints[i+1]]; the function is 0 outside
// (breakpoints.front(), breakpoints.back()].

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "torph/common.hpp"

namespace torph {

struct StepCurve {
    std::vector<double> breakpoints;  // strictly increasing; size values.size()+1, or empty
    std::vector<double> values;       // no two adjacent equal; first/last nonzero

    bool is_zero() const { return values.empty(); }
    std::size_t piece_count() const { return values.size(); }

    double value_at(double x) const {
        auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
        // it == begin covers x <= breakpoints[0]: the leftmost piece is
        // left-open, so the curve is 0 there.
        if (it == breakpoints.begin() || it == breakpoints.end()) return 0.0;
        return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
    }

    bool has_breakpoint(double x) const {
        return std::binary_search(breakpoints.begin(), breakpoints.end(), x);
    }

    bool operator==(const StepCurve& o) const {
        return breakpoints == o.breakpoints && values == o.values;
    }
};

// Canonicalizes raw pieces: merges adjacent equal values and trims zero
// pieces at both ends (interior zero pieces encode support gaps and stay).
inline StepCurve make_step_curve(const std::vector<double>& breakpoints,
                                 const std::vector<double>& values) {
    if (breakpoints.empty() && values.empty()) return {};
    if (breakpoints.size() != values.size() + 1)
        throw std::invalid_argument("make_step_curve: need one more breakpoint than values");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i - 1] < breakpoints[i]))
            throw std::invalid_argument("make_step_curve: breakpoints must be strictly increasing");

    std::size_t lo = 0, hi = values.size();
    while (lo < hi && values[lo] == 0.0) ++lo;
    while (hi > lo && values[hi - 1] == 0.0) --hi;
    StepCurve c;
    if (lo == hi) return c;
    c.breakpoints.push_back(breakpoints[lo]);
    for (std::size_t i = lo; i < hi; ++i) {
        if (!c.values.empty() && c.values.back() == values[i]) {
            c.breakpoints.back() = breakpoints[i + 1];
            continue;
        }
        c.values.push_back(values[i]);
        c.breakpoints.push_back(breakpoints[i + 1]);
    }
    return c;
}

// Builds the curve with jump +w at each key, i.e. the sum of
// w * 1_{(a, b]} terms entered as {a: +w, b: -w}. Jumps must cancel
// overall (the curve has compact support).
inline StepCurve curve_from_jumps(const std::map<double, double>& jumps) {
    std::vector<double> pos, cum;
    pos.reserve(jumps.size());
    cum.reserve(jumps.size());
    double run = 0.0;
    for (const auto& [t, dw] : jumps) {
        pos.push_back(t);
        run += dw;
        cum.push_back(run);
    }
    if (pos.size() < 2) return {};
    cum.pop_back();  // value above the last position is 0 by cancellation
    pos.shrink_to_fit();
    return make_step_curve(pos, cum);
}

inline double l1_norm(const StepCurve& c) {
    CompensatedSum s;
    for (std::size_t i = 0; i < c.values.size(); ++i)
        s.add(std::abs(c.values[i]) * (c.breakpoints[i + 1] - c.breakpoints[i]));
    return s.value();
}

// L1 distance via a sweep over the merged breakpoints. Each merged
// segment (u, w] lies inside one piece of each curve, and value_at(w)
// reads that piece exactly (no midpoint rounding).
inline double l1_dist(const StepCurve& a, const StepCurve& b) {
    std::vector<double> pts;
    pts.reserve(a.breakpoints.size() + b.breakpoints.size());
    pts.insert(pts.end(), a.breakpoints.begin(), a.breakpoints.end());
    pts.insert(pts.end(), b.breakpoints.begin(), b.breakpoints.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    CompensatedSum s;
    for (std::size_t i = 1; i < pts.size(); ++i)
        s.add(std::abs(a.value_at(pts[i]) - b.value_at(pts[i])) * (pts[i] - pts[i - 1]));
    return s.value();
}

// F[c](theta) = integral of c(x) e^{-i x theta} dx, exact per piece:
// the indicator of (a, b] contributes (e^{-i a theta} - e^{-i b theta}) / (i theta).
inline std::vector<std::complex<double>> fourier_transform(const StepCurve& c,
                                                           const std::vector<double>& thetas) {
    std::vector<std::complex<double>> out;
    out.reserve(thetas.size());
    const std::complex<double> iunit(0.0, 1.0);
    for (double th : thetas) {
        if (th == 0.0) {
            CompensatedSum area;
            for (std::size_t i = 0; i < c.values.size(); ++i)
                area.add(c.values[i] * (c.breakpoints[i + 1] - c.breakpoints[i]));
            out.emplace_back(area.value(), 0.0);
            continue;
        }
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            const std::complex<double> ea = std::exp(-iunit * th * c.breakpoints[i]);
            const std::complex<double> eb = std::exp(-iunit * th * c.breakpoints[i + 1]);
            acc += c.values[i] * (ea - eb);
        }
        out.push_back(acc / (iunit * th));
    }
    return out;
}

}  // namespace torph
