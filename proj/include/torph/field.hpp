#pragma once

// Scalar fields sampled on uniform periodic grids over the flat torus
// [0,1)^d, d in {1,2,3}. Fields synthesized from a finite Fourier series
// carry their coefficients so spectral Sobolev norms stay exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "torph/common.hpp"

namespace torph {

struct FourierCoeff {
    std::array<int, 3> k{0, 0, 0};  // wavevector; axes >= dim are 0
    std::complex<double> c;
};

struct Provenance {
    std::string generator = "grid";
    std::uint64_t seed = 0;
    int cutoff = 0;     // spectral box half-width when synthesized, else 0
    double beta = 0.0;  // spectral decay exponent when synthesized, else 0
};

struct ScalarField {
    int dim = 0;
    std::array<int, 3> shape{1, 1, 1};  // per-axis extents; axes >= dim are 1
    std::vector<double> values;         // row-major over (j0, j1, j2)
    std::vector<FourierCoeff> coeffs;   // empty when no spectral data
    Provenance provenance;

    std::size_t size() const {
        return static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
    }
    bool has_coeffs() const { return !coeffs.empty(); }

    // Flat index of grid vertex (j0, j1, j2); coordinates wrap.
    std::size_t flat(std::array<int, 3> j) const {
        for (int a = 0; a < 3; ++a) {
            j[a] %= shape[a];
            if (j[a] < 0) j[a] += shape[a];
        }
        return (static_cast<std::size_t>(j[0]) * shape[1] + j[1]) * shape[2] + j[2];
    }

    double min_value() const { return *std::min_element(values.begin(), values.end()); }
    double max_value() const { return *std::max_element(values.begin(), values.end()); }
};

namespace detail {

// Gaussian coefficients c_k = (1+|k|^2)^(-beta/2) xi_k on the box
// [-cutoff, cutoff]^dim, Hermitian-symmetric so the series is real.
// Draw order is the lexicographic walk restricted to k = 0 and to
// representatives whose first nonzero coordinate is positive.
inline std::vector<FourierCoeff> draw_trig_coeffs(int dim, int cutoff, double beta,
                                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    std::vector<std::array<int, 3>> box;
    const int c1 = dim > 1 ? cutoff : 0;
    const int c2 = dim > 2 ? cutoff : 0;
    for (int a = -cutoff; a <= cutoff; ++a)
        for (int b = -c1; b <= c1; ++b)
            for (int c = -c2; c <= c2; ++c) box.push_back({a, b, c});

    std::map<std::array<int, 3>, std::complex<double>> vals;
    for (const auto& k : box) {
        int lead = 0;
        for (int a = 0; a < 3; ++a)
            if (k[a] != 0) {
                lead = k[a];
                break;
            }
        if (lead == 0) {
            vals[k] = {gauss(rng), 0.0};
        } else if (lead > 0) {
            const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
            const double re = gauss(rng);
            const double im = gauss(rng);
            vals[k] = std::pow(1.0 + k2, -beta / 2.0) *
                      std::complex<double>(re * inv_sqrt2, im * inv_sqrt2);
        }
    }
    std::vector<FourierCoeff> out;
    out.reserve(box.size());
    for (const auto& k : box) {
        auto it = vals.find(k);
        if (it != vals.end()) {
            out.push_back({k, it->second});
        } else {
            const std::array<int, 3> nk{-k[0], -k[1], -k[2]};
            out.push_back({k, std::conj(vals.at(nk))});
        }
    }
    return out;
}

// Evaluates sum_k c_k e^{2 pi i k.x} on the grid; returns values and the
// largest imaginary residue (nonzero residue means broken symmetry).
inline std::pair<std::vector<double>, double> evaluate_trig(
    const std::vector<FourierCoeff>& coeffs, const std::array<int, 3>& shape) {
    using cd = std::complex<double>;
    const int m0 = shape[0], m1 = shape[1], m2 = shape[2];
    int kmax = 0;
    for (const auto& fc : coeffs)
        for (int a = 0; a < 3; ++a) kmax = std::max(kmax, std::abs(fc.k[a]));

    // twiddle[a][(k+kmax)*m_a + j] = e^{2 pi i k j / m_a}
    std::array<std::vector<cd>, 3> tw;
    for (int a = 0; a < 3; ++a) {
        const int m = shape[a];
        tw[a].resize(static_cast<std::size_t>(2 * kmax + 1) * m);
        for (int k = -kmax; k <= kmax; ++k)
            for (int j = 0; j < m; ++j)
                tw[a][static_cast<std::size_t>(k + kmax) * m + j] =
                    std::polar(1.0, 2.0 * std::numbers::pi * k * j / m);
    }

    std::vector<cd> acc(static_cast<std::size_t>(m0) * m1 * m2, cd(0.0, 0.0));
    for (const auto& fc : coeffs) {
        if (fc.c == cd(0.0, 0.0)) continue;
        const cd* t0 = &tw[0][static_cast<std::size_t>(fc.k[0] + kmax) * m0];
        const cd* t1 = &tw[1][static_cast<std::size_t>(fc.k[1] + kmax) * m1];
        const cd* t2 = &tw[2][static_cast<std::size_t>(fc.k[2] + kmax) * m2];
        std::size_t idx = 0;
        for (int j0 = 0; j0 < m0; ++j0) {
            const cd w0 = fc.c * t0[j0];
            for (int j1 = 0; j1 < m1; ++j1) {
                const cd w01 = w0 * t1[j1];
                for (int j2 = 0; j2 < m2; ++j2, ++idx) acc[idx] += w01 * t2[j2];
            }
        }
    }
    std::vector<double> vals(acc.size());
    double max_imag = 0.0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        vals[i] = acc[i].real();
        max_imag = std::max(max_imag, std::abs(acc[i].imag()));
    }
    return {std::move(vals), max_imag};
}

inline void check_shape(int dim, const std::array<int, 3>& shape) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("field: dim must be 1, 2 or 3");
    for (int a = 0; a < 3; ++a) {
        if (a < dim && shape[a] < 2)
            throw std::invalid_argument("field: extents must be >= 2");
        if (a >= dim && shape[a] != 1)
            throw std::invalid_argument("field: extents past dim must be 1");
    }
}

}  // namespace detail

inline ScalarField make_grid_field(std::vector<double> values, int dim,
                                   std::array<int, 3> shape) {
    detail::check_shape(dim, shape);
    std::size_t n = static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
    if (values.size() != n)
        throw std::invalid_argument("make_grid_field: values size does not match shape");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("make_grid_field: values must be finite");
    ScalarField f;
    f.dim = dim;
    f.shape = shape;
    f.values = std::move(values);
    f.provenance.generator = "grid";
    return f;
}

// Random band-limited field: c_k = (1+|k|^2)^(-beta/2) xi_k, |k|_inf <= cutoff,
// sampled on a grid of `resolution` points per axis (default 4*cutoff, which
// keeps the grid alias-free for products of two such series).
inline ScalarField sample_trig_field(int dim, int cutoff, double beta, std::uint64_t seed,
                                     int resolution = 0) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("sample_trig_field: dim must be 1, 2 or 3");
    if (cutoff < 1) throw std::invalid_argument("sample_trig_field: cutoff must be >= 1");
    if (!(beta > 0.5 * dim))
        throw std::invalid_argument("sample_trig_field: beta must exceed dim/2");
    const int res = resolution > 0 ? resolution : 4 * cutoff;
    if (res < 4 * cutoff)
        throw std::invalid_argument("sample_trig_field: resolution must be >= 4*cutoff");

    ScalarField f;
    f.dim = dim;
    for (int a = 0; a < dim; ++a) f.shape[a] = res;
    f.coeffs = detail::draw_trig_coeffs(dim, cutoff, beta, seed);
    auto [vals, max_imag] = detail::evaluate_trig(f.coeffs, f.shape);
    if (max_imag > 1e-9)
        throw std::runtime_error("sample_trig_field: spectrum lost Hermitian symmetry");
    f.values = std::move(vals);
    f.provenance.generator = "trig";
    f.provenance.seed = seed;
    f.provenance.cutoff = cutoff;
    f.provenance.beta = beta;
    return f;
}

// 1-D circle field whose bar-length counting function grows faster than any
// power: x(u) folds the circle onto (0,1], g(x) = e^{-1/x^2} sin(1/x).
inline ScalarField pathological_1d(int resolution) {
    if (resolution < 16) throw std::invalid_argument("pathological_1d: resolution must be >= 16");
    std::vector<double> vals(resolution);
    for (int i = 0; i < resolution; ++i) {
        const double u = double(i) / resolution;
        const double x = u <= 0.5 ? 2.0 * u : 2.0 * (1.0 - u);
        vals[i] = x <= 0.0 ? 0.0 : std::exp(-1.0 / (x * x)) * std::sin(1.0 / x);
    }
    ScalarField f;
    f.dim = 1;
    f.shape = {resolution, 1, 1};
    f.values = std::move(vals);
    f.provenance.generator = "oscillatory";
    return f;
}

enum class PerturbMode { shift, smooth };

// Returns g with sup|g - f| = delta (up to roundoff): either f + delta, or
// f plus a band-limited Gaussian draw rescaled to sup-norm delta. The noise
// spectrum reuses f's synthesis parameters when present.
inline ScalarField perturb(const ScalarField& f, double delta, PerturbMode mode,
                           std::uint64_t seed) {
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("perturb: delta must be finite and >= 0");
    ScalarField g = f;
    if (delta == 0.0) return g;

    if (mode == PerturbMode::shift) {
        for (double& v : g.values) v += delta;
        for (auto& fc : g.coeffs)
            if (fc.k == std::array<int, 3>{0, 0, 0}) fc.c += delta;
        return g;
    }

    const int min_extent = *std::min_element(f.shape.begin(), f.shape.begin() + f.dim);
    const int ncut = f.provenance.cutoff > 0 ? f.provenance.cutoff
                                             : std::max(1, min_extent / 4);
    const double nbeta = f.provenance.beta > 0.5 * f.dim ? f.provenance.beta
                                                         : 0.5 * f.dim + 1.5;
    const auto ncoeffs = detail::draw_trig_coeffs(f.dim, ncut, nbeta, seed);
    auto [nvals, max_imag] = detail::evaluate_trig(ncoeffs, f.shape);
    if (max_imag > 1e-9) throw std::runtime_error("perturb: noise lost Hermitian symmetry");
    double sup = 0.0;
    for (double v : nvals) sup = std::max(sup, std::abs(v));
    if (!(sup > 0.0)) throw std::runtime_error("perturb: degenerate noise draw");
    const double scale = delta / sup;
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] += scale * nvals[i];

    if (f.has_coeffs()) {
        std::map<std::array<int, 3>, std::complex<double>> merged;
        for (const auto& fc : f.coeffs) merged[fc.k] = fc.c;
        for (const auto& fc : ncoeffs) merged[fc.k] += scale * fc.c;
        g.coeffs.clear();
        g.coeffs.reserve(merged.size());
        for (const auto& [k, c] : merged) g.coeffs.push_back({k, c});
    }
    return g;
}

// Spectral Sobolev norm (sum_k (1+|k|^2)^n |c_k|^2)^(1/2).
inline double sobolev_norm(const ScalarField& f, double n) {
    if (!f.has_coeffs())
        throw std::invalid_argument("sobolev_norm: field carries no spectral coefficients");
    if (!(n >= 0.0)) throw std::invalid_argument("sobolev_norm: order must be >= 0");
    CompensatedSum s;
    for (const auto& fc : f.coeffs) {
        const double k2 =
            double(fc.k[0]) * fc.k[0] + double(fc.k[1]) * fc.k[1] + double(fc.k[2]) * fc.k[2];
        s.add(std::pow(1.0 + k2, n) * std::norm(fc.c));
    }
    return std::sqrt(s.value());
}

inline double sup_norm_diff(const ScalarField& f, const ScalarField& g) {
    if (f.dim != g.dim || f.shape != g.shape)
        throw std::invalid_argument("sup_norm_diff: fields live on different grids");
    double m = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        m = std::max(m, std::abs(f.values[i] - g.values[i]));
    return m;
}

// Structural checks; returns human-readable violations (empty = valid).
inline std::vector<std::string> validate_field(const ScalarField& f) {
    std::vector<std::string> out;
    if (f.dim < 1 || f.dim > 3) {
        out.push_back("dim outside {1,2,3}");
        return out;
    }
    for (int a = 0; a < 3; ++a) {
        if (a < f.dim && f.shape[a] < 2) out.push_back("extent below 2");
        if (a >= f.dim && f.shape[a] != 1) out.push_back("trailing extent not 1");
    }
    if (f.values.size() != f.size()) out.push_back("values size does not match shape");
    for (double v : f.values)
        if (!std::isfinite(v)) {
            out.push_back("non-finite value");
            break;
        }
    if (f.has_coeffs()) {
        std::map<std::array<int, 3>, std::complex<double>> byk;
        for (const auto& fc : f.coeffs) byk[fc.k] = fc.c;
        for (const auto& [k, c] : byk) {
            auto it = byk.find({-k[0], -k[1], -k[2]});
            if (it == byk.end()) {
                out.push_back("wavevector without mirror");
                break;
            }
            if (std::abs(it->second - std::conj(c)) > 1e-12 * std::max(1.0, std::abs(c))) {
                out.push_back("coefficients not Hermitian");
                break;
            }
        }
        auto [vals, max_imag] = detail::evaluate_trig(f.coeffs, f.shape);
        if (max_imag > 1e-9) out.push_back("series evaluation not real");
        double scale = 1.0, err = 0.0;
        for (std::size_t i = 0; i < vals.size() && i < f.values.size(); ++i) {
            scale = std::max(scale, std::abs(f.values[i]));
            err = std::max(err, std::abs(vals[i] - f.values[i]));
        }
        if (err > 1e-9 * scale) out.push_back("values disagree with coefficient evaluation");
    }
    return out;
}

}  // namespace torph
