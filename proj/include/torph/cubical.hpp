#pragma once

// Periodic cubical complexes on the torus grid. A cell is a base vertex
// plus a subset S of axes; its value is the minimum of f over its 2^|S|
// corners, so sublevel sets of -value (= superlevel sets of f) are closed
// subcomplexes at every threshold.

#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "torph/field.hpp"
#include "torph/step_curve.hpp"

namespace torph {

struct Cell {
    std::uint8_t degree = 0;
    double value = 0.0;
    std::vector<std::uint32_t> boundary;  // face indices, even multiplicities cancelled
};

struct FilteredComplex {
    int dim = 0;
    std::array<int, 3> shape{1, 1, 1};
    std::vector<Cell> cells;             // vertices first, then by (degree, axis mask)
    std::array<std::size_t, 4> count{};  // cells per degree
    double min_value = 0.0;
    double max_value = 0.0;
};

inline FilteredComplex build_complex(const ScalarField& f) {
    detail::check_shape(f.dim, f.shape);
    if (f.values.size() != f.size())
        throw std::invalid_argument("build_complex: field values do not match its shape");

    const int d = f.dim;
    const std::size_t nvert = f.size();
    const unsigned nmask = 1u << d;

    // axis subsets ordered by (size, mask): vertices first, top cell last
    std::vector<unsigned> subsets(nmask);
    std::iota(subsets.begin(), subsets.end(), 0u);
    std::sort(subsets.begin(), subsets.end(), [](unsigned a, unsigned b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    std::vector<std::size_t> pos_of(nmask);
    for (unsigned p = 0; p < nmask; ++p) pos_of[subsets[p]] = p;

    FilteredComplex K;
    K.dim = d;
    K.shape = f.shape;
    K.cells.resize(nvert * nmask);
    K.min_value = f.min_value();
    K.max_value = f.max_value();

    const int m1 = f.shape[1], m2 = f.shape[2];
    for (unsigned p = 0; p < nmask; ++p) {
        const unsigned mask = subsets[p];
        const int deg = std::popcount(mask);
        K.count[deg] += nvert;
        std::array<int, 3> axes{};
        int na = 0;
        for (int a = 0; a < d; ++a)
            if (mask & (1u << a)) axes[na++] = a;

        for (std::size_t v = 0; v < nvert; ++v) {
            Cell& cell = K.cells[p * nvert + v];
            cell.degree = static_cast<std::uint8_t>(deg);

            std::array<int, 3> j{};
            j[2] = static_cast<int>(v % m2);
            j[1] = static_cast<int>((v / m2) % m1);
            j[0] = static_cast<int>(v / (static_cast<std::size_t>(m1) * m2));

            double val = f.values[v];
            for (unsigned corner = 1; corner < (1u << na); ++corner) {
                std::array<int, 3> jc = j;
                for (int t = 0; t < na; ++t)
                    if (corner & (1u << t)) ++jc[axes[t]];
                val = std::min(val, f.values[f.flat(jc)]);
            }
            cell.value = val;

            for (int t = 0; t < na; ++t) {
                const int a = axes[t];
                const std::size_t fp = pos_of[mask ^ (1u << a)];
                std::array<int, 3> js = j;
                ++js[a];
                const std::uint32_t f0 = static_cast<std::uint32_t>(fp * nvert + v);
                const std::uint32_t f1 = static_cast<std::uint32_t>(fp * nvert + f.flat(js));
                if (f0 == f1) continue;  // wrapped onto itself: cancels mod 2
                cell.boundary.push_back(f0);
                cell.boundary.push_back(f1);
            }
        }
    }
    return K;
}

// Euler characteristic of {f >= x} as a function of x, from the signed
// cell census alone. Constant 0 below min (whole torus) and above max.
inline StepCurve euler_curve_cells(const FilteredComplex& K) {
    std::vector<std::pair<double, int>> ev;
    ev.reserve(K.cells.size());
    for (const auto& c : K.cells) ev.emplace_back(c.value, c.degree % 2 ? -1 : 1);
    std::sort(ev.begin(), ev.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // distinct values ascending with signed suffix counts
    std::vector<double> distinct;
    std::vector<long long> suffix;
    long long run = 0;
    for (std::size_t i = ev.size(); i-- > 0;) {
        run += ev[i].second;
        if (distinct.empty() || distinct.back() != ev[i].first) {
            distinct.push_back(ev[i].first);
            suffix.push_back(run);
        } else {
            suffix.back() = run;
        }
    }
    std::reverse(distinct.begin(), distinct.end());
    std::reverse(suffix.begin(), suffix.end());

    if (distinct.size() < 2) return {};
    std::vector<double> vals(distinct.size() - 1);
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
        vals[i] = static_cast<double>(suffix[i + 1]);
    return make_step_curve(distinct, vals);
}

namespace detail {

// Rank over GF(2) of bit-packed rows.
inline int gf2_rank(std::vector<std::vector<std::uint64_t>> rows, std::size_t ncols) {
    const std::size_t words = (ncols + 63) / 64;
    std::size_t r = 0;
    for (std::size_t w = 0; w < words && r < rows.size(); ++w) {
        for (int b = 0; b < 64 && r < rows.size(); ++b) {
            const std::uint64_t bit = 1ull << b;
            std::size_t piv = r;
            while (piv < rows.size() && !(rows[piv][w] & bit)) ++piv;
            if (piv == rows.size()) continue;
            std::swap(rows[piv], rows[r]);
            for (std::size_t i = r + 1; i < rows.size(); ++i)
                if (rows[i][w] & bit)
                    for (std::size_t t = w; t < rows[i].size(); ++t) rows[i][t] ^= rows[r][t];
            ++r;
        }
    }
    return static_cast<int>(r);
}

}  // namespace detail

// Rank of H_k({f >= x}; Z/2) by direct elimination: dim C_k minus the ranks
// of the two incident boundary maps. Exponential in nothing, cubic in cell
// counts; meant as an oracle for small grids.
inline int betti_at_level_bruteforce(const FilteredComplex& K, int k, double x) {
    if (k < 0 || k > K.dim)
        throw std::invalid_argument("betti_at_level_bruteforce: degree outside [0, dim]");

    const std::uint32_t absent = 0xffffffffu;
    std::vector<std::uint32_t> pos(K.cells.size(), absent);
    std::array<std::size_t, 4> ncells{};  // per degree, within the superlevel complex
    for (std::size_t i = 0; i < K.cells.size(); ++i) {
        const auto& c = K.cells[i];
        if (c.value >= x) pos[i] = static_cast<std::uint32_t>(ncells[c.degree]++);
    }

    auto boundary_rank = [&](int deg) {
        if (deg < 1 || deg > K.dim) return 0;
        const std::size_t ncols = ncells[deg - 1];
        const std::size_t words = (ncols + 63) / 64;
        std::vector<std::vector<std::uint64_t>> rows;
        rows.reserve(ncells[deg]);
        for (std::size_t i = 0; i < K.cells.size(); ++i) {
            const auto& c = K.cells[i];
            if (c.degree != deg || pos[i] == absent) continue;
            std::vector<std::uint64_t> row(words, 0);
            for (std::uint32_t fidx : c.boundary) {
                const std::uint32_t fp = pos[fidx];
                row[fp / 64] ^= 1ull << (fp % 64);
            }
            rows.push_back(std::move(row));
        }
        return detail::gf2_rank(std::move(rows), ncols);
    };

    return static_cast<int>(ncells[k]) - boundary_rank(k) - boundary_rank(k + 1);
}

}  // namespace torph
