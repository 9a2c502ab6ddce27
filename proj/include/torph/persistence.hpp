#pragma once

// Superlevel-set persistence over Z/2 by column reduction with clearing.
// Cells enter by decreasing value; a pairing (creator, destroyer) becomes
// the bar (birth, death) = (creator value, destroyer value), so every bar
// has birth >= death. Unpaired cells give essential bars (value, min f).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "torph/cubical.hpp"

namespace torph {

struct DiagramPoint {
    double birth = 0.0;
    double death = 0.0;
    bool essential = false;
    double length() const { return birth - death; }
};

struct Diagram {
    int degree = 0;
    double range_min = 0.0;  // global min of the field
    double range_max = 0.0;  // global max of the field
    int essential_count = 0;
    std::vector<DiagramPoint> points;  // essential points first

    // Rank of H_degree({f >= x}) encoded by the diagram. Finite bars count
    // on (death, birth]; essential bars on (-inf, birth]. The half-open
    // convention at deaths is what makes ranks match direct computation at
    // every level, including the critical values themselves.
    int rank_at(double x) const {
        int r = 0;
        for (const auto& pt : points) {
            if (pt.essential) {
                if (x <= pt.birth) ++r;
            } else if (pt.death < x && x <= pt.birth) {
                ++r;
            }
        }
        return r;
    }
};

inline std::vector<Diagram> compute_diagrams(const FilteredComplex& K) {
    const std::size_t n = K.cells.size();

    // Filtration positions: value descending; ties by degree so faces with
    // the same value still precede cofaces whatever the input cell order.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const Cell& ca = K.cells[a];
        const Cell& cb = K.cells[b];
        if (ca.value != cb.value) return ca.value > cb.value;
        if (ca.degree != cb.degree) return ca.degree < cb.degree;
        return a < b;
    });
    std::vector<std::uint32_t> pos(n);
    for (std::uint32_t p = 0; p < n; ++p) pos[order[p]] = p;

    std::vector<char> cleared(n, 0);  // known creators: skip their columns
    std::vector<char> paired(n, 0);

    std::vector<Diagram> diagrams(K.dim + 1);
    for (int k = 0; k <= K.dim; ++k) {
        diagrams[k].degree = k;
        diagrams[k].range_min = K.min_value;
        diagrams[k].range_max = K.max_value;
    }

    std::vector<std::uint32_t> col, merged;
    for (int k = K.dim; k >= 1; --k) {
        std::unordered_map<std::uint32_t, std::uint32_t> owner;  // low position -> column cell
        std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> reduced;
        for (std::uint32_t p = 0; p < n; ++p) {
            const std::uint32_t ci = order[p];
            const Cell& cell = K.cells[ci];
            if (cell.degree != k || cleared[ci]) continue;

            col.clear();
            for (std::uint32_t fidx : cell.boundary) col.push_back(pos[fidx]);
            std::sort(col.begin(), col.end());

            while (!col.empty()) {
                auto it = owner.find(col.back());
                if (it == owner.end()) break;
                const auto& other = reduced[it->second];
                merged.clear();
                std::set_symmetric_difference(col.begin(), col.end(), other.begin(),
                                              other.end(), std::back_inserter(merged));
                col.swap(merged);
            }
            if (col.empty()) continue;  // creator in degree k; resolved as essential below

            const std::uint32_t low = col.back();
            const std::uint32_t creator = order[low];
            owner.emplace(low, ci);
            reduced.emplace(ci, col);
            cleared[creator] = 1;
            paired[creator] = 1;
            paired[ci] = 1;
            const double birth = K.cells[creator].value;
            const double death = cell.value;
            if (birth != death)
                diagrams[k - 1].points.push_back({birth, death, false});
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        if (!paired[i])
            diagrams[K.cells[i].degree].points.push_back({K.cells[i].value, K.min_value, true});

    for (auto& d : diagrams) {
        std::sort(d.points.begin(), d.points.end(),
                  [](const DiagramPoint& a, const DiagramPoint& b) {
                      if (a.essential != b.essential) return a.essential;
                      if (a.birth != b.birth) return a.birth > b.birth;
                      return a.death > b.death;
                  });
        d.essential_count =
            static_cast<int>(std::count_if(d.points.begin(), d.points.end(),
                                           [](const DiagramPoint& p) { return p.essential; }));
    }
    return diagrams;
}

// Structural checks; returns human-readable violations (empty = valid).
inline std::vector<std::string> validate_diagram(const Diagram& d) {
    std::vector<std::string> out;
    if (d.degree < 0) out.push_back("negative degree");
    if (!(d.range_min <= d.range_max)) out.push_back("empty value range");
    int ess = 0;
    for (const auto& pt : d.points) {
        if (!std::isfinite(pt.birth) || !std::isfinite(pt.death)) {
            out.push_back("non-finite point");
            break;
        }
        if (pt.birth < pt.death) {
            out.push_back("death exceeds birth");
            break;
        }
        if (pt.birth > d.range_max || pt.death < d.range_min) {
            out.push_back("point outside value range");
            break;
        }
        if (pt.essential) {
            ++ess;
            if (pt.death != d.range_min) {
                out.push_back("essential bar not anchored at range min");
                break;
            }
        }
    }
    if (ess != d.essential_count) out.push_back("essential count mismatch");
    return out;
}

}  // namespace torph
