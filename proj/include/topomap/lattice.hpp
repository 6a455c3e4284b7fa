#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace topomap {

/// Wrap an (possibly negative) coordinate into [0, L).
inline int wrap(int c, int L) {
    int r = c % L;
    return r < 0 ? r + L : r;
}

/// A qubit on an L x L torus of unit cells. Coordinates are kept reduced
/// mod L, so equality of the reduced triple is equality of qubits.
struct QubitIndex {
    int cx = 0;
    int cy = 0;
    int site = 0;

    QubitIndex() = default;
    QubitIndex(int cx_, int cy_, int site_) : cx(cx_), cy(cy_), site(site_) {}

    friend bool operator==(const QubitIndex&, const QubitIndex&) = default;
    friend auto operator<=>(const QubitIndex&, const QubitIndex&) = default;
};

struct LatticeSpec {
    int sites_per_cell = 1;
    int L = 2;
    std::vector<std::string> site_labels;  // documentation only

    LatticeSpec() = default;
    LatticeSpec(int sites, int L_) : sites_per_cell(sites), L(L_) {
        if (sites_per_cell < 1) throw std::invalid_argument("sites_per_cell must be >= 1");
        if (L < 1) throw std::invalid_argument("torus size L must be >= 1");
    }

    int num_qubits() const { return sites_per_cell * L * L; }

    QubitIndex reduce(int cx, int cy, int site) const {
        return {wrap(cx, L), wrap(cy, L), site};
    }

    /// Row-major linear index: (cy * L + cx) * sites_per_cell + site.
    int linear(const QubitIndex& q) const {
        return (wrap(q.cy, L) * L + wrap(q.cx, L)) * sites_per_cell + q.site;
    }

    QubitIndex from_linear(int idx) const {
        int site = idx % sites_per_cell;
        int cell = idx / sites_per_cell;
        return {cell % L, cell / L, site};
    }

    bool same_shape(const LatticeSpec& o) const {
        return sites_per_cell == o.sites_per_cell && L == o.L;
    }

    /// Labels are documentation; only the geometry participates in equality.
    friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) {
        return a.same_shape(b);
    }
};

}  // namespace topomap

template <>
struct std::hash<topomap::QubitIndex> {
    size_t operator()(const topomap::QubitIndex& q) const noexcept {
        uint64_t h = (uint64_t)(uint32_t)q.cx;
        h = h * 0x9e3779b97f4a7c15ull + (uint32_t)q.cy;
        h = h * 0x9e3779b97f4a7c15ull + (uint32_t)q.site;
        return (size_t)h;
    }
};
