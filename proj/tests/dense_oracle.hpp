#pragma once

// Brute-force dense-matrix model of Pauli operators on a handful of qubits.
// Used as an independent oracle for the symplectic/phase bookkeeping in the
// main library; everything here is O(4^n) and only suitable for n <= ~6.

#include <complex>
#include <stdexcept>
#include <vector>

#include "topomap/pauli.hpp"

namespace topomap::testing {

using cxd = std::complex<double>;
using DenseMatrix = std::vector<std::vector<cxd>>;

inline cxd i_pow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

/// Dense matrix of i^k X^x Z^z with qubit q mapped to bit `linear(q)` of the
/// basis-state index. Acting on |b>: Z first, then X, matching the stored
/// X-before-Z operator ordering.
inline DenseMatrix dense_matrix(const PauliOperator& p) {
    const auto& shape = p.shape();
    int n = shape.num_qubits();
    if (n > 12) throw std::invalid_argument("dense oracle limited to small systems");
    uint64_t xmask = 0, zmask = 0;
    for (const auto& q : p.x_support()) xmask |= 1ull << shape.linear(q);
    for (const auto& q : p.z_support()) zmask |= 1ull << shape.linear(q);
    size_t dim = 1ull << n;
    DenseMatrix m(dim, std::vector<cxd>(dim, cxd{0, 0}));
    cxd phase = i_pow(p.phase_exp());
    for (uint64_t b = 0; b < dim; ++b) {
        int zpar = __builtin_popcountll(zmask & b) & 1;
        m[b ^ xmask][b] = phase * (zpar ? cxd{-1, 0} : cxd{1, 0});
    }
    return m;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    size_t dim = a.size();
    DenseMatrix out(dim, std::vector<cxd>(dim, cxd{0, 0}));
    for (size_t i = 0; i < dim; ++i)
        for (size_t k = 0; k < dim; ++k) {
            if (a[i][k] == cxd{0, 0}) continue;
            for (size_t j = 0; j < dim; ++j) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

inline bool approx_equal(const DenseMatrix& a, const DenseMatrix& b, double tol = 1e-12) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j)
            if (std::abs(a[i][j] - b[i][j]) > tol) return false;
    return true;
}

inline DenseMatrix scaled(DenseMatrix m, cxd s) {
    for (auto& row : m)
        for (auto& v : row) v *= s;
    return m;
}

}  // namespace topomap::testing
