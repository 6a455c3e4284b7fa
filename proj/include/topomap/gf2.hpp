#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "topomap/pauli.hpp"

namespace topomap {

/// Dense bit vector over GF(2).
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(int nbits) : nbits_(nbits), w_((nbits + 63) / 64, 0) {}

    int size() const { return nbits_; }
    bool get(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(int i, bool v = true) {
        uint64_t m = 1ull << (i & 63);
        if (v) w_[i >> 6] |= m;
        else w_[i >> 6] &= ~m;
    }
    void flip(int i) { w_[i >> 6] ^= 1ull << (i & 63); }

    BitVec& operator^=(const BitVec& o) {
        for (size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
    friend bool operator==(const BitVec&, const BitVec&) = default;

    bool any() const {
        for (uint64_t x : w_)
            if (x) return true;
        return false;
    }
    int popcount() const;
    /// Index of the lowest set bit, or -1.
    int lowest_set() const;
    /// Parity of AND with another vector of the same length.
    int and_parity(const BitVec& o) const;

    const std::vector<uint64_t>& words() const { return w_; }

  private:
    int nbits_ = 0;
    std::vector<uint64_t> w_;
};

/// Symplectic vector layout: bits [0, N) = X part, [N, 2N) = Z part, qubits
/// in row-major linear order.
BitVec to_symplectic(const PauliOperator& p);
PauliOperator from_symplectic(const LatticeSpec& shape, const BitVec& v);
/// Symplectic form <u, v> over GF(2); u, v of length 2N.
int symplectic_product(const BitVec& u, const BitVec& v);

/// Incremental GF(2) row space with membership tests and decompositions.
/// Pivot columns are chosen in fixed increasing bit order, so results do not
/// depend on anything but the generator insertion order.
class Gf2Span {
  public:
    explicit Gf2Span(int nbits, bool track_combos = false);

    /// Returns true if the row increased the rank.
    bool add(const BitVec& v);
    int rank() const { return (int)rows_.size(); }
    int nbits() const { return nbits_; }
    int num_generators() const { return ngen_; }

    /// Reduced rows spanning the space (one unique pivot each).
    const std::vector<BitVec>& rows() const { return rows_; }

    bool contains(const BitVec& v) const;
    /// Reduce v against the span; the remainder is zero iff v is contained.
    BitVec reduce(BitVec v) const;
    /// Combination of the *generators fed to add()* reproducing v, if any.
    /// Requires track_combos.
    std::optional<BitVec> decompose(const BitVec& v) const;

  private:
    int nbits_;
    bool track_;
    int ngen_ = 0;
    std::vector<BitVec> rows_;
    std::vector<BitVec> combos_;
    std::vector<int> pivot_row_;  // bit index -> row, or -1
};

int gf2_rank(const std::vector<BitVec>& rows);

/// Basis of {y in GF(2)^ncols : row . y = 0 for every row}.
std::vector<BitVec> gf2_nullspace(const std::vector<BitVec>& rows, int ncols);

/// Result of an in-span query: the generator subset multiplying to P up to
/// the reported +-1 sign.
struct SpanDecomposition {
    std::vector<int> generator_indices;
    int sign = 1;
};

/// A generating set of Pauli operators with its GF(2) span, supporting
/// membership with sign tracking.
class PauliSpan {
  public:
    PauliSpan(LatticeSpec shape, std::vector<PauliOperator> generators);

    const std::vector<PauliOperator>& generators() const { return gens_; }
    const LatticeSpec& shape() const { return shape_; }
    int rank() const { return span_.rank(); }

    bool contains(const PauliOperator& p) const { return span_.contains(to_symplectic(p)); }
    bool contains_vec(const BitVec& v) const { return span_.contains(v); }
    std::optional<SpanDecomposition> in_span(const PauliOperator& p) const;

    const Gf2Span& span() const { return span_; }

  private:
    LatticeSpec shape_;
    std::vector<PauliOperator> gens_;
    Gf2Span span_;
};

struct SymplecticBasis {
    /// Anticommuting pairs (P_i, Q_i); pairs commute across indices.
    std::vector<std::pair<PauliOperator, PauliOperator>> hyperbolic;
    /// Basis of the center of the span.
    std::vector<PauliOperator> center;
};

SymplecticBasis symplectic_gram_schmidt(const LatticeSpec& shape,
                                        const std::vector<PauliOperator>& gens);

}  // namespace topomap
