#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "topomap/lattice.hpp"

namespace topomap {

/// A Pauli operator on a torus lattice, stored as i^phase_exp * X^xs * Z^zs
/// with sorted, duplicate-free supports. A qubit present in both supports is
/// a sigma_y factor up to the tracked phase (Y = i X Z). The representation
/// is canonical: two operators are equal iff their fields are equal.
class PauliOperator {
  public:
    PauliOperator() = default;
    explicit PauliOperator(LatticeSpec shape) : shape_(std::move(shape)) {}
    PauliOperator(LatticeSpec shape, std::vector<QubitIndex> xs, std::vector<QubitIndex> zs,
                  int phase_exp = 0);

    static PauliOperator identity(const LatticeSpec& shape) { return PauliOperator(shape); }
    /// Single-qubit factor, letter in {'X','Y','Z'} (phase convention: the
    /// plain Hermitian sigma letter).
    static PauliOperator single(const LatticeSpec& shape, const QubitIndex& q, char letter);

    const LatticeSpec& shape() const { return shape_; }
    const std::vector<QubitIndex>& x_support() const { return xs_; }
    const std::vector<QubitIndex>& z_support() const { return zs_; }
    /// Exponent k of the internal phase i^k in the X-before-Z ordered form.
    int phase_exp() const { return phase_; }

    bool is_identity() const { return xs_.empty() && zs_.empty() && phase_ == 0; }
    bool support_empty() const { return xs_.empty() && zs_.empty(); }
    /// Qubits acted on nontrivially (union of the supports).
    std::vector<QubitIndex> support() const;
    int weight() const;

    /// Phase exponent relative to the product of plain sigma letters, i.e.
    /// the "+1/+i/-1/-i" prefix of the textual form.
    int display_phase_exp() const;

    PauliOperator translated(int dx, int dy) const;
    /// Strip the phase (force +1 in the display convention).
    PauliOperator unsigned_part() const;

    friend bool operator==(const PauliOperator&, const PauliOperator&) = default;

    friend PauliOperator operator*(const PauliOperator& p, const PauliOperator& q);

  private:
    LatticeSpec shape_{1, 2};
    std::vector<QubitIndex> xs_;
    std::vector<QubitIndex> zs_;
    int phase_ = 0;  // mod 4
};

/// +1 if P and Q commute, -1 if they anticommute.
int commute_sign(const PauliOperator& p, const PauliOperator& q);

/// Side length, in unit cells, of the smallest axis-aligned square window on
/// the torus containing the support. Identity -> 0.
int range_of(const PauliOperator& p);

/// `phase; x,y,s:P x,y,s:P ...`, e.g. `+1; 0,0,1:X 0,1,1:Z`. Identity prints
/// as `+1;`.
std::string format_operator(const PauliOperator& p);
PauliOperator parse_operator(const LatticeSpec& shape, const std::string& line);

std::ostream& operator<<(std::ostream& os, const PauliOperator& p);

}  // namespace topomap
