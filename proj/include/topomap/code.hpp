#pragma once

#include <string>
#include <vector>

#include "topomap/gf2.hpp"
#include "topomap/pauli.hpp"

namespace topomap {

/// A translation-invariant code on an L x L torus: generator templates
/// anchored at cell (0,0), instantiated at every cell.
struct CodeDef {
    enum class Kind { stabilizer, subsystem };

    std::string name;
    LatticeSpec lattice;
    std::vector<PauliOperator> stabilizer_templates;
    Kind kind = Kind::stabilizer;
    std::vector<PauliOperator> gauge_templates;  // subsystem only

    int num_qubits() const { return lattice.num_qubits(); }

    std::vector<PauliOperator> stabilizer_instances() const;
    std::vector<PauliOperator> gauge_instances() const;
};

/// Kitaev's code: 2 qubits per cell (site 0 = east horizontal edge, site 1 =
/// north vertical edge); stars A_s are Z-type, plaquettes B_p X-type.
CodeDef build_ktc(int L);

/// n disjoint layers of KTC; layer l occupies sites 2l, 2l+1.
CodeDef build_ktc_stack(int n, int L);

/// Square-octagon (4.8.8) color code. Cell = one A diamond (sites 0-3:
/// top,right,bottom,left) plus one B diamond (sites 4-7), tilted so the
/// A/B chessboard is translation invariant. Per cell: X and Z stabilizers
/// on 2 squares and 2 octagons.
CodeDef build_tcc_48(int L);

/// Subsystem color code on the vertex-inflated 4.8.8 lattice: 3 qubits per
/// original vertex (24 per cell), one two-qubit gauge template per edge.
/// The three edges at every qubit carry three distinct Pauli types; solid
/// (sigma_z sigma_z) edges form a perfect matching of the qubits.
CodeDef build_tscc_48(int L);

/// Generating templates of the center of the gauge group, localized
/// greedily over growing windows, signs fixed to +1.
std::vector<PauliOperator> compute_stabilizer_from_gauge(const CodeDef& code);

/// Stabilizer code generated by the subsystem code's stabilizer together
/// with its solid-edge (sigma_z sigma_z) gauge subgroup.
CodeDef build_intermediate_sz(const CodeDef& tscc);

/// Two KTC copies interleaved on the tilted diamond lattice of the TCC:
/// each cell holds two lattice vertices (A and B) and each vertex carries
/// one 2-qubit cell of each copy (8 qubits per cell). Used as the mapping
/// target for the color-code families.
CodeDef build_ktc_stack_diamond(int L);

/// Coordinate bridge between the diamond-frame cell indexing and the
/// underlying square-lattice stack coordinates.
struct DiamondFrame {
    int L;  // frame torus size; the stack torus is spanned by L(1,1), L(1,-1)

    /// stack cell (i,j), stack site in [0,4) -> frame qubit.
    QubitIndex to_frame(int i, int j, int stack_site) const;
    /// frame qubit -> (i, j, stack_site), with (i, j) reduced to the
    /// canonical fundamental domain representative.
    void to_stack(const QubitIndex& q, int& i, int& j, int& stack_site) const;
    /// Shortest torus L1 distance between stack cells under the tilted
    /// periods (L, L) and (L, -L).
    int stack_distance(int i0, int j0, int i1, int j1) const;
};

struct CentralizerReport {
    bool pass = false;
    int window = 0;
    int basis_dim = 0;  // dimension of the windowed centralizer
    std::vector<PauliOperator> counterexamples;
};

/// Checks that every Pauli supported in a window x window region commuting
/// with all stabilizer instances lies in the stabilizer span (stabilizer
/// codes) or the gauge span (subsystem codes).
CentralizerReport local_centralizer_check(const CodeDef& code, int window);

/// Registry used by the CLI: ktc, ktc-stack:n, tcc48, tscc48, tscc48-sz.
CodeDef build_code_by_name(const std::string& name, int L);
std::vector<std::string> registered_code_names();

}  // namespace topomap
