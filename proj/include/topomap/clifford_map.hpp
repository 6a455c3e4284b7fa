#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "topomap/code.hpp"
#include "topomap/gf2.hpp"
#include "topomap/pauli.hpp"

namespace topomap {

/// Image of a single-qubit generator under a translation-invariant local
/// Clifford map: a Pauli template on the target lattice, expressed as signed
/// cell offsets from the source qubit's cell. Stored in the X-before-Z form
/// of PauliOperator; entries are (dx, dy, target_site).
struct ImageTemplate {
    std::vector<std::array<int, 3>> xs, zs;
    int phase_exp = 0;

    /// Realize the template on a torus, anchored at cell (cx, cy).
    PauliOperator instantiate(const LatticeSpec& target, int cx, int cy) const;
    /// Smallest cell-window side length covering the offsets (0 for empty).
    int offset_range() const;

    friend bool operator==(const ImageTemplate&, const ImageTemplate&) = default;
};

/// Single-qubit stabilizer template used for ancilla padding declarations.
struct SiteLetter {
    int site = 0;
    char letter = 'Z';

    friend bool operator==(const SiteLetter&, const SiteLetter&) = default;
};

/// A translation-invariant local Clifford map between two cellular lattices,
/// given by the images of the per-cell X and Z generators.
struct LocalCliffordMap {
    std::string source_name, target_name;  // documentation only
    int source_sites = 0;
    int target_sites = 0;
    /// Indexed [2 * site + (letter == 'Z')].
    std::vector<ImageTemplate> images;
    std::vector<SiteLetter> ancilla_in, ancilla_out;
    /// Locality bound: every image has range <= v + 1.
    int v = 0;

    const ImageTemplate& image(int site, char letter) const;

    static LocalCliffordMap identity(int sites);
};

/// Conjugation action on a source-lattice operator; the result lives on the
/// target lattice with the same torus size. Exact phases.
PauliOperator apply(const LocalCliffordMap& map, const PauliOperator& p);

struct MapReport {
    bool symplectic_ok = false;
    bool group_map_ok = false;
    int v = 0;
    std::vector<std::string> failures;
};

/// Checks commutation preservation of all generator images (including
/// translated pairs) and symplectic invertibility on an L-torus.
MapReport verify_symplectic(const LocalCliffordMap& map, int L);

/// Checks that the map sends the source group (stabilizers plus ancilla_in)
/// onto the target group (stabilizers plus ancilla_out) on the L-torus,
/// including +1 sign conventions. Implies verify_symplectic.
MapReport verify_code_map(const LocalCliffordMap& map, const CodeDef& source,
                          const CodeDef& target, int L);

/// Deterministic search for a local Clifford map with image offsets within
/// [-radius, radius] sending the source stabilizer group into the target
/// group. Linear (group-membership) constraints are solved first; the
/// quadratic symplectic conditions are enforced by backtracking over the
/// per-site generator images with constraint propagation.
std::optional<LocalCliffordMap> find_map(const CodeDef& source, const CodeDef& target,
                                         int radius);

/// Per-torus-size instantiation carrying the cached inverse and the syndrome
/// transport data between two codes related by a verified map.
class MapInstance {
  public:
    MapInstance(LocalCliffordMap map, CodeDef source, CodeDef target);

    const LocalCliffordMap& map() const { return map_; }
    const CodeDef& source() const { return source_; }
    const CodeDef& target() const { return target_; }

    /// Preimage under the map; exact inverse of apply including sign.
    PauliOperator pull_back(const PauliOperator& target_op) const;

    /// Transport a source-stabilizer syndrome (outcome bits aligned with
    /// source.stabilizer_instances()) to target generator outcomes.
    std::vector<uint8_t> push_syndrome(const std::vector<uint8_t>& source_syndrome) const;

    /// Any source error with the given syndrome (deterministic GF(2) solve).
    PauliOperator representative_error(const std::vector<uint8_t>& syndrome) const;

  private:
    LocalCliffordMap map_;
    CodeDef source_, target_;
    Gf2Span forward_;                    // columns: images of source basis ops
    std::vector<PauliOperator> tgt_stab_;
    Gf2Span syndrome_solver_;            // for representative_error
    std::vector<BitVec> syndrome_rows_;  // source stabilizer functionals
};

/// Plain-text serialization (one line per site/letter image).
std::string format_map(const LocalCliffordMap& map);
LocalCliffordMap parse_map(const std::string& text);

}  // namespace topomap
