#include "topomap/code.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace topomap {

namespace {

std::vector<PauliOperator> all_translates(const LatticeSpec& lat,
                                          const std::vector<PauliOperator>& templates) {
    std::vector<PauliOperator> out;
    out.reserve(templates.size() * lat.L * lat.L);
    for (int cy = 0; cy < lat.L; ++cy)
        for (int cx = 0; cx < lat.L; ++cx)
            for (const auto& t : templates) out.push_back(t.translated(cx, cy));
    return out;
}

PauliOperator from_sites(const LatticeSpec& lat, char letter,
                         const std::vector<QubitIndex>& sites) {
    std::vector<QubitIndex> reduced;
    reduced.reserve(sites.size());
    for (const auto& q : sites) reduced.push_back(lat.reduce(q.cx, q.cy, q.site));
    if (letter == 'X') return PauliOperator(lat, reduced, {}, 0);
    if (letter == 'Z') return PauliOperator(lat, {}, reduced, 0);
    throw std::invalid_argument("from_sites: letter");
}

}  // namespace

std::vector<PauliOperator> CodeDef::stabilizer_instances() const {
    return all_translates(lattice, stabilizer_templates);
}

std::vector<PauliOperator> CodeDef::gauge_instances() const {
    return all_translates(lattice, gauge_templates);
}

CodeDef build_ktc(int L) {
    if (L < 2) throw std::invalid_argument("build_ktc: L must be >= 2");
    LatticeSpec lat(2, L);
    lat.site_labels = {"h-edge", "v-edge"};
    // site 0 = east horizontal edge of the cell's site, site 1 = north vertical edge
    PauliOperator star = from_sites(lat, 'Z', {{0, 0, 0}, {-1, 0, 0}, {0, 0, 1}, {0, -1, 1}});
    PauliOperator plaq = from_sites(lat, 'X', {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}});
    return CodeDef{"ktc", lat, {star, plaq}};
}

CodeDef build_ktc_stack(int n, int L) {
    if (n < 1) throw std::invalid_argument("build_ktc_stack: n must be >= 1");
    if (L < 2) throw std::invalid_argument("build_ktc_stack: L must be >= 2");
    LatticeSpec lat(2 * n, L);
    std::vector<PauliOperator> templates;
    for (int layer = 0; layer < n; ++layer) {
        int h = 2 * layer, v = 2 * layer + 1;
        templates.push_back(
            from_sites(lat, 'Z', {{0, 0, h}, {-1, 0, h}, {0, 0, v}, {0, -1, v}}));
        templates.push_back(
            from_sites(lat, 'X', {{0, 0, h}, {0, 1, h}, {0, 0, v}, {1, 0, v}}));
    }
    std::string name = n == 1 ? "ktc" : ("ktc-stack:" + std::to_string(n));
    return CodeDef{name, lat, templates};
}

// Site layout for the 4.8.8 cell: sites 0-3 = A diamond (top,right,bottom,
// left), 4-7 = B diamond. The cell basis is tilted: in raw diamond
// coordinates the A diamond of cell (cx,cy) sits at (cx+cy, cx-cy) and the
// B diamond one step east of it, so translations preserve the chessboard.
CodeDef build_tcc_48(int L) {
    if (L < 2) throw std::invalid_argument("build_tcc_48: L must be >= 2");
    LatticeSpec lat(8, L);
    lat.site_labels = {"A.t", "A.r", "A.b", "A.l", "B.t", "B.r", "B.b", "B.l"};
    std::vector<QubitIndex> sqA = {{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}};
    std::vector<QubitIndex> sqB = {{0, 0, 4}, {0, 0, 5}, {0, 0, 6}, {0, 0, 7}};
    // Octagon northeast of the A diamond: A.r A.t, B.l B.t (same cell),
    // B.b B.r of the cell to the south, A.b A.l of the cell to the east.
    std::vector<QubitIndex> octA = {{0, 0, 1}, {0, 0, 0},  {0, 0, 7},  {0, 0, 4},
                                    {0, -1, 6}, {0, -1, 5}, {1, 0, 2},  {1, 0, 3}};
    // Octagon northeast of the B diamond.
    std::vector<QubitIndex> octB = {{0, 0, 5}, {0, 0, 4},  {1, 1, 3},  {1, 1, 0},
                                    {1, 0, 2}, {1, 0, 1},  {1, 0, 6},  {1, 0, 7}};
    std::vector<PauliOperator> templates;
    for (auto* face : {&sqA, &sqB, &octA, &octB}) {
        templates.push_back(from_sites(lat, 'X', *face));
        templates.push_back(from_sites(lat, 'Z', *face));
    }
    return CodeDef{"tcc48", lat, templates};
}

namespace {

// Inflated 4.8.8 lattice. Original vertex v in [0,8) (A: t,r,b,l = 0..3;
// B: 4..7), corner c in [0,3): c faces the vertex's X side edge (c=0), its
// Y side edge (c=1), or its Z inter-diamond edge (c=2).
inline int tscc_site(int v, int c) { return 3 * v + c; }

struct GaugeEdge {
    char letter;
    QubitIndex a, b;
};

std::vector<GaugeEdge> tscc_gauge_edges() {
    std::vector<GaugeEdge> edges;
    auto add = [&edges](char letter, QubitIndex a, QubitIndex b) {
        edges.push_back({letter, a, b});
    };
    // Link edges inflating the diamond sides. The label of a side edge is
    // the chessboard color of the octagon across from it, so the X/Y roles
    // swap between the two diamonds of the cell.
    for (int d = 0; d < 2; ++d) {
        char ne = d == 0 ? 'X' : 'Y';  // t-r and b-l sides
        char se = d == 0 ? 'Y' : 'X';  // r-b and l-t sides
        int t = 4 * d + 0, r = 4 * d + 1, b = 4 * d + 2, l = 4 * d + 3;
        add(ne, {0, 0, tscc_site(t, 0)}, {0, 0, tscc_site(r, 0)});
        add(ne, {0, 0, tscc_site(b, 0)}, {0, 0, tscc_site(l, 0)});
        add(se, {0, 0, tscc_site(r, 1)}, {0, 0, tscc_site(b, 1)});
        add(se, {0, 0, tscc_site(l, 1)}, {0, 0, tscc_site(t, 1)});
    }
    // Link edges inflating the inter-diamond edges: solid, Z.
    add('Z', {0, 0, tscc_site(1, 2)}, {0, 0, tscc_site(7, 2)});    // A.r - B.l
    add('Z', {0, 0, tscc_site(3, 2)}, {-1, -1, tscc_site(5, 2)});  // A.l - B.r
    add('Z', {0, 0, tscc_site(0, 2)}, {0, -1, tscc_site(6, 2)});   // A.t - B.b
    add('Z', {0, 0, tscc_site(2, 2)}, {-1, 0, tscc_site(4, 2)});   // A.b - B.t
    // Triangle-internal edges: the edge between corners c and c' carries the
    // label of the third corner's link edge.
    for (int v = 0; v < 8; ++v) {
        // complementary to the corner's link-edge labels, which swap X/Y
        // between the two diamonds
        char c02 = v < 4 ? 'Y' : 'X';
        char c12 = v < 4 ? 'X' : 'Y';
        add('Z', {0, 0, tscc_site(v, 0)}, {0, 0, tscc_site(v, 1)});
        add(c02, {0, 0, tscc_site(v, 0)}, {0, 0, tscc_site(v, 2)});
        add(c12, {0, 0, tscc_site(v, 1)}, {0, 0, tscc_site(v, 2)});
    }
    return edges;
}

}  // namespace

CodeDef build_tscc_48(int L) {
    if (L < 2) throw std::invalid_argument("build_tscc_48: L must be >= 2");
    LatticeSpec lat(24, L);
    std::vector<PauliOperator> gauge;
    for (const auto& e : tscc_gauge_edges()) {
        PauliOperator g = PauliOperator::single(lat, lat.reduce(e.a.cx, e.a.cy, e.a.site), e.letter) *
                          PauliOperator::single(lat, lat.reduce(e.b.cx, e.b.cy, e.b.site), e.letter);
        gauge.push_back(g.unsigned_part());
    }
    CodeDef code{"tscc48", lat, {}, CodeDef::Kind::subsystem, gauge};
    // Construction self-check: every qubit must touch exactly three gauge
    // edges with pairwise distinct Pauli types.
    std::vector<std::array<int, 3>> counts(lat.num_qubits(), {0, 0, 0});
    for (const auto& g : code.gauge_instances()) {
        for (const auto& q : g.x_support()) {
            bool y = std::binary_search(g.z_support().begin(), g.z_support().end(), q);
            counts[lat.linear(q)][y ? 1 : 0]++;
        }
        for (const auto& q : g.z_support())
            if (!std::binary_search(g.x_support().begin(), g.x_support().end(), q))
                counts[lat.linear(q)][2]++;
    }
    for (const auto& c : counts)
        if (c[0] != 1 || c[1] != 1 || c[2] != 1)
            throw std::runtime_error("build_tscc_48: edge labels violate the distinct-type rule");
    code.stabilizer_templates = compute_stabilizer_from_gauge(code);
    return code;
}

std::vector<PauliOperator> compute_stabilizer_from_gauge(const CodeDef& code) {
    const LatticeSpec& lat = code.lattice;
    int n2 = 2 * lat.num_qubits();
    auto gauge_inst = code.gauge_instances();
    std::vector<BitVec> gvecs;
    gvecs.reserve(gauge_inst.size());
    for (const auto& g : gauge_inst) gvecs.push_back(to_symplectic(g));

    Gf2Span gspan(n2);
    std::vector<BitVec> gbasis;
    for (const auto& v : gvecs)
        if (gspan.add(v)) gbasis.push_back(v);

    // Center of the gauge span: combinations of the basis commuting with
    // every gauge instance.
    int r = (int)gbasis.size();
    std::vector<BitVec> constraint_rows;
    constraint_rows.reserve(gvecs.size());
    for (const auto& g : gvecs) {
        BitVec row(r);
        for (int b = 0; b < r; ++b)
            if (symplectic_product(gbasis[b], g)) row.set(b);
        constraint_rows.push_back(std::move(row));
    }
    std::vector<BitVec> center_combos = gf2_nullspace(constraint_rows, r);
    std::vector<BitVec> center;
    center.reserve(center_combos.size());
    for (const auto& y : center_combos) {
        BitVec x(n2);
        for (int b = 0; b < r; ++b)
            if (y.get(b)) x ^= gbasis[b];
        if (x.any()) center.push_back(std::move(x));
    }
    int kc = (int)center.size();

    // Greedy localization over growing windows, smallest range first.
    std::vector<PauliOperator> templates;
    Gf2Span generated(n2);
    int generated_rank = 0;
    int w_max = std::max(2, lat.L - 1);
    for (int w = 1; w <= w_max; ++w) {
        // combos of the center basis supported inside the w x w window
        BitVec mask(n2);
        for (int cy = 0; cy < w; ++cy)
            for (int cx = 0; cx < w; ++cx)
                for (int s = 0; s < lat.sites_per_cell; ++s) {
                    int li = lat.linear({cx, cy, s});
                    mask.set(li);
                    mask.set(lat.num_qubits() + li);
                }
        std::vector<BitVec> outside_rows;
        for (int bit = 0; bit < n2; ++bit) {
            if (mask.get(bit)) continue;
            BitVec row(kc);
            bool nonzero = false;
            for (int c = 0; c < kc; ++c)
                if (center[c].get(bit)) {
                    row.set(c);
                    nonzero = true;
                }
            if (nonzero) outside_rows.push_back(std::move(row));
        }
        bool grew = false;
        for (const auto& y : gf2_nullspace(outside_rows, kc)) {
            BitVec x(n2);
            for (int c = 0; c < kc; ++c)
                if (y.get(c)) x ^= center[c];
            if (!x.any() || generated.contains(x)) continue;
            PauliOperator t = from_symplectic(lat, x);
            templates.push_back(t);
            for (int cy = 0; cy < lat.L; ++cy)
                for (int cx = 0; cx < lat.L; ++cx) generated.add(to_symplectic(t.translated(cx, cy)));
            grew = true;
        }
        if (!grew && !templates.empty() && generated.rank() == generated_rank && w >= 2) break;
        generated_rank = generated.rank();
    }
    return templates;
}

CodeDef build_intermediate_sz(const CodeDef& tscc) {
    if (tscc.kind != CodeDef::Kind::subsystem)
        throw std::invalid_argument("build_intermediate_sz: input must be a subsystem code");
    std::vector<PauliOperator> templates = tscc.stabilizer_templates;
    for (const auto& g : tscc.gauge_templates)
        if (g.x_support().empty() && g.z_support().size() == 2) templates.push_back(g);
    return CodeDef{"tscc48-sz", tscc.lattice, templates};
}

QubitIndex DiamondFrame::to_frame(int i, int j, int stack_site) const {
    int par = wrap(i + j, 2);
    int cx, cy, slot;
    if (par == 0) {
        cx = (i + j) / 2;
        cy = (i - j) / 2;
        slot = 0;
    } else {
        cx = (i - 1 + j) / 2;
        cy = (i - 1 - j) / 2;
        slot = 1;
    }
    return {wrap(cx, L), wrap(cy, L), slot * 4 + stack_site};
}

void DiamondFrame::to_stack(const QubitIndex& q, int& i, int& j, int& stack_site) const {
    int slot = q.site / 4;
    stack_site = q.site % 4;
    i = q.cx + q.cy + (slot ? 1 : 0);
    j = q.cx - q.cy;
}

int DiamondFrame::stack_distance(int i0, int j0, int i1, int j1) const {
    int di = i1 - i0, dj = j1 - j0;
    int best = -1;
    for (int n1 = -2; n1 <= 2; ++n1)
        for (int n2 = -2; n2 <= 2; ++n2) {
            int d = std::abs(di + (n1 + n2) * L) + std::abs(dj + (n1 - n2) * L);
            if (best < 0 || d < best) best = d;
        }
    return best;
}

CodeDef build_ktc_stack_diamond(int L) {
    if (L < 2) throw std::invalid_argument("build_ktc_stack_diamond: L must be >= 2");
    // Two KTC copies interleaved on the tilted (diamond) lattice: every cell
    // holds two lattice vertices, A at the cell origin and B at its diagonal
    // midpoint, and each vertex carries one 2-qubit cell of each copy. Sites:
    // A edges (e toward B, n toward the west B) for copy 0 then copy 1, then
    // the B edges likewise.
    LatticeSpec lat(8, L);
    std::vector<PauliOperator> templates;
    for (int c = 0; c < 2; ++c) {
        int ae = 2 * c, an = 2 * c + 1, be = 4 + 2 * c, bn = 4 + 2 * c + 1;
        // vertex terms: the four edges meeting at A(0,0) and at B(0,0)
        templates.push_back(
            from_sites(lat, 'Z', {{0, 0, ae}, {0, 0, an}, {0, -1, bn}, {-1, -1, be}}));
        templates.push_back(from_sites(lat, 'Z', {{0, 0, be}, {0, 0, bn}, {0, 0, ae}, {1, 0, an}}));
        // face terms: the faces centered north and east of A(0,0)
        templates.push_back(
            from_sites(lat, 'X', {{0, 0, ae}, {0, 0, bn}, {-1, 0, be}, {0, 0, an}}));
        templates.push_back(
            from_sites(lat, 'X', {{0, -1, bn}, {0, -1, be}, {1, 0, an}, {0, 0, ae}}));
    }
    return CodeDef{"ktc2-diamond", lat, templates};
}

CentralizerReport local_centralizer_check(const CodeDef& code, int window) {
    const LatticeSpec& lat = code.lattice;
    if (2 * window > lat.L)
        throw std::invalid_argument(
            "local_centralizer_check: window too large for torus (windowed operators could be "
            "logicals)");
    int n = lat.num_qubits();
    // Window variable basis: X/Z bits of qubits in the window.
    std::vector<int> bits;
    for (int cy = 0; cy < window; ++cy)
        for (int cx = 0; cx < window; ++cx)
            for (int s = 0; s < lat.sites_per_cell; ++s) {
                int li = lat.linear({cx, cy, s});
                bits.push_back(li);
                bits.push_back(n + li);
            }
    auto stab_inst = code.stabilizer_instances();
    std::vector<BitVec> svecs;
    svecs.reserve(stab_inst.size());
    for (const auto& s : stab_inst) svecs.push_back(to_symplectic(s));
    int nv = (int)bits.size();
    std::vector<BitVec> rows;
    rows.reserve(svecs.size());
    for (const auto& s : svecs) {
        BitVec row(nv);
        bool nonzero = false;
        for (int b = 0; b < nv; ++b) {
            // symplectic product of a window unit vector with s
            int bit = bits[b];
            int partner = bit < n ? bit + n : bit - n;
            if (s.get(partner)) {
                row.set(b);
                nonzero = true;
            }
        }
        if (nonzero) rows.push_back(std::move(row));
    }
    const bool subsystem = code.kind == CodeDef::Kind::subsystem;
    PauliSpan target(lat, subsystem ? code.gauge_instances() : stab_inst);
    CentralizerReport report;
    report.window = window;
    report.pass = true;
    for (const auto& y : gf2_nullspace(rows, nv)) {
        BitVec x(2 * n);
        for (int b = 0; b < nv; ++b)
            if (y.get(b)) x.set(bits[b]);
        if (!x.any()) continue;
        report.basis_dim++;
        if (!target.contains_vec(x)) {
            report.pass = false;
            report.counterexamples.push_back(from_symplectic(lat, x));
        }
    }
    return report;
}

CodeDef build_code_by_name(const std::string& name, int L) {
    if (name == "ktc") return build_ktc(L);
    if (name == "tcc48") return build_tcc_48(L);
    if (name == "tscc48") return build_tscc_48(L);
    if (name == "tscc48-sz") return build_intermediate_sz(build_tscc_48(L));
    if (name == "ktc2-diamond") return build_ktc_stack_diamond(L);
    if (name.rfind("ktc-stack:", 0) == 0) {
        int n = std::atoi(name.c_str() + 10);
        if (n < 1) throw std::invalid_argument("bad stack count in code name: " + name);
        return build_ktc_stack(n, L);
    }
    throw std::invalid_argument("unknown code name: " + name);
}

std::vector<std::string> registered_code_names() {
    return {"ktc", "ktc-stack:2", "ktc2-diamond", "tcc48", "tscc48", "tscc48-sz"};
}

}  // namespace topomap
