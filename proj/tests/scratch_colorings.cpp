// Scratch diagnostic: enumerate translation-invariant proper 3-edge-colorings
// of the original square-octagon cell and compute the subsystem logical count
// of the induced inflated-lattice code for each.
#include <array>
#include <cstdio>
#include <vector>

#include "topomap/code.hpp"
#include "topomap/gf2.hpp"

using namespace topomap;

namespace {

struct Edge {
    // original edge between vertex va (corner ca faces it) and vb/cb, with
    // cell offset of vb relative to va's cell
    int va, ca, vb, cb, dx, dy;
};

// Original edges of the cell. Vertex ids: A: t=0,r=1,b=2,l=3; B: 4..7.
// Corner index = which corner of the inflated triangle faces this edge.
// Corner assignment per vertex: each vertex has two sides and one link; we
// give side slots 0 and 1 (in the t->r->b->l cyclic order) and link slot 2.
const std::array<Edge, 12> kEdges = {{
    // A sides: t-r, r-b, b-l, l-t
    {0, 0, 1, 0, 0, 0},
    {1, 1, 2, 1, 0, 0},
    {2, 0, 3, 0, 0, 0},
    {3, 1, 0, 1, 0, 0},
    // B sides
    {4, 0, 5, 0, 0, 0},
    {5, 1, 6, 1, 0, 0},
    {6, 0, 7, 0, 0, 0},
    {7, 1, 4, 1, 0, 0},
    // links: A.r-B.l, A.l-B.r(-1,-1), A.t-B.b(0,-1), A.b-B.t(-1,0)
    {1, 2, 7, 2, 0, 0},
    {3, 2, 5, 2, -1, -1},
    {0, 2, 6, 2, 0, -1},
    {2, 2, 4, 2, -1, 0},
}};

inline int tsite(int v, int c) { return 3 * v + c; }

char third(char a, char b) {
    for (char c : {'X', 'Y', 'Z'})
        if (c != a && c != b) return c;
    return '?';
}

std::vector<PauliOperator> gauge_from_labels(const LatticeSpec& lat,
                                             const std::array<char, 12>& lab) {
    std::vector<PauliOperator> gauge;
    auto add = [&](char letter, QubitIndex a, QubitIndex b) {
        auto g = PauliOperator::single(lat, lat.reduce(a.cx, a.cy, a.site), letter) *
                 PauliOperator::single(lat, lat.reduce(b.cx, b.cy, b.site), letter);
        gauge.push_back(g.unsigned_part());
    };
    // link/side edges
    for (int e = 0; e < 12; ++e) {
        const auto& E = kEdges[e];
        add(lab[e], {0, 0, tsite(E.va, E.ca)}, {E.dx, E.dy, tsite(E.vb, E.cb)});
    }
    // triangle edges: forced to the third label of the two facing corners
    for (int v = 0; v < 8; ++v) {
        char c0 = '?', c1 = '?', c2 = '?';
        for (int e = 0; e < 12; ++e) {
            if (kEdges[e].va == v) (kEdges[e].ca == 0 ? c0 : kEdges[e].ca == 1 ? c1 : c2) = lab[e];
            if (kEdges[e].vb == v) (kEdges[e].cb == 0 ? c0 : kEdges[e].cb == 1 ? c1 : c2) = lab[e];
        }
        add(third(c0, c1), {0, 0, tsite(v, 0)}, {0, 0, tsite(v, 1)});
        add(third(c0, c2), {0, 0, tsite(v, 0)}, {0, 0, tsite(v, 2)});
        add(third(c1, c2), {0, 0, tsite(v, 1)}, {0, 0, tsite(v, 2)});
    }
    return gauge;
}

bool proper(const std::array<char, 12>& lab) {
    for (int v = 0; v < 8; ++v) {
        char got[3] = {0, 0, 0};
        for (int e = 0; e < 12; ++e) {
            if (kEdges[e].va == v) got[kEdges[e].ca] = lab[e];
            if (kEdges[e].vb == v) got[kEdges[e].cb] = lab[e];
        }
        if (got[0] == got[1] || got[0] == got[2] || got[1] == got[2]) return false;
    }
    return true;
}

int logical_count(const std::array<char, 12>& lab, int L) {
    LatticeSpec lat(24, L);
    auto templates = gauge_from_labels(lat, lab);
    std::vector<BitVec> gvecs;
    for (int cy = 0; cy < L; ++cy)
        for (int cx = 0; cx < L; ++cx)
            for (const auto& t : templates) gvecs.push_back(to_symplectic(t.translated(cx, cy)));
    Gf2Span gspan(2 * lat.num_qubits());
    std::vector<BitVec> gbasis;
    for (const auto& v : gvecs)
        if (gspan.add(v)) gbasis.push_back(v);
    int rg = (int)gbasis.size();
    std::vector<BitVec> rows;
    for (const auto& g : gvecs) {
        BitVec row(rg);
        for (int b = 0; b < rg; ++b)
            if (symplectic_product(gbasis[b], g)) row.set(b);
        rows.push_back(std::move(row));
    }
    int s = (int)gf2_nullspace(rows, rg).size();
    int g = (rg - s) / 2;
    return lat.num_qubits() - s - g;
}

}  // namespace

int main() {
    const char letters[3] = {'X', 'Y', 'Z'};
    int found = 0, properly = 0;
    for (int code = 0; code < 531441; ++code) {
        std::array<char, 12> lab;
        int c = code;
        for (int e = 0; e < 12; ++e) {
            lab[e] = letters[c % 3];
            c /= 3;
        }
        // fix gauge: first A side = X, second = Y (mod global relabeling)
        if (lab[0] != 'X' || lab[1] != 'Y') continue;
        if (!proper(lab)) continue;
        ++properly;
        int k2 = logical_count(lab, 2);
        int k3 = logical_count(lab, 3);
        int k4 = logical_count(lab, 4);
        printf("labels=");
        for (char ch : lab) putchar(ch);
        printf("  k(L=2)=%d k(L=3)=%d k(L=4)=%d\n", k2, k3, k4);
        ++found;
    }
    printf("proper colorings (mod relabeling): %d, with k>0: %d\n", properly, found);
    return 0;
}
