// Scratch diagnostic: solid triangle-internal sigma_z edges plus sigma_x /
// sigma_y link edges; enumerate the per-cell link label patterns and report
// logical counts.
#include <array>
#include <cstdio>
#include <vector>

#include "topomap/code.hpp"
#include "topomap/gf2.hpp"

using namespace topomap;

namespace {

struct Edge {
    int va, ca, vb, cb, dx, dy;
};

const std::array<Edge, 12> kEdges = {{
    {0, 0, 1, 0, 0, 0},   // A t-r
    {1, 1, 2, 1, 0, 0},   // A r-b
    {2, 0, 3, 0, 0, 0},   // A b-l
    {3, 1, 0, 1, 0, 0},   // A l-t
    {4, 0, 5, 0, 0, 0},   // B t-r
    {5, 1, 6, 1, 0, 0},   // B r-b
    {6, 0, 7, 0, 0, 0},   // B b-l
    {7, 1, 4, 1, 0, 0},   // B l-t
    {1, 2, 7, 2, 0, 0},   // A.r - B.l
    {3, 2, 5, 2, -1, -1}, // A.l - B.r
    {0, 2, 6, 2, 0, -1},  // A.t - B.b
    {2, 2, 4, 2, -1, 0},  // A.b - B.t
}};

inline int tsite(int v, int c) { return 3 * v + c; }

std::vector<PauliOperator> templates_for(const LatticeSpec& lat, const std::array<char, 12>& lab) {
    std::vector<PauliOperator> out;
    auto add = [&](char letter, QubitIndex a, QubitIndex b) {
        auto g = PauliOperator::single(lat, lat.reduce(a.cx, a.cy, a.site), letter) *
                 PauliOperator::single(lat, lat.reduce(b.cx, b.cy, b.site), letter);
        out.push_back(g.unsigned_part());
    };
    for (int e = 0; e < 12; ++e) {
        const auto& E = kEdges[e];
        add(lab[e], {0, 0, tsite(E.va, E.ca)}, {E.dx, E.dy, tsite(E.vb, E.cb)});
    }
    for (int v = 0; v < 8; ++v) {
        add('Z', {0, 0, tsite(v, 0)}, {0, 0, tsite(v, 1)});
        add('Z', {0, 0, tsite(v, 1)}, {0, 0, tsite(v, 2)});
        add('Z', {0, 0, tsite(v, 2)}, {0, 0, tsite(v, 0)});
    }
    return out;
}

struct Info {
    int k, s, g, rg;
};

Info info_for(const std::array<char, 12>& lab, int L) {
    LatticeSpec lat(24, L);
    auto templates = templates_for(lat, lab);
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
    return {lat.num_qubits() - s - g, s, g, rg};
}

}  // namespace

int main() {
    int hits = 0;
    const char letters[3] = {'X', 'Y', 'Z'};
    for (int mask = 0; mask < 531441; ++mask) {
        std::array<char, 12> lab;
        int c = mask;
        for (int e = 0; e < 12; ++e) { lab[e] = letters[c % 3]; c /= 3; }
        if (lab[0] == 'Y') continue;  // fix X<->Y relabeling freedom
        auto i2 = info_for(lab, 2);
        if (i2.k <= 0 || i2.k > 8) continue;
        auto i3 = info_for(lab, 3);
        if (i3.k <= 0 || i3.k > 8) continue;
        auto i4 = info_for(lab, 4);
        printf("links=");
        for (char c : lab) putchar(c);
        printf("  L2:(k=%d,s=%d) L3:(k=%d,s=%d) L4:(k=%d,s=%d)\n", i2.k, i2.s, i3.k, i3.s, i4.k,
               i4.s);
        fflush(stdout);
        ++hits;
    }
    printf("hits=%d\n", hits);
    return 0;
}
