// Scratch diagnostic: intrinsic rank bookkeeping of the subsystem code.
#include <cstdio>

#include "topomap/code.hpp"
#include "topomap/gf2.hpp"

using namespace topomap;

int main() {
    for (int L = 2; L <= 4; ++L) {
        auto code = build_tscc_48(L);
        int N = code.num_qubits();
        auto ginst = code.gauge_instances();
        std::vector<BitVec> gvecs;
        for (const auto& g : ginst) gvecs.push_back(to_symplectic(g));
        Gf2Span gspan(2 * N);
        std::vector<BitVec> gbasis;
        for (const auto& v : gvecs)
            if (gspan.add(v)) gbasis.push_back(v);
        int rg = (int)gbasis.size();
        // center dimension
        int r = rg;
        std::vector<BitVec> rows;
        for (const auto& g : gvecs) {
            BitVec row(r);
            for (int b = 0; b < r; ++b)
                if (symplectic_product(gbasis[b], g)) row.set(b);
            rows.push_back(std::move(row));
        }
        auto null_combos = gf2_nullspace(rows, r);
        // center elements may coincide after the combo->vector map only if
        // combos differ by the kernel of the basis map; basis is independent
        // so dimension is exact.
        int s = (int)null_combos.size();
        int g = (rg - s) / 2;
        int k = N - s - g;
        printf("L=%d N=%d rank(G)=%d dim center=%d gauge qubits=%d k=%d\n", L, N, rg, s, g, k);
        // rank of all translates of the extracted templates
        std::vector<BitVec> trows;
        for (const auto& t : code.stabilizer_instances()) trows.push_back(to_symplectic(t));
        printf("   extracted templates=%zu, instance rank=%d, max weight=%d\n",
               code.stabilizer_templates.size(), gf2_rank(trows), [&] {
                   int w = 0;
                   for (const auto& t : code.stabilizer_templates)
                       if (t.weight() > w) w = t.weight();
                   return w;
               }());
    }
    return 0;
}
