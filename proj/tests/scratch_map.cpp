// Scratch diagnostic: exercise find_map on easy and hard instances.
#include <cstdio>
#include <cstring>
#include <cstdlib>

#include "topomap/clifford_map.hpp"
#include "topomap/code.hpp"

using namespace topomap;

int main(int argc, char** argv) {
    bool hard = argc > 1 && !strcmp(argv[1], "hard");
    if (!hard) {
        auto a = build_ktc(4), b = build_ktc(4);
        auto m = find_map(a, b, 0);
        if (!m) { printf("ktc->ktc radius 0: NOT FOUND\n"); return 1; }
        printf("ktc->ktc found, v=%d\n", m->v);
        printf("%s", format_map(*m).c_str());
        auto rep = verify_code_map(*m, a, b, 4);
        printf("verify: sympl=%d group=%d\n", (int)rep.symplectic_ok, (int)rep.group_map_ok);
        // rank obstruction case
        CodeDef triv;
        triv.name = "trivial";
        triv.lattice = LatticeSpec(2, 4);
        for (int s = 0; s < 2; ++s)
            triv.stabilizer_templates.push_back(
                PauliOperator::single(triv.lattice, {0, 0, s}, 'Z'));
        auto m2 = find_map(a, triv, 1);
        printf("ktc->trivial: %s\n", m2 ? "FOUND (bad)" : "not-found (good)");
        return 0;
    }
    auto src = build_tcc_48(4);
    auto tgt = build_ktc_stack_diamond(4);
    auto m = find_map(src, tgt, argc > 2 ? atoi(argv[2]) : 0);
    if (!m) { printf("tcc->2ktc radius 1: NOT FOUND\n"); return 1; }
    printf("tcc->2ktc found, v=%d\n", m->v);
    printf("%s", format_map(*m).c_str());
    for (int L : {2, 3, 4}) {
        auto rep = verify_code_map(*m, build_tcc_48(L), build_ktc_stack_diamond(L), L);
        printf("L=%d verify: sympl=%d group=%d (%zu failures)\n", L, (int)rep.symplectic_ok,
               (int)rep.group_map_ok, rep.failures.size());
    }
    return 0;
}
