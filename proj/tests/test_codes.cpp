#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "topomap/code.hpp"
#include "topomap/gf2.hpp"

using namespace topomap;

namespace {

int stabilizer_rank(const CodeDef& code) {
    std::vector<BitVec> rows;
    for (const auto& s : code.stabilizer_instances()) rows.push_back(to_symplectic(s));
    return gf2_rank(rows);
}

int gauge_rank(const CodeDef& code) {
    std::vector<BitVec> rows;
    for (const auto& g : code.gauge_instances()) rows.push_back(to_symplectic(g));
    return gf2_rank(rows);
}

void check_all_commute(const std::vector<PauliOperator>& ops) {
    for (size_t i = 0; i < ops.size(); ++i)
        for (size_t j = i + 1; j < ops.size(); ++j) REQUIRE(commute_sign(ops[i], ops[j]) == 1);
}

}  // namespace

TEST_CASE("toric code: commuting stabilizers, two logical qubits") {
    for (int L : {2, 3, 4}) {
        auto code = build_ktc(L);
        CHECK(code.num_qubits() == 2 * L * L);
        auto inst = code.stabilizer_instances();
        CHECK((int)inst.size() == 2 * L * L);
        check_all_commute(inst);
        int rank = stabilizer_rank(code);
        CHECK(rank == 2 * L * L - 2);  // k = 2
        // global relations: product of all stars = product of all plaquettes = I
        auto all_stars = PauliOperator::identity(code.lattice);
        auto all_plaqs = PauliOperator::identity(code.lattice);
        for (const auto& s : inst) {
            if (s.x_support().empty()) all_stars = all_stars * s;
            else all_plaqs = all_plaqs * s;
        }
        CHECK(all_stars.is_identity());
        CHECK(all_plaqs.is_identity());
    }
}

TEST_CASE("toric code stabilizers are range <= 2") {
    auto code = build_ktc(4);
    for (const auto& t : code.stabilizer_templates) CHECK(range_of(t) <= 2);
}

TEST_CASE("stacked toric codes: logical count is additive, layers decoupled") {
    auto code = build_ktc_stack(3, 3);
    CHECK(code.num_qubits() == 6 * 9);
    check_all_commute(code.stabilizer_instances());
    CHECK(stabilizer_rank(code) == 6 * 9 - 6);  // k = 2 per layer
    // templates act within a single layer's site pair
    for (const auto& t : code.stabilizer_templates) {
        std::set<int> layers;
        for (const auto& q : t.support()) layers.insert(q.site / 2);
        CHECK(layers.size() == 1);
    }
}

TEST_CASE("square-octagon color code: commuting CSS stabilizers, four logical qubits") {
    for (int L : {2, 3}) {
        auto code = build_tcc_48(L);
        CHECK(code.num_qubits() == 8 * L * L);
        CHECK((int)code.stabilizer_templates.size() == 8);
        auto inst = code.stabilizer_instances();
        check_all_commute(inst);
        CHECK(stabilizer_rank(code) == 8 * L * L - 4);  // k = 4
        // CSS: every template is pure-X or pure-Z, and faces come in X/Z pairs
        int pure_x = 0, pure_z = 0;
        for (const auto& t : code.stabilizer_templates) {
            if (t.z_support().empty()) ++pure_x;
            if (t.x_support().empty()) ++pure_z;
        }
        CHECK(pure_x == 4);
        CHECK(pure_z == 4);
    }
}

TEST_CASE("square-octagon faces have weight 4 or 8 in X/Z matched pairs") {
    auto code = build_tcc_48(3);
    std::multiset<int> weights;
    for (const auto& t : code.stabilizer_templates) weights.insert(t.weight());
    CHECK(weights == std::multiset<int>({4, 4, 4, 4, 8, 8, 8, 8}));
    // X and Z partners share supports
    std::set<std::vector<QubitIndex>> x_supports, z_supports;
    for (const auto& t : code.stabilizer_templates) {
        if (t.z_support().empty()) x_supports.insert(t.support());
        else z_supports.insert(t.support());
    }
    CHECK(x_supports == z_supports);
}

TEST_CASE("subsystem color code: gauge structure") {
    auto code = build_tscc_48(2);
    CHECK(code.kind == CodeDef::Kind::subsystem);
    CHECK(code.num_qubits() == 24 * 2 * 2);
    CHECK((int)code.gauge_templates.size() == 36);
    // every gauge template is a two-qubit same-letter pair
    int solid = 0;
    for (const auto& g : code.gauge_templates) {
        CHECK(g.weight() == 2);
        bool pure_z = g.x_support().empty();
        bool pure_x = g.z_support().empty();
        bool is_y = g.x_support() == g.z_support() && !g.x_support().empty();
        CHECK((pure_z || pure_x || is_y));
        if (pure_z) ++solid;
    }
    CHECK(solid == 12);
    // solid edges form a perfect matching of the cell's qubits
    auto sz_qubits = std::set<QubitIndex>{};
    int sz_count = 0;
    for (const auto& g : code.gauge_templates) {
        if (!g.x_support().empty()) continue;
        for (const auto& q : g.support()) {
            sz_qubits.insert(q);
            ++sz_count;
        }
    }
    CHECK(sz_count == 24);
    CHECK(sz_qubits.size() == 24);
}

TEST_CASE("subsystem color code: stabilizer lies in the gauge center") {
    for (int L : {2, 3}) {
        auto code = build_tscc_48(L);
        auto ginst = code.gauge_instances();
        std::vector<BitVec> grows;
        for (const auto& g : ginst) grows.push_back(to_symplectic(g));
        Gf2Span gspan(2 * code.num_qubits());
        for (const auto& r : grows) gspan.add(r);
        for (const auto& s : code.stabilizer_instances()) {
            auto v = to_symplectic(s);
            CHECK(gspan.contains(v));  // S inside G
            for (const auto& g : ginst) REQUIRE(commute_sign(s, g) == 1);  // S central
        }
        for (const auto& t : code.stabilizer_templates) {
            CHECK(t.weight() <= 24);
            CHECK(t.display_phase_exp() == 0);
        }
    }
}

TEST_CASE("subsystem color code: rank bookkeeping") {
    // rank(G) = rank(S) + 2 g with g local gauge qubits; k = N - rank(S) - g.
    for (int L : {2, 3}) {
        auto code = build_tscc_48(L);
        int N = code.num_qubits();
        int rs = stabilizer_rank(code);
        int rg = gauge_rank(code);
        CHECK((rg - rs) % 2 == 0);
        int g = (rg - rs) / 2;
        int k = N - rs - g;
        CHECK(k == 4);  // same logical content as the square-octagon code
    }
}

TEST_CASE("intermediate code: stabilizer plus solid-edge gauge subgroup") {
    auto tscc = build_tscc_48(2);
    auto mid = build_intermediate_sz(tscc);
    CHECK(mid.kind == CodeDef::Kind::stabilizer);
    CHECK(mid.lattice.same_shape(tscc.lattice));
    auto inst = mid.stabilizer_instances();
    check_all_commute(inst);
    // the solid-edge operators are all present as instances
    std::vector<BitVec> rows;
    for (const auto& s : inst) rows.push_back(to_symplectic(s));
    Gf2Span span(2 * mid.num_qubits());
    for (const auto& r : rows) span.add(r);
    for (const auto& g : tscc.gauge_templates)
        if (g.x_support().empty()) CHECK(span.contains(to_symplectic(g)));
    for (const auto& s : tscc.stabilizer_instances()) CHECK(span.contains(to_symplectic(s)));
    // N - rank = 4: still four logical qubits
    CHECK(mid.num_qubits() - gf2_rank(rows) == 4);
}

TEST_CASE("diamond-frame stack: round-trip coordinates and distances") {
    for (int L : {2, 3}) {
        DiamondFrame frame{L};
        std::set<std::tuple<int, int, int>> seen;
        for (int cy = 0; cy < L; ++cy)
            for (int cx = 0; cx < L; ++cx)
                for (int site = 0; site < 8; ++site) {
                    int i, j, s;
                    frame.to_stack(QubitIndex{cx, cy, site}, i, j, s);
                    auto back = frame.to_frame(i, j, s);
                    CHECK(back == QubitIndex(cx, cy, site));
                    seen.insert({i, j, s});
                }
        CHECK(seen.size() == (size_t)(8 * L * L));
        // distance: symmetric, zero iff same cell, invariant under periods
        CHECK(frame.stack_distance(0, 0, 0, 0) == 0);
        CHECK(frame.stack_distance(0, 0, 1, 0) == 1);
        CHECK(frame.stack_distance(0, 0, 1, 1) == 2);
        CHECK(frame.stack_distance(0, 0, L, L) == 0);
        CHECK(frame.stack_distance(0, 0, L, -L) == 0);
        CHECK(frame.stack_distance(2, 1, 0, 0) == frame.stack_distance(0, 0, 2, 1));
    }
}

TEST_CASE("re-celled two-layer stack matches a plain stack up to relabeling") {
    int L = 2;
    auto diamond = build_ktc_stack_diamond(L);
    CHECK(diamond.num_qubits() == 8 * L * L);
    check_all_commute(diamond.stabilizer_instances());
    CHECK(stabilizer_rank(diamond) == 8 * L * L - 4);  // k = 4, two layers
    // every instance is a 4-body star or plaquette
    for (const auto& s : diamond.stabilizer_instances()) CHECK(s.weight() == 4);
}

TEST_CASE("local centralizer check passes for the healthy codes") {
    for (const char* name : {"ktc", "tcc48", "tscc48", "tscc48-sz"}) {
        auto code = build_code_by_name(name, 4);
        auto report = local_centralizer_check(code, 2);
        CHECK(report.pass);
        CHECK(report.counterexamples.empty());
    }
}

TEST_CASE("local centralizer check exposes a mutilated code") {
    auto code = build_ktc(4);
    code.stabilizer_templates.pop_back();  // drop the plaquette family
    auto report = local_centralizer_check(code, 2);
    CHECK_FALSE(report.pass);
    CHECK_FALSE(report.counterexamples.empty());
    // the counterexample really does commute with everything yet is no stabilizer
    std::vector<BitVec> rows;
    for (const auto& s : code.stabilizer_instances()) rows.push_back(to_symplectic(s));
    Gf2Span span(2 * code.num_qubits());
    for (const auto& r : rows) span.add(r);
    for (const auto& c : report.counterexamples) {
        for (const auto& s : code.stabilizer_instances()) CHECK(commute_sign(c, s) == 1);
        CHECK_FALSE(span.contains(to_symplectic(c)));
    }
}

TEST_CASE("code registry") {
    auto names = registered_code_names();
    CHECK(names.size() >= 5);
    for (const auto& n : names) {
        auto code = build_code_by_name(n, 2);
        CHECK(code.lattice.L == 2);
        CHECK_FALSE(code.stabilizer_templates.empty());
    }
    CHECK(build_code_by_name("ktc-stack:3", 2).num_qubits() == 6 * 4);
    CHECK_THROWS(build_code_by_name("nope", 2));
}
