#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dense_oracle.hpp"
#include "topomap/gf2.hpp"

using namespace topomap;

namespace {

BitVec random_vec(int n, std::mt19937& rng) {
    BitVec v(n);
    std::bernoulli_distribution coin(0.4);
    for (int i = 0; i < n; ++i)
        if (coin(rng)) v.set(i);
    return v;
}

PauliOperator random_pauli(const LatticeSpec& shape, std::mt19937& rng, bool hermitian) {
    int n = shape.num_qubits();
    std::vector<QubitIndex> xs, zs;
    std::uniform_int_distribution<int> coin(0, 3);
    for (int i = 0; i < n; ++i) {
        int c = coin(rng);
        auto q = shape.from_linear(i);
        if (c & 1) xs.push_back(q);
        if (c & 2) zs.push_back(q);
    }
    PauliOperator p(shape, std::move(xs), std::move(zs), 0);
    if (hermitian && (p.display_phase_exp() & 1)) {
        // absorb the i from each Y factor so the overall operator squares to +1
        p = PauliOperator(shape, std::vector<QubitIndex>(p.x_support()),
                          std::vector<QubitIndex>(p.z_support()),
                          (4 - p.display_phase_exp()) % 4);
    }
    return p;
}

}  // namespace

TEST_CASE("symplectic round trip and commute sign") {
    LatticeSpec shape(2, 3);
    std::mt19937 rng(101);
    for (int t = 0; t < 200; ++t) {
        auto p = random_pauli(shape, rng, false).unsigned_part();
        auto q = random_pauli(shape, rng, false).unsigned_part();
        auto vp = to_symplectic(p);
        auto vq = to_symplectic(q);
        CHECK(from_symplectic(shape, vp) == p);
        int sign = symplectic_product(vp, vq) ? -1 : 1;
        CHECK(sign == commute_sign(p, q));
    }
}

TEST_CASE("symplectic product matches bitwise definition off word boundaries") {
    std::mt19937 rng(7);
    for (int n : {3, 17, 64, 65, 100, 128}) {
        for (int t = 0; t < 50; ++t) {
            auto u = random_vec(2 * n, rng);
            auto v = random_vec(2 * n, rng);
            int ref = 0;
            for (int i = 0; i < n; ++i)
                ref ^= (u.get(i) & v.get(n + i)) ^ (u.get(n + i) & v.get(i));
            CHECK(symplectic_product(u, v) == ref);
        }
    }
}

TEST_CASE("Gf2Span rank, membership and decompose") {
    std::mt19937 rng(202);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 40;
        Gf2Span span(n, true);
        std::vector<BitVec> gens;
        for (int g = 0; g < 25; ++g) {
            auto v = random_vec(n, rng);
            gens.push_back(v);
            span.add(v);
        }
        // every generator is contained and decomposes back to itself
        for (const auto& g : gens) {
            CHECK(span.contains(g));
            auto combo = span.decompose(g);
            REQUIRE(combo.has_value());
            BitVec acc(n);
            for (int i = 0; i < combo->size(); ++i)
                if (combo->get(i)) acc ^= gens[i];
            CHECK(acc == g);
        }
        // random combinations are contained; rank bounds hold
        CHECK(span.rank() <= 25);
        auto w = random_vec(n, rng);
        bool in = span.contains(w);
        auto combo = span.decompose(w);
        CHECK(in == combo.has_value());
    }
}

TEST_CASE("nullspace vectors annihilate all rows and dimension is complementary") {
    std::mt19937 rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        int ncols = 30;
        std::vector<BitVec> rows;
        for (int r = 0; r < 18; ++r) rows.push_back(random_vec(ncols, rng));
        auto basis = gf2_nullspace(rows, ncols);
        int r = gf2_rank(rows);
        CHECK((int)basis.size() == ncols - r);
        for (const auto& y : basis)
            for (const auto& row : rows) CHECK(row.and_parity(y) == 0);
        CHECK(gf2_rank(basis) == (int)basis.size());
    }
}

TEST_CASE("PauliSpan in_span reports the exact sign") {
    LatticeSpec shape(1, 2);  // 4 qubits, small enough for the dense oracle
    std::mt19937 rng(404);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<PauliOperator> gens;
        for (int g = 0; g < 5; ++g) gens.push_back(random_pauli(shape, rng, true));
        PauliSpan span(shape, gens);
        // multiply a random subset in random order; query the product and a
        // sign-flipped copy
        std::uniform_int_distribution<int> coin(0, 1);
        auto prod = PauliOperator::identity(shape);
        for (const auto& g : gens)
            if (coin(rng)) prod = prod * g;
        if (prod.display_phase_exp() & 1) continue;  // skip anti-Hermitian products
        auto dec = span.in_span(prod);
        REQUIRE(dec.has_value());
        auto re = PauliOperator::identity(shape);
        for (int idx : dec->generator_indices) re = re * gens[idx];
        using namespace topomap::testing;
        auto lhs = dense_matrix(prod);
        auto rhs = scaled(dense_matrix(re), cxd{(double)dec->sign, 0});
        CHECK(approx_equal(lhs, rhs));
    }
}

TEST_CASE("symplectic gram-schmidt produces hyperbolic pairs plus center") {
    LatticeSpec shape(2, 3);
    std::mt19937 rng(505);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PauliOperator> gens;
        for (int g = 0; g < 10; ++g) gens.push_back(random_pauli(shape, rng, true));
        auto basis = symplectic_gram_schmidt(shape, gens);
        for (size_t i = 0; i < basis.hyperbolic.size(); ++i) {
            CHECK(commute_sign(basis.hyperbolic[i].first, basis.hyperbolic[i].second) == -1);
            for (size_t j = i + 1; j < basis.hyperbolic.size(); ++j) {
                CHECK(commute_sign(basis.hyperbolic[i].first, basis.hyperbolic[j].first) == 1);
                CHECK(commute_sign(basis.hyperbolic[i].first, basis.hyperbolic[j].second) == 1);
                CHECK(commute_sign(basis.hyperbolic[i].second, basis.hyperbolic[j].first) == 1);
                CHECK(commute_sign(basis.hyperbolic[i].second, basis.hyperbolic[j].second) == 1);
            }
            for (const auto& c : basis.center) {
                CHECK(commute_sign(c, basis.hyperbolic[i].first) == 1);
                CHECK(commute_sign(c, basis.hyperbolic[i].second) == 1);
            }
        }
        // dimensions add up to the span rank
        std::vector<BitVec> all;
        for (const auto& g : gens) all.push_back(to_symplectic(g));
        int rank = gf2_rank(all);
        CHECK((int)(2 * basis.hyperbolic.size() + basis.center.size()) == rank);
    }
}
