#include "topomap/gf2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <utility>

namespace topomap {

int BitVec::popcount() const {
    int n = 0;
    for (uint64_t x : w_) n += std::popcount(x);
    return n;
}

int BitVec::lowest_set() const {
    for (size_t k = 0; k < w_.size(); ++k)
        if (w_[k]) return (int)(k * 64 + std::countr_zero(w_[k]));
    return -1;
}

int BitVec::and_parity(const BitVec& o) const {
    uint64_t acc = 0;
    for (size_t k = 0; k < w_.size(); ++k) acc ^= w_[k] & o.w_[k];
    return std::popcount(acc) & 1;
}

BitVec to_symplectic(const PauliOperator& p) {
    const auto& shape = p.shape();
    int n = shape.num_qubits();
    BitVec v(2 * n);
    for (const auto& q : p.x_support()) v.set(shape.linear(q));
    for (const auto& q : p.z_support()) v.set(n + shape.linear(q));
    return v;
}

PauliOperator from_symplectic(const LatticeSpec& shape, const BitVec& v) {
    int n = shape.num_qubits();
    if (v.size() != 2 * n) throw std::invalid_argument("symplectic vector length mismatch");
    std::vector<QubitIndex> xs, zs;
    for (int i = 0; i < n; ++i) {
        if (v.get(i)) xs.push_back(shape.from_linear(i));
        if (v.get(n + i)) zs.push_back(shape.from_linear(i));
    }
    PauliOperator raw(shape, std::move(xs), std::move(zs), 0);
    return raw.unsigned_part();
}

int symplectic_product(const BitVec& u, const BitVec& v) {
    int n = u.size() / 2;
    uint64_t acc = 0;
    const auto& uw = u.words();
    const auto& vw = v.words();
    // X and Z blocks are word-aligned only if n % 64 == 0; do it bitwise on
    // the cross terms via a shifted view instead of assuming alignment.
    if (n % 64 == 0) {
        size_t half = n / 64;
        for (size_t k = 0; k < half; ++k) {
            acc ^= uw[k] & vw[half + k];
            acc ^= uw[half + k] & vw[k];
        }
        return std::popcount(acc) & 1;
    }
    int par = 0;
    for (int i = 0; i < n; ++i) par ^= (u.get(i) & v.get(n + i)) ^ (u.get(n + i) & v.get(i));
    return par;
}

Gf2Span::Gf2Span(int nbits, bool track_combos)
    : nbits_(nbits), track_(track_combos), pivot_row_(nbits, -1) {}

namespace {
/// a ^= b where the two generator-combination vectors may differ in length.
void xor_grow(BitVec& a, const BitVec& b) {
    if (b.size() > a.size()) {
        BitVec bigger(b.size());
        for (int i = 0; i < a.size(); ++i)
            if (a.get(i)) bigger.set(i);
        a = std::move(bigger);
    }
    for (int i = 0; i < b.size(); ++i)
        if (b.get(i)) a.flip(i);
}
}  // namespace

bool Gf2Span::add(const BitVec& v) {
    int gen_idx = ngen_++;
    BitVec r = v;
    BitVec combo;
    if (track_) {
        combo = BitVec(gen_idx + 1);
        combo.set(gen_idx);
    }
    for (;;) {
        int p = r.lowest_set();
        if (p < 0) return false;
        int row = pivot_row_[p];
        if (row < 0) {
            pivot_row_[p] = (int)rows_.size();
            rows_.push_back(std::move(r));
            if (track_) combos_.push_back(std::move(combo));
            return true;
        }
        r ^= rows_[row];
        if (track_) xor_grow(combo, combos_[row]);
    }
}

BitVec Gf2Span::reduce(BitVec v) const {
    for (;;) {
        int p = v.lowest_set();
        if (p < 0) return v;
        int row = pivot_row_[p];
        if (row < 0) return v;
        v ^= rows_[row];
    }
}

bool Gf2Span::contains(const BitVec& v) const { return !reduce(v).any(); }

std::optional<BitVec> Gf2Span::decompose(const BitVec& v) const {
    if (!track_) throw std::logic_error("Gf2Span built without combo tracking");
    BitVec r = v;
    BitVec combo(ngen_);
    for (;;) {
        int p = r.lowest_set();
        if (p < 0) break;
        int row = pivot_row_[p];
        if (row < 0) return std::nullopt;
        r ^= rows_[row];
        const BitVec& c = combos_[row];
        int lim = std::min(c.size(), combo.size());
        for (int i = 0; i < lim; ++i)
            if (c.get(i)) combo.flip(i);
    }
    return combo;
}

int gf2_rank(const std::vector<BitVec>& rows) {
    if (rows.empty()) return 0;
    Gf2Span span(rows.front().size());
    for (const auto& r : rows) span.add(r);
    return span.rank();
}

std::vector<BitVec> gf2_nullspace(const std::vector<BitVec>& rows, int ncols) {
    // Row-reduce, remembering the pivot column of each surviving row.
    std::vector<BitVec> red;
    std::vector<int> pivots;
    std::vector<int> pivot_of_col(ncols, -1);
    for (const auto& row : rows) {
        BitVec r = row;
        for (;;) {
            int p = r.lowest_set();
            if (p < 0) break;
            int idx = pivot_of_col[p];
            if (idx < 0) {
                pivot_of_col[p] = (int)red.size();
                pivots.push_back(p);
                red.push_back(std::move(r));
                break;
            }
            r ^= red[idx];
        }
    }
    // Back-substitute to RREF so each pivot column appears in one row only.
    for (size_t i = 0; i < red.size(); ++i)
        for (size_t j = 0; j < red.size(); ++j)
            if (i != j && red[j].get(pivots[i])) red[j] ^= red[i];
    std::vector<BitVec> basis;
    for (int c = 0; c < ncols; ++c) {
        if (pivot_of_col[c] >= 0) continue;  // pivot column, not free
        BitVec y(ncols);
        y.set(c);
        for (size_t i = 0; i < red.size(); ++i)
            if (red[i].get(c)) y.set(pivots[i]);
        basis.push_back(std::move(y));
    }
    return basis;
}

PauliSpan::PauliSpan(LatticeSpec shape, std::vector<PauliOperator> generators)
    : shape_(std::move(shape)), gens_(std::move(generators)), span_(2 * shape_.num_qubits(), true) {
    for (const auto& g : gens_) {
        if (!g.shape().same_shape(shape_))
            throw std::invalid_argument("PauliSpan: generator on wrong lattice");
        span_.add(to_symplectic(g));
    }
}

std::optional<SpanDecomposition> PauliSpan::in_span(const PauliOperator& p) const {
    auto combo = span_.decompose(to_symplectic(p));
    if (!combo) return std::nullopt;
    SpanDecomposition out;
    PauliOperator prod = PauliOperator::identity(shape_);
    for (int i = 0; i < combo->size(); ++i) {
        if (combo->get(i)) {
            out.generator_indices.push_back(i);
            prod = prod * gens_[i];
        }
    }
    // prod equals p up to phase; for Hermitian inputs the ratio is +-1.
    int delta = ((p.display_phase_exp() - prod.display_phase_exp()) % 4 + 4) % 4;
    if (delta == 0) out.sign = 1;
    else if (delta == 2) out.sign = -1;
    else throw std::logic_error("in_span: non-real phase ratio (non-Hermitian input?)");
    return out;
}

SymplecticBasis symplectic_gram_schmidt(const LatticeSpec& shape,
                                        const std::vector<PauliOperator>& gens) {
    // Independent basis of the span first.
    Gf2Span span(2 * shape.num_qubits());
    std::vector<BitVec> basis;
    for (const auto& g : gens) {
        BitVec v = to_symplectic(g);
        if (span.add(v)) basis.push_back(std::move(v));
    }
    SymplecticBasis out;
    std::vector<BitVec> work = std::move(basis);
    for (;;) {
        // find the first anticommuting pair
        int pi = -1, pj = -1;
        for (size_t i = 0; i < work.size() && pi < 0; ++i)
            for (size_t j = i + 1; j < work.size(); ++j)
                if (symplectic_product(work[i], work[j])) {
                    pi = (int)i;
                    pj = (int)j;
                    break;
                }
        if (pi < 0) break;
        BitVec p = work[pi], q = work[pj];
        std::vector<BitVec> rest;
        rest.reserve(work.size() - 2);
        for (size_t k = 0; k < work.size(); ++k) {
            if ((int)k == pi || (int)k == pj) continue;
            BitVec v = work[k];
            if (symplectic_product(v, q)) v ^= p;
            if (symplectic_product(v, p)) v ^= q;
            rest.push_back(std::move(v));
        }
        out.hyperbolic.emplace_back(from_symplectic(shape, p), from_symplectic(shape, q));
        work = std::move(rest);
    }
    for (const auto& v : work)
        if (v.any()) out.center.push_back(from_symplectic(shape, v));
    return out;
}

}  // namespace topomap
