#include "topomap/clifford_map.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <initializer_list>
#include <unordered_map>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace topomap {

namespace {

int positive_mod(int a, int m) { return ((a % m) + m) % m; }

}  // namespace

PauliOperator ImageTemplate::instantiate(const LatticeSpec& target, int cx, int cy) const {
    std::vector<QubitIndex> x, z;
    x.reserve(xs.size());
    z.reserve(zs.size());
    for (const auto& o : xs) x.push_back(target.reduce(cx + o[0], cy + o[1], o[2]));
    for (const auto& o : zs) z.push_back(target.reduce(cx + o[0], cy + o[1], o[2]));
    return PauliOperator(target, std::move(x), std::move(z), phase_exp);
}

int ImageTemplate::offset_range() const {
    if (xs.empty() && zs.empty()) return 0;
    int lox = INT32_MAX, hix = INT32_MIN, loy = INT32_MAX, hiy = INT32_MIN;
    auto feed = [&](const std::vector<std::array<int, 3>>& v) {
        for (const auto& o : v) {
            lox = std::min(lox, o[0]);
            hix = std::max(hix, o[0]);
            loy = std::min(loy, o[1]);
            hiy = std::max(hiy, o[1]);
        }
    };
    feed(xs);
    feed(zs);
    return std::max(hix - lox, hiy - loy) + 1;
}

const ImageTemplate& LocalCliffordMap::image(int site, char letter) const {
    if (site < 0 || site >= source_sites) throw std::out_of_range("image: bad source site");
    if (letter != 'X' && letter != 'Z') throw std::invalid_argument("image: letter must be X or Z");
    return images[2 * site + (letter == 'Z' ? 1 : 0)];
}

LocalCliffordMap LocalCliffordMap::identity(int sites) {
    LocalCliffordMap m;
    m.source_name = m.target_name = "identity";
    m.source_sites = m.target_sites = sites;
    m.images.resize(2 * sites);
    for (int s = 0; s < sites; ++s) {
        m.images[2 * s].xs = {{0, 0, s}};
        m.images[2 * s + 1].zs = {{0, 0, s}};
    }
    m.v = 0;
    return m;
}

PauliOperator apply(const LocalCliffordMap& map, const PauliOperator& p) {
    const LatticeSpec& src = p.shape();
    if (src.sites_per_cell != map.source_sites)
        throw std::invalid_argument("apply: operator does not live on the map's source lattice");
    LatticeSpec tgt(map.target_sites, src.L);
    PauliOperator out(tgt, {}, {}, p.phase_exp());
    for (const auto& q : p.x_support())
        out = out * map.image(q.site, 'X').instantiate(tgt, q.cx, q.cy);
    for (const auto& q : p.z_support())
        out = out * map.image(q.site, 'Z').instantiate(tgt, q.cx, q.cy);
    return out;
}

namespace {

/// Letter bits of a template at a plane offset: bit0 = X part, bit1 = Z part.
int letter_bits_at(const ImageTemplate& t, int dx, int dy, int site) {
    int b = 0;
    for (const auto& o : t.xs)
        if (o[0] == dx && o[1] == dy && o[2] == site) b |= 1;
    for (const auto& o : t.zs)
        if (o[0] == dx && o[1] == dy && o[2] == site) b |= 2;
    return b;
}

/// Symplectic pairing of two image templates on the infinite plane, with b
/// anchored d cells away from a. Plane-level zero pairing implies the torus
/// pairing vanishes at every L.
int plane_pairing(const ImageTemplate& a, const ImageTemplate& b, int dx, int dy) {
    int parity = 0;
    auto hit = [&](const std::vector<std::array<int, 3>>& pa,
                   const std::vector<std::array<int, 3>>& pb) {
        for (const auto& u : pa)
            for (const auto& w : pb)
                if (u[0] == w[0] + dx && u[1] == w[1] + dy && u[2] == w[2]) parity ^= 1;
    };
    hit(a.xs, b.zs);
    hit(a.zs, b.xs);
    return parity;
}

int required_pairing(int site_a, char la, int site_b, char lb, int dx, int dy) {
    return (site_a == site_b && la != lb && dx == 0 && dy == 0) ? 1 : 0;
}

}  // namespace

MapReport verify_symplectic(const LocalCliffordMap& map, int L) {
    MapReport rep;
    rep.symplectic_ok = true;
    int vmax = 0;
    for (const auto& t : map.images) vmax = std::max(vmax, t.offset_range() - 1);
    rep.v = std::max(vmax, 0);
    const char letters[2] = {'X', 'Z'};
    int reach = 2 * (rep.v + 1);
    for (int sa = 0; sa < map.source_sites; ++sa)
        for (int pa = 0; pa < 2; ++pa)
            for (int sb = 0; sb < map.source_sites; ++sb)
                for (int pb = 0; pb < 2; ++pb)
                    for (int dy = -reach; dy <= reach; ++dy)
                        for (int dx = -reach; dx <= reach; ++dx) {
                            int want = required_pairing(sa, letters[pa], sb, letters[pb], dx, dy);
                            int got = plane_pairing(map.images[2 * sa + pa],
                                                    map.images[2 * sb + pb], dx, dy);
                            if (want != got) {
                                rep.symplectic_ok = false;
                                std::ostringstream os;
                                os << "pairing mismatch: (" << sa << "," << letters[pa] << ") vs ("
                                   << sb << "," << letters[pb] << ") at offset (" << dx << ","
                                   << dy << "): got " << got << ", want " << want;
                                rep.failures.push_back(os.str());
                            }
                        }
    // invertibility on the torus
    LatticeSpec tgt(map.target_sites, L);
    Gf2Span span(2 * tgt.num_qubits());
    for (int cy = 0; cy < L; ++cy)
        for (int cx = 0; cx < L; ++cx)
            for (const auto& t : map.images) span.add(to_symplectic(t.instantiate(tgt, cx, cy)));
    LatticeSpec src(map.source_sites, L);
    if (span.rank() != 2 * src.num_qubits()) {
        rep.symplectic_ok = false;
        std::ostringstream os;
        os << "image rank " << span.rank() << " != " << 2 * src.num_qubits()
           << " (map not invertible on L=" << L << ")";
        rep.failures.push_back(os.str());
    }
    return rep;
}

namespace {

std::vector<PauliOperator> padded_instances(const CodeDef& code,
                                            const std::vector<SiteLetter>& ancilla) {
    std::vector<PauliOperator> out = code.stabilizer_instances();
    const LatticeSpec& lat = code.lattice;
    for (const auto& a : ancilla)
        for (int cy = 0; cy < lat.L; ++cy)
            for (int cx = 0; cx < lat.L; ++cx)
                out.push_back(PauliOperator::single(lat, {cx, cy, a.site}, a.letter));
    return out;
}

}  // namespace

MapReport verify_code_map(const LocalCliffordMap& map, const CodeDef& source,
                          const CodeDef& target, int L) {
    if (source.lattice.L != L || target.lattice.L != L)
        throw std::invalid_argument("verify_code_map: codes must be built at the given L");
    MapReport rep = verify_symplectic(map, L);
    if (!rep.symplectic_ok) return rep;
    rep.group_map_ok = true;

    auto src_gens = padded_instances(source, map.ancilla_in);
    auto tgt_gens = padded_instances(target, map.ancilla_out);
    PauliSpan tgt_span(target.lattice, tgt_gens);

    Gf2Span image_span(2 * target.lattice.num_qubits());
    for (const auto& g : src_gens) {
        PauliOperator img = apply(map, g);
        image_span.add(to_symplectic(img));
        auto dec = tgt_span.in_span(img);
        if (!dec) {
            rep.group_map_ok = false;
            rep.failures.push_back("image of source generator not in target group: " +
                                   format_operator(g));
        } else if (dec->sign != 1) {
            rep.group_map_ok = false;
            rep.failures.push_back("image of source generator has sign -1: " +
                                   format_operator(g));
        }
    }
    if (image_span.rank() != tgt_span.rank()) {
        rep.group_map_ok = false;
        std::ostringstream os;
        os << "group rank mismatch: images " << image_span.rank() << ", target "
           << tgt_span.rank();
        rep.failures.push_back(os.str());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// find_map: linear membership constraints + backtracking on the symplectic
// conditions.
// ---------------------------------------------------------------------------

namespace {

/// Reduced row echelon form over GF(2) with an affine right-hand side stored
/// as the last column. Column order is the natural bit order, which the
/// caller arranges so that later-processed blocks get higher priority.
class Rref {
  public:
    explicit Rref(int ncols) : ncols_(ncols), row_of_pivot_(ncols, -1) {}

    /// Returns false on contradiction (row reduces to rhs = 1).
    bool add(BitVec row) {
        for (;;) {
            int p = row.lowest_set();
            if (p < 0) return true;          // redundant
            if (p == ncols_ - 1) return false;  // 0 = 1
            int r = row_of_pivot_[p];
            if (r < 0) {
                // install and back-substitute
                for (size_t i = 0; i < rows_.size(); ++i)
                    if (rows_[i].get(p)) rows_[i] ^= row;
                row_of_pivot_[p] = (int)rows_.size();
                pivots_.push_back(p);
                rows_.push_back(std::move(row));
                return true;
            }
            row ^= rows_[r];
        }
    }

    const std::vector<BitVec>& rows() const { return rows_; }
    const std::vector<int>& pivots() const { return pivots_; }

  private:
    int ncols_;
    std::vector<BitVec> rows_;
    std::vector<int> pivots_;
    std::vector<int> row_of_pivot_;
};

struct SearchCtx {
    int radius = 0;
    int src_sites = 0, tgt_sites = 0;
    int nblocks = 0;  // 2 * src_sites, processed in index order
    std::vector<std::pair<int, int>> offs;
    int nslots = 0;  // offs * tgt_sites
    int B = 0;       // bits per block
    int ncols = 0;   // nblocks * B + 1
    /// Required symplectic pairing between block images at cell offset zero
    /// (the basis' Gram matrix); every pairing at nonzero offsets vanishes.
    std::vector<std::vector<char>> gram;
    /// Optional explicit candidate lists per block (overrides enumeration).
    const std::vector<std::vector<BitVec>>* block_candidates = nullptr;
    long long node_budget = 400000;
    /// Maximum number of accepted candidates (descents) per search node, per
    /// block; forces backtracking out of weakly constrained subtrees.
    std::vector<long long> caps;
    /// Blocks whose enumeration may extend to bit-weight 4 at dead ends.
    std::vector<char> wide;

    long long cap_at(int block) const {
        return block < (int)caps.size() ? caps[block] : 1LL << 60;
    }
    bool wide_at(int block) const { return block < (int)wide.size() && wide[block]; }

    void init(int r, int ss, int ts) {
        radius = r;
        src_sites = ss;
        tgt_sites = ts;
        nblocks = 2 * ss;
        offs.clear();
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) offs.emplace_back(dx, dy);
        nslots = (int)offs.size() * ts;
        B = 2 * nslots;
        ncols = nblocks * B + 1;
        gram.assign(nblocks, std::vector<char>(nblocks, 0));
        for (int b = 0; b < nblocks; b += 2) gram[b][b + 1] = gram[b + 1][b] = 1;
    }

    int want_pairing(int ba, int bb, int dx, int dy) const {
        return (dx == 0 && dy == 0) ? gram[ba][bb] : 0;
    }

    int slot(int o, int site) const { return o * tgt_sites + site; }
    int local_bit(int o, int site, int part) const { return 2 * slot(o, site) + part; }
    /// Permuted column: later blocks get smaller positions so that RREF rows
    /// pivoted in the current block are supported there only.
    int col(int block, int local) const { return (nblocks - 1 - block) * B + local; }

    ImageTemplate to_template(const BitVec& w) const {
        ImageTemplate t;
        for (int o = 0; o < (int)offs.size(); ++o)
            for (int s = 0; s < tgt_sites; ++s) {
                if (w.get(local_bit(o, s, 0))) t.xs.push_back({offs[o].first, offs[o].second, s});
                if (w.get(local_bit(o, s, 1))) t.zs.push_back({offs[o].first, offs[o].second, s});
            }
        // display sign +1: stored phase must equal the X/Z overlap count
        int overlap = 0;
        for (const auto& x : t.xs)
            for (const auto& z : t.zs)
                if (x == z) ++overlap;
        t.phase_exp = overlap % 4;
        return t;
    }
};

/// Plane-level symplectic pairing between two block values.
int block_pairing(const SearchCtx& ctx, const BitVec& a, const BitVec& b, int dx, int dy) {
    int parity = 0;
    for (int oa = 0; oa < (int)ctx.offs.size(); ++oa) {
        int obx = ctx.offs[oa].first - dx, oby = ctx.offs[oa].second - dy;
        if (obx < -ctx.radius || obx > ctx.radius || oby < -ctx.radius || oby > ctx.radius)
            continue;
        int ob = (oby + ctx.radius) * (2 * ctx.radius + 1) + (obx + ctx.radius);
        for (int s = 0; s < ctx.tgt_sites; ++s) {
            parity ^= (int)(a.get(ctx.local_bit(oa, s, 0)) & b.get(ctx.local_bit(ob, s, 1)));
            parity ^= (int)(a.get(ctx.local_bit(oa, s, 1)) & b.get(ctx.local_bit(ob, s, 0)));
        }
    }
    return parity;
}

struct DfsState {
    std::vector<BitVec> fixed;  // block values, in block order
    long long nodes = 0;
};

bool dfs(const SearchCtx& ctx, Rref rref, DfsState& st, int block);

/// Fix a block to value w: unit-row equations plus pairing equations against
/// all later blocks. Returns false on contradiction.
bool fix_block(const SearchCtx& ctx, Rref& rref, const DfsState& st, int block, const BitVec& w) {
    for (int l = 0; l < ctx.B; ++l) {
        BitVec row(ctx.ncols);
        row.set(ctx.col(block, l));
        if (w.get(l)) row.set(ctx.ncols - 1);
        if (!rref.add(std::move(row))) return false;
    }
    int reach = 2 * ctx.radius;
    for (int hb = block + 1; hb < ctx.nblocks; ++hb) {
        for (int dy = -reach; dy <= reach; ++dy)
            for (int dx = -reach; dx <= reach; ++dx) {
                // pairing of w (anchor 0) with block hb anchored at (dx,dy):
                // sum over coinciding qubits of opposite parts
                BitVec row(ctx.ncols);
                bool nonzero = false;
                for (int oh = 0; oh < (int)ctx.offs.size(); ++oh) {
                    int owx = dx + ctx.offs[oh].first, owy = dy + ctx.offs[oh].second;
                    if (owx < -ctx.radius || owx > ctx.radius || owy < -ctx.radius ||
                        owy > ctx.radius)
                        continue;
                    int ow = (owy + ctx.radius) * (2 * ctx.radius + 1) + (owx + ctx.radius);
                    for (int s = 0; s < ctx.tgt_sites; ++s)
                        for (int part = 0; part < 2; ++part)
                            if (w.get(ctx.local_bit(ow, s, 1 - part))) {
                                row.flip(ctx.col(hb, ctx.local_bit(oh, s, part)));
                                nonzero = true;
                            }
                }
                int want = ctx.want_pairing(block, hb, dx, dy);
                if (want) row.flip(ctx.ncols - 1);
                if (!nonzero && !want) continue;
                if (!rref.add(std::move(row))) return false;
            }
    }
    return true;
}

bool map_search_debug() {
    static bool on = std::getenv("TOPOMAP_MAP_DEBUG") != nullptr;
    return on;
}

bool dfs(const SearchCtx& ctx, Rref rref, DfsState& st, int block) {
    if (block == ctx.nblocks) return true;
    if (++st.nodes > ctx.node_budget) return false;
    if (map_search_debug())
        fprintf(stderr, "[map] depth %d node %lld\n", block, st.nodes);

    // collect the equations fully supported on this block
    int lo = ctx.col(block, 0), hi = ctx.col(block, ctx.B - 1);
    std::vector<std::pair<BitVec, int>> eqs;  // restricted row, rhs
    for (size_t i = 0; i < rref.rows().size(); ++i) {
        int p = rref.pivots()[i];
        if (p < lo || p > hi) continue;
        BitVec small(ctx.B);
        for (int l = 0; l < ctx.B; ++l)
            if (rref.rows()[i].get(ctx.col(block, l))) small.set(l);
        eqs.emplace_back(std::move(small), (int)rref.rows()[i].get(ctx.ncols - 1));
    }

    int reach = 2 * ctx.radius;
    long long descents = 0;
    bool aborted = false;
    auto try_candidate = [&](const BitVec& w) {
        if (aborted) return true;  // stop enumerating; reported below
        if (++st.nodes > ctx.node_budget) {
            aborted = true;
            return true;
        }
        if (!w.any()) return false;
        for (const auto& [row, rhs] : eqs)
            if (row.and_parity(w) != rhs) return false;
        // self-pairing with own plane translates must vanish
        for (int dy = -reach; dy <= reach; ++dy)
            for (int dx = -reach; dx <= reach; ++dx) {
                if (dx == 0 && dy == 0) continue;
                if (block_pairing(ctx, w, w, dx, dy)) return false;
            }
        Rref child = rref;
        if (!fix_block(ctx, child, st, block, w)) return false;
        if (++descents > ctx.cap_at(block)) {
            aborted = true;
            return true;
        }
        if (map_search_debug() && block <= 7) {
            fprintf(stderr, "[map] descend d=%d w=", block);
            for (int o = 0; o < (int)ctx.offs.size(); ++o)
                for (int s = 0; s < ctx.tgt_sites; ++s)
                    for (int part = 0; part < 2; ++part)
                        if (w.get(ctx.local_bit(o, s, part)))
                            fprintf(stderr, " %d,%d,%d%c", ctx.offs[o].first, ctx.offs[o].second,
                                    s, part ? 'Z' : 'X');
            fprintf(stderr, "\n");
        }
        st.fixed.push_back(w);
        if (dfs(ctx, std::move(child), st, block + 1)) return true;
        st.fixed.pop_back();
        return false;
    };
    auto accepted = [&](bool hit) { return hit && !aborted; };

    if (ctx.block_candidates && block < (int)ctx.block_candidates->size() &&
        !(*ctx.block_candidates)[block].empty()) {
        // plane-pairing functional of a block value: pairing of each unit
        // generator with the value's full translation plane (column sums)
        auto phi_of = [&](const BitVec& w) {
            BitVec f(2 * ctx.tgt_sites);
            for (int s = 0; s < ctx.tgt_sites; ++s)
                for (int p = 0; p < 2; ++p) {
                    int par = 0;
                    for (int o = 0; o < (int)ctx.offs.size(); ++o)
                        par ^= (int)w.get(ctx.local_bit(o, s, 1 - p));
                    if (par) f.set(2 * s + p);
                }
            return f;
        };
        // the symplectic partner of pinned block i must pair 1 with plane i
        // and 0 with the other pinned planes: the functionals of the pinned
        // planes must stay linearly independent or no partner can exist
        Gf2Span phis(2 * ctx.tgt_sites);
        for (int b = 0; b < block; ++b)
            if (!(*ctx.block_candidates)[b].empty()) phis.add(phi_of(st.fixed[b]));
        const auto& list = (*ctx.block_candidates)[block];
        for (size_t i = 0; i < list.size(); ++i) {
            Gf2Span probe = phis;
            probe.add(phi_of(list[i]));
            if (probe.rank() == phis.rank()) continue;
            if (map_search_debug() && block <= 1)
                fprintf(stderr, "[map] depth %d override %zu/%zu\n", block, i, list.size());
            if (try_candidate(list[i])) return accepted(true);
        }
        if (map_search_debug())
            fprintf(stderr, "[map] depth %d exhausted overrides: %lld descents, %zu eqs\n",
                    block, descents, eqs.size());
        return false;
    }

    // small-system RREF of the block equations: if few variables stay free,
    // enumerate the full affine solution set (complete; low weight first)
    std::vector<BitVec> rrows;
    std::vector<int> rrhs, rpiv;
    std::vector<int> pivot_of_col(ctx.B, -1);
    for (const auto& [row0, rhs0] : eqs) {
        BitVec row = row0;
        int rhs = rhs0;
        for (;;) {
            int p = row.lowest_set();
            if (p < 0) break;
            int r = pivot_of_col[p];
            if (r < 0) {
                for (size_t i = 0; i < rrows.size(); ++i)
                    if (rrows[i].get(p)) {
                        rrows[i] ^= row;
                        rrhs[i] ^= rhs;
                    }
                pivot_of_col[p] = (int)rrows.size();
                rrows.push_back(std::move(row));
                rrhs.push_back(rhs);
                rpiv.push_back(p);
                break;
            }
            row ^= rrows[r];
            rhs ^= rrhs[r];
        }
    }
    std::vector<int> free_cols;
    for (int c = 0; c < ctx.B; ++c)
        if (pivot_of_col[c] < 0) free_cols.push_back(c);

    if (free_cols.size() <= 18) {
        BitVec particular(ctx.B);
        for (size_t i = 0; i < rrows.size(); ++i)
            if (rrhs[i]) particular.set(rpiv[i]);
        std::vector<BitVec> kernel;
        for (int f : free_cols) {
            BitVec k(ctx.B);
            k.set(f);
            for (size_t i = 0; i < rrows.size(); ++i)
                if (rrows[i].get(f)) k.flip(rpiv[i]);
            kernel.push_back(std::move(k));
        }
        std::vector<BitVec> sols;
        sols.reserve(1ull << free_cols.size());
        BitVec w = particular;
        sols.push_back(w);
        for (uint64_t mask = 1; mask < (1ull << free_cols.size()); ++mask) {
            w ^= kernel[std::countr_zero(mask)];  // Gray-code step
            sols.push_back(w);
        }
        std::stable_sort(sols.begin(), sols.end(), [](const BitVec& a, const BitVec& b) {
            int wa = a.popcount(), wb = b.popcount();
            if (wa != wb) return wa < wb;
            return a.words() < b.words();
        });
        for (const auto& s : sols)
            if (try_candidate(s)) return accepted(true);
        if (map_search_debug())
            fprintf(stderr, "[map] depth %d exhausted affine(%zu free): %lld descents, %zu eqs\n",
                    block, free_cols.size(), descents, eqs.size());
        return false;
    }

    // meet-in-the-middle enumeration of the bit-weight <= 3 solutions of the
    // induced equations (weight order; never sweeps non-solutions)
    int ne = (int)eqs.size();
    BitVec tgt_syn(std::max(ne, 1));
    for (int e = 0; e < ne; ++e)
        if (eqs[e].second) tgt_syn.set(e);
    std::vector<BitVec> colsyn(ctx.B, BitVec(std::max(ne, 1)));
    for (int e = 0; e < ne; ++e)
        for (int c = 0; c < ctx.B; ++c)
            if (eqs[e].first.get(c)) colsyn[c].set(e);
    auto hash_of = [](const BitVec& v) {
        uint64_t h = 0xcbf29ce484222325ull;
        for (uint64_t wd : v.words()) {
            h ^= wd;
            h *= 0x100000001b3ull;
        }
        return h;
    };
    auto emit = [&](std::initializer_list<int> set_cols) {
        BitVec w(ctx.B);
        for (int c : set_cols) w.set(c);
        return try_candidate(w);
    };
    for (int c = 0; c < ctx.B; ++c)
        if (colsyn[c] == tgt_syn && emit({c})) return accepted(true);
    std::unordered_map<uint64_t, std::vector<int>> by_sig;
    for (int c = 0; c < ctx.B; ++c) by_sig[hash_of(colsyn[c])].push_back(c);
    auto lookup = [&](const BitVec& want, int lo, auto&& fn) -> bool {
        auto it = by_sig.find(hash_of(want));
        if (it == by_sig.end()) return false;
        for (int c : it->second)
            if (c > lo && colsyn[c] == want && fn(c)) return true;
        return false;
    };
    for (int c1 = 0; c1 < ctx.B; ++c1) {
        BitVec want = tgt_syn;
        want ^= colsyn[c1];
        if (lookup(want, c1, [&](int c2) { return emit({c1, c2}); })) return accepted(true);
    }
    for (int c1 = 0; c1 < ctx.B; ++c1)
        for (int c2 = c1 + 1; c2 < ctx.B; ++c2) {
            BitVec want = tgt_syn;
            want ^= colsyn[c1];
            want ^= colsyn[c2];
            if (lookup(want, c2, [&](int c3) { return emit({c1, c2, c3}); }))
                return accepted(true);
        }
    // weight-4 extension (pairs meet pairs), only where wider images are
    // expected and the cheap stages found nothing to descend into
    if (ctx.wide_at(block) && descents == 0) {
        std::unordered_map<uint64_t, std::vector<std::pair<int, int>>> pair_sig;
        for (int c1 = 0; c1 < ctx.B; ++c1)
            for (int c2 = c1 + 1; c2 < ctx.B; ++c2) {
                BitVec s = colsyn[c1];
                s ^= colsyn[c2];
                pair_sig[hash_of(s)].emplace_back(c1, c2);
            }
        for (int c1 = 0; c1 < ctx.B; ++c1)
            for (int c2 = c1 + 1; c2 < ctx.B; ++c2) {
                BitVec want = tgt_syn;
                want ^= colsyn[c1];
                want ^= colsyn[c2];
                auto it = pair_sig.find(hash_of(want));
                if (it == pair_sig.end()) continue;
                for (auto [c3, c4] : it->second) {
                    if (c3 <= c2) continue;
                    BitVec s = colsyn[c3];
                    s ^= colsyn[c4];
                    if (!(s == want)) continue;
                    if (emit({c1, c2, c3, c4})) return accepted(true);
                }
            }
    }
    if (map_search_debug())
        fprintf(stderr, "[map] depth %d exhausted mitm(%zu free): %lld descents, %zu eqs\n",
                block, free_cols.size(), descents, eqs.size());
    return false;
}

int cell_sp(const BitVec& a, const BitVec& b, int sites) {
    int p = 0;
    for (int s = 0; s < sites; ++s)
        p ^= (a.get(s) & b.get(sites + s)) ^ (a.get(sites + s) & b.get(s));
    return p;
}

/// A basis of the single-cell Pauli space, in block processing order. The
/// coefficient of gens[b] in a cell vector v is cell_sp(v, duals[b]); the
/// search reproduces the basis' symplectic Gram matrix on the images.
struct CellBasis {
    std::vector<BitVec> gens, duals;
    std::vector<int> instance_blocks;  // blocks pinned to stabilizer templates
};

/// Dual vectors for an arbitrary cell basis: cell_sp(gens[a], duals[b]) is
/// the identity matrix. Returns false if gens is not a basis.
bool fill_duals(CellBasis& cb, int sites) {
    int D = 2 * sites;
    cb.duals.clear();
    for (int b = 0; b < D; ++b) {
        Rref solve(D + 1);
        for (int a = 0; a < D; ++a) {
            BitVec row(D + 1);
            for (int s = 0; s < sites; ++s) {
                if (cb.gens[a].get(s)) row.set(sites + s);
                if (cb.gens[a].get(sites + s)) row.set(s);
            }
            if (a == b) row.set(D);
            if (!solve.add(std::move(row))) return false;
        }
        BitVec d(D);
        for (size_t r = 0; r < solve.rows().size(); ++r)
            if (solve.rows()[r].get(D)) d.set(solve.pivots()[r]);
        cb.duals.push_back(std::move(d));
    }
    return true;
}

CellBasis identity_cell_basis(int sites) {
    CellBasis cb;
    for (int s = 0; s < sites; ++s) {
        BitVec x(2 * sites), z(2 * sites);
        x.set(s);
        z.set(sites + s);
        cb.gens.push_back(x);
        cb.gens.push_back(z);
        cb.duals.push_back(z);
        cb.duals.push_back(x);
    }
    return cb;
}

/// Cell vector (x parts then z parts) of a single-cell operator; nullopt when
/// the support spans more than one cell.
std::optional<BitVec> single_cell_vector(const PauliOperator& T, int sites) {
    std::optional<std::pair<int, int>> cell;
    BitVec v(2 * sites);
    auto visit = [&](const QubitIndex& q, int part) {
        std::pair<int, int> c{q.cx, q.cy};
        if (!cell) cell = c;
        if (*cell != c) return false;
        v.flip(part * sites + q.site);
        return true;
    };
    for (const auto& q : T.x_support())
        if (!visit(q, 0)) return std::nullopt;
    for (const auto& q : T.z_support())
        if (!visit(q, 1)) return std::nullopt;
    if (!cell) return std::nullopt;
    return v;
}

/// Basis whose first pairs are the source's single-cell stabilizer templates
/// with symplectic partners; remaining pairs complete the cell space. Images
/// of the pinned blocks can then be enumerated over target stabilizer
/// instances instead of free low-weight templates.
std::optional<CellBasis> cell_adapted_basis(const CodeDef& source) {
    int sites = source.lattice.sites_per_cell, D = 2 * sites;
    std::vector<BitVec> C;
    Gf2Span indep(D);
    for (const auto& T : source.stabilizer_templates) {
        auto v = single_cell_vector(T, sites);
        if (!v) continue;
        int r = indep.rank();
        indep.add(*v);
        if (indep.rank() > r) C.push_back(*v);
    }
    if (C.empty()) return std::nullopt;
    int m = (int)C.size();

    // complete the pinned templates with single-site unit generators: their
    // images stay as narrow as single-qubit images, which keeps the
    // backtracking enumeration within small bit weights
    CellBasis cb;
    cb.gens = C;
    for (int i = 0; i < m; ++i) cb.instance_blocks.push_back(i);
    Gf2Span span(D);
    for (const auto& c : C) span.add(c);
    // X_s and Z_s adjacent: the anticommutation constraint of a pair then
    // binds one level after the first member is chosen
    for (int s = 0; s < sites && (int)cb.gens.size() < D; ++s)
        for (int part = 0; part < 2; ++part) {
            BitVec e(D);
            e.set(part * sites + s);
            int r = span.rank();
            span.add(e);
            if (span.rank() > r) cb.gens.push_back(std::move(e));
        }
    if ((int)cb.gens.size() != D || !fill_duals(cb, sites)) return std::nullopt;
    return cb;
}

/// Candidate block values for a pinned stabilizer image: every target
/// stabilizer template instance that fits in the offset window, then products
/// of two of them. Deterministic order.
struct InstanceLists {
    std::vector<BitVec> zero_shift;  // template instances anchored at shift (0, 0)
    std::vector<BitVec> singles;     // all in-window instances, nearest shifts first
    std::vector<BitVec> with_pairs;  // singles followed by their pairwise products
};

InstanceLists instance_candidates(const SearchCtx& ctx, const CodeDef& target) {
    const LatticeSpec& lat = target.lattice;
    auto signer = [&](int c) { return c <= lat.L / 2 ? c : c - lat.L; };
    InstanceLists out;
    struct Entry {
        int norm, templ, oy, ox;
        BitVec w;
    };
    std::vector<Entry> entries;
    for (int t = 0; t < (int)target.stabilizer_templates.size(); ++t) {
        const auto& T = target.stabilizer_templates[t];
        for (int oy = -ctx.radius; oy <= ctx.radius; ++oy)
            for (int ox = -ctx.radius; ox <= ctx.radius; ++ox) {
                BitVec w(ctx.B);
                bool ok = true;
                auto put = [&](const QubitIndex& q, int part) {
                    int dx = signer(q.cx) + ox, dy = signer(q.cy) + oy;
                    if (dx < -ctx.radius || dx > ctx.radius || dy < -ctx.radius ||
                        dy > ctx.radius) {
                        ok = false;
                        return;
                    }
                    int o = (dy + ctx.radius) * (2 * ctx.radius + 1) + (dx + ctx.radius);
                    w.flip(ctx.local_bit(o, q.site, part));
                };
                for (const auto& q : T.x_support()) put(q, 0);
                for (const auto& q : T.z_support()) put(q, 1);
                if (!ok || !w.any()) continue;
                if (ox == 0 && oy == 0) out.zero_shift.push_back(w);
                entries.push_back({std::abs(ox) + std::abs(oy), t, oy, ox, std::move(w)});
            }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.norm, a.templ, a.oy, a.ox) < std::tie(b.norm, b.templ, b.oy, b.ox);
    });
    for (auto& e : entries) out.singles.push_back(std::move(e.w));
    out.with_pairs = out.singles;
    for (size_t a = 0; a < out.singles.size(); ++a)
        for (size_t b = a + 1; b < out.singles.size(); ++b) {
            BitVec w = out.singles[a];
            w ^= out.singles[b];
            if (w.any()) out.with_pairs.push_back(std::move(w));
        }
    return out;
}

int code_rank(const CodeDef& code) {
    Gf2Span span(2 * code.lattice.num_qubits());
    for (const auto& g : code.stabilizer_instances()) span.add(to_symplectic(g));
    return span.rank();
}

/// Per-pass search limits: descent caps by block class plus the node budget.
struct SearchLimits {
    long long budget = 400000;
    long long instance_cap = 1LL << 60;  // blocks pinned to stabilizer images
    long long site_cap = 1LL << 60;      // remaining (unit-generator) blocks
    bool wide = true;                    // allow bit-weight-4 dead-end enumeration
    /// Restrict the image of every X-type (Z-type) unit generator to a pure
    /// X-type (Z-type) template. Both codes are CSS, so this structured
    /// subclass is tried first; the unrestricted passes remain as fallback.
    bool css = false;
};

/// Set the locality bound, fix the image signs so stabilizer images match
/// the +1 convention (flipping the sign of generator g flips each template
/// image by its g-incidence parity), and run the full verification.
std::optional<LocalCliffordMap> polish_and_verify(LocalCliffordMap map, const CodeDef& source,
                                                  const CodeDef& target) {
    int nblocks = 2 * map.source_sites;
    int vmax = 0;
    for (const auto& t : map.images) vmax = std::max(vmax, t.offset_range() - 1);
    map.v = std::max(vmax, 0);

    PauliSpan tgt_span(target.lattice, target.stabilizer_instances());
    Rref signs(nblocks + 1);
    bool sign_ok = true;
    for (const auto& T : source.stabilizer_templates) {
        auto dec = tgt_span.in_span(apply(map, T));
        if (!dec) return std::nullopt;  // should not happen; constraints enforce it
        BitVec row(nblocks + 1);
        for (const auto& q : T.x_support()) row.flip(2 * q.site);
        for (const auto& q : T.z_support()) row.flip(2 * q.site + 1);
        if (dec->sign != 1) row.flip(nblocks);
        if (!signs.add(std::move(row))) sign_ok = false;
    }
    if (sign_ok) {
        BitVec flips(nblocks);
        for (size_t i = 0; i < signs.rows().size(); ++i)
            if (signs.rows()[i].get(nblocks)) flips.set(signs.pivots()[i]);
        for (int g = 0; g < nblocks; ++g)
            if (flips.get(g)) map.images[g].phase_exp = (map.images[g].phase_exp + 2) % 4;
    }

    auto rep = verify_code_map(map, source, target, source.lattice.L);
    if (!rep.group_map_ok) return std::nullopt;
    return map;
}

/// One full search pass in the given cell basis: linear membership rows,
/// backtracking over block images, sign fixing and final verification.
std::optional<LocalCliffordMap> attempt_search(const CodeDef& source, const CodeDef& target,
                                               int radius, const CellBasis& basis,
                                               const std::vector<std::vector<BitVec>>* cands,
                                               const SearchLimits& lim) {
    int L = source.lattice.L;
    SearchCtx ctx;
    ctx.init(radius, source.lattice.sites_per_cell, target.lattice.sites_per_cell);
    for (int a = 0; a < ctx.nblocks; ++a)
        for (int b = 0; b < ctx.nblocks; ++b)
            ctx.gram[a][b] =
                (char)cell_sp(basis.gens[a], basis.gens[b], source.lattice.sites_per_cell);
    ctx.block_candidates = cands;
    ctx.node_budget = lim.budget;
    std::vector<char> is_instance(ctx.nblocks, 0);
    for (int b : basis.instance_blocks) is_instance[b] = 1;
    ctx.caps.assign(ctx.nblocks, 1LL << 60);
    ctx.wide.assign(ctx.nblocks, 0);
    for (int b = 0; b < ctx.nblocks; ++b) {
        if (is_instance[b]) {
            ctx.caps[b] = lim.instance_cap;
        } else {
            ctx.caps[b] = lim.site_cap;
            ctx.wide[b] = lim.wide;
        }
    }
    int ss = ctx.src_sites;

    // incidence of each source template on the basis blocks: the image of a
    // template is the product of the block images at the listed cells
    struct Inc {
        int cx, cy, block;
    };
    std::vector<std::vector<Inc>> incidence;
    for (const auto& T : source.stabilizer_templates) {
        std::map<std::pair<int, int>, BitVec> pieces;
        auto acc = [&](const QubitIndex& q, int part) {
            auto it = pieces.try_emplace({q.cx, q.cy}, BitVec(2 * ss)).first;
            it->second.flip(part * ss + q.site);
        };
        for (const auto& q : T.x_support()) acc(q, 0);
        for (const auto& q : T.z_support()) acc(q, 1);
        std::vector<Inc> inc;
        for (const auto& [cell, v] : pieces)
            for (int b = 0; b < ctx.nblocks; ++b)
                if (cell_sp(v, basis.duals[b], ss)) inc.push_back({cell.first, cell.second, b});
        incidence.push_back(std::move(inc));
    }

    // linear constraints: every source stabilizer template's image lies in
    // the target stabilizer span on the torus
    Rref rref(ctx.ncols);
    std::vector<BitVec> tgt_rows;
    for (const auto& g : target.stabilizer_instances()) tgt_rows.push_back(to_symplectic(g));
    int N2 = 2 * target.lattice.num_qubits();
    auto dual = gf2_nullspace(tgt_rows, N2);
    LatticeSpec tgt = target.lattice;
    for (const auto& y : dual) {
        for (const auto& inc : incidence) {
            BitVec row(ctx.ncols);
            bool nonzero = false;
            for (const auto& e : inc) {
                for (int o = 0; o < (int)ctx.offs.size(); ++o) {
                    QubitIndex tq =
                        tgt.reduce(e.cx + ctx.offs[o].first, e.cy + ctx.offs[o].second, 0);
                    for (int s = 0; s < ctx.tgt_sites; ++s)
                        for (int tp = 0; tp < 2; ++tp) {
                            int torus_bit = tp * (N2 / 2) + tgt.linear({tq.cx, tq.cy, s});
                            if (y.get(torus_bit)) {
                                row.flip(ctx.col(e.block, ctx.local_bit(o, s, tp)));
                                nonzero = true;
                            }
                        }
                }
            }
            if (nonzero && !rref.add(std::move(row))) return std::nullopt;
        }
    }

    if (lim.css) {
        for (int b = 0; b < ctx.nblocks; ++b) {
            if (is_instance[b] || basis.gens[b].popcount() != 1) continue;
            int forbidden = 1 - (basis.gens[b].lowest_set() < ss ? 0 : 1);
            for (int o = 0; o < (int)ctx.offs.size(); ++o)
                for (int s = 0; s < ctx.tgt_sites; ++s) {
                    BitVec row(ctx.ncols);
                    row.set(ctx.col(b, ctx.local_bit(o, s, forbidden)));
                    if (!rref.add(std::move(row))) return std::nullopt;
                }
        }
    }

    DfsState st;
    bool hit = dfs(ctx, std::move(rref), st, 0);
    if (map_search_debug())
        fprintf(stderr, "[map] pass %s: nodes=%lld budget=%lld\n", hit ? "hit" : "done",
                st.nodes, ctx.node_budget);
    if (!hit) return std::nullopt;

    LocalCliffordMap map;
    map.source_name = source.name;
    map.target_name = target.name;
    map.source_sites = ctx.src_sites;
    map.target_sites = ctx.tgt_sites;
    // recover the per-site generator images from the basis-block images
    for (int s = 0; s < ss; ++s)
        for (int part = 0; part < 2; ++part) {
            BitVec e(2 * ss);
            e.set(part * ss + s);
            BitVec acc(ctx.B);
            for (int b = 0; b < ctx.nblocks; ++b)
                if (cell_sp(e, basis.duals[b], ss)) acc ^= st.fixed[b];
            map.images.push_back(ctx.to_template(acc));
        }
    return polish_and_verify(std::move(map), source, target);
}

// ---------------------------------------------------------------------------
// CSS-structured strategy. When every source template is pure X-type or pure
// Z-type, look for a map whose single-qubit X and Z generators have images in
// two complementary isotropic classes V and W: a per-target-site letter
// assignment puts one of {X, Z} at each site into V and the other into W.
// With the assignment constant on the site classes tied together by common
// target stabilizers, both the all-0 assignment (plain CSS images) and
// twisted assignments (e.g. X images carrying sigma_x on one code copy plus
// sigma_z on the other) are covered by the same machinery. Pinning the
// images of the single-cell source stabilizers to class-pure target
// instances makes everything else linear over GF(2): the W-side images
// satisfy a linear system (sums, pairings with the pinned V-instances, and
// membership of the remaining same-class stabilizer images), and once a
// W-side solution is fixed the V-side system is linear as well, with the
// cross pairings sp(x_s, z_t shifted) = [s = t][shift = 0] implying every
// remaining symplectic condition. Symplectic-form preservation makes the
// resulting translation-invariant map automatically invertible.
// ---------------------------------------------------------------------------

struct CssTemplate {
    int part = 0;                           // 0 = X-type, 1 = Z-type
    std::vector<std::array<int, 3>> sites;  // signed (dx, dy, site)
    bool single_cell = false;
};

std::optional<CssTemplate> css_template(const PauliOperator& p, const LatticeSpec& lat) {
    bool hasx = !p.x_support().empty(), hasz = !p.z_support().empty();
    if (hasx == hasz) return std::nullopt;
    CssTemplate t;
    t.part = hasx ? 0 : 1;
    auto signer = [&](int c) { return c <= lat.L / 2 ? c : c - lat.L; };
    for (const auto& q : (t.part == 0 ? p.x_support() : p.z_support()))
        t.sites.push_back({signer(q.cx), signer(q.cy), q.site});
    t.single_cell = std::all_of(t.sites.begin(), t.sites.end(),
                                [](const auto& a) { return a[0] == 0 && a[1] == 0; });
    return t;
}

using TgtBits = std::vector<std::array<int, 4>>;  // signed (dx, dy, site, letter)

struct CssProblem {
    int ss = 0, ts = 0, r = 0, W = 0, U = 0, N = 0, ncols = 0;
    std::vector<CssTemplate> src;
    std::vector<TgtBits> tgt;
    std::array<std::vector<int>, 2> singles;  // single-cell source templates per part
};

std::optional<LocalCliffordMap> css_aligned(const CodeDef& source, const CodeDef& target,
                                            const CssProblem& P, const std::vector<int>& swp,
                                            long long combo_budget) {
    const int ss = P.ss, ts = P.ts, r = P.r, W = P.W, U = P.U, N = P.N, ncols = P.ncols;
    const auto& src = P.src;
    const auto& tgt = P.tgt;
    auto off_ok = [&](int dx, int dy) { return dx >= -r && dx <= r && dy >= -r && dy <= r; };
    auto ubit = [&](int s, int dx, int dy, int site) {
        return s * U + ((dy + r) * W + (dx + r)) * ts + site;
    };
    // letter carried at a target site by the images of phase-`phase` source
    // generators (phase 0 = sigma_x units, phase 1 = sigma_z units)
    auto part_at = [&](int phase, int site) { return phase ^ swp[site]; };

    // candidate instances per phase: in-window shifts of the class-pure
    // target templates, nearest shifts first; the first pinned template is
    // held at shift zero (any solution with in-window translates can be
    // brought to this form)
    using Sites = std::vector<std::array<int, 3>>;
    auto gen_cands = [&](int phase, bool zero_only) {
        struct E {
            int norm, t, oy, ox;
            Sites sites;
        };
        std::vector<E> es;
        for (int t = 0; t < (int)tgt.size(); ++t) {
            bool pure = std::all_of(tgt[t].begin(), tgt[t].end(), [&](const auto& a) {
                return a[3] == part_at(phase, a[2]);
            });
            if (!pure) continue;
            for (int oy = -r; oy <= r; ++oy)
                for (int ox = -r; ox <= r; ++ox) {
                    if (zero_only && (ox != 0 || oy != 0)) continue;
                    Sites sites;
                    bool ok = true;
                    for (const auto& a : tgt[t]) {
                        if (!off_ok(a[0] + ox, a[1] + oy)) {
                            ok = false;
                            break;
                        }
                        sites.push_back({a[0] + ox, a[1] + oy, a[2]});
                    }
                    if (ok && !sites.empty())
                        es.push_back({std::abs(ox) + std::abs(oy), t, oy, ox, std::move(sites)});
                }
        }
        std::sort(es.begin(), es.end(), [](const E& a, const E& b) {
            return std::tie(a.norm, a.t, a.oy, a.ox) < std::tie(b.norm, b.t, b.oy, b.ox);
        });
        std::vector<Sites> out;
        for (auto& e : es) out.push_back(std::move(e.sites));
        return out;
    };
    // per-site column parity; pinned images need jointly independent parities
    auto phi_of = [&](const Sites& c, int phase) {
        BitVec f(2 * ts);
        for (const auto& a : c) f.flip(part_at(phase, a[2]) * ts + a[2]);
        return f;
    };

    // pinned templates in order: Z-type singles then X-type singles
    struct Pin {
        int tmpl = 0;  // source template index
        const Sites* image = nullptr;
    };
    std::vector<int> pin_order = P.singles[1];
    pin_order.insert(pin_order.end(), P.singles[0].begin(), P.singles[0].end());
    std::vector<std::vector<Sites>> pin_cands;
    for (int i = 0; i < (int)pin_order.size(); ++i)
        pin_cands.push_back(gen_cands(src[pin_order[i]].part, i == 0));
    for (const auto& pc : pin_cands)
        if (pc.empty()) return std::nullopt;  // alignment has no pure instances

    auto site_list = [&](int tmpl) {  // per-cell site indices of a single-cell template
        std::vector<int> out;
        for (const auto& a : src[tmpl].sites) out.push_back(a[2]);
        return out;
    };
    auto in_sites = [&](const Sites& sites, int dx, int dy, int s) {
        return std::find(sites.begin(), sites.end(), std::array<int, 3>{dx, dy, s}) !=
               sites.end();
    };

    // linear system of one part, given the pinned images and (for the X part)
    // the already-solved Z-side images
    auto build_rows = [&](int part, const std::vector<Pin>& pins,
                          const std::vector<BitVec>* zsol) -> std::optional<Rref> {
        Rref rref(ncols);
        auto add = [&](BitVec row) { return rref.add(std::move(row)); };
        // image sums of the pinned templates equal the chosen instances
        for (const auto& p : pins) {
            if (src[p.tmpl].part != part) continue;
            auto sl = site_list(p.tmpl);
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx)
                    for (int site = 0; site < ts; ++site) {
                        BitVec row(ncols);
                        for (int s : sl) row.flip(ubit(s, dx, dy, site));
                        if (in_sites(*p.image, dx, dy, site)) row.set(N);
                        if (!add(std::move(row))) return std::nullopt;
                    }
        }
        // pairings with the pinned opposite-part instances
        for (int s = 0; s < ss; ++s)
            for (const auto& p : pins) {
                if (src[p.tmpl].part == part) continue;
                for (int ddy = -2 * r; ddy <= 2 * r; ++ddy)
                    for (int ddx = -2 * r; ddx <= 2 * r; ++ddx) {
                        BitVec row(ncols);
                        bool nonzero = false;
                        for (const auto& a : *p.image)
                            if (off_ok(a[0] + ddx, a[1] + ddy)) {
                                row.flip(ubit(s, a[0] + ddx, a[1] + ddy, a[2]));
                                nonzero = true;
                            }
                        bool rhs = ddx == 0 && ddy == 0 && in_sites(src[p.tmpl].sites, 0, 0, s);
                        if (rhs) row.set(N);
                        if ((nonzero || rhs) && !add(std::move(row))) return std::nullopt;
                    }
            }
        // images of the remaining same-phase stabilizers commute with every
        // target stabilizer instance (membership constraints); only target
        // bits carrying the anticommuting letter contribute
        for (const auto& m : src) {
            if (m.part != part || m.single_cell) continue;
            for (const auto& g : tgt) {
                int D = 3 * r + 4;
                for (int ddy = -D; ddy <= D; ++ddy)
                    for (int ddx = -D; ddx <= D; ++ddx) {
                        BitVec row(ncols);
                        bool nonzero = false;
                        for (const auto& c : m.sites)
                            for (const auto& a : g) {
                                if (a[3] == part_at(part, a[2])) continue;
                                int dx = a[0] + ddx - c[0], dy = a[1] + ddy - c[1];
                                if (off_ok(dx, dy)) {
                                    row.flip(ubit(c[2], dx, dy, a[2]));
                                    nonzero = true;
                                }
                            }
                        if (nonzero && !add(std::move(row))) return std::nullopt;
                    }
            }
        }
        // cross pairings against the fixed Z-side images; these imply every
        // remaining symplectic condition of the map
        if (zsol) {
            for (int s = 0; s < ss; ++s)
                for (int t = 0; t < ss; ++t)
                    for (int ddy = -2 * r; ddy <= 2 * r; ++ddy)
                        for (int ddx = -2 * r; ddx <= 2 * r; ++ddx) {
                            BitVec row(ncols);
                            bool nonzero = false;
                            const BitVec& z = (*zsol)[t];
                            for (int dy = -r; dy <= r; ++dy)
                                for (int dx = -r; dx <= r; ++dx)
                                    for (int site = 0; site < ts; ++site) {
                                        if (!z.get(ubit(0, dx, dy, site) % U)) continue;
                                        if (!off_ok(dx + ddx, dy + ddy)) continue;
                                        row.flip(ubit(s, dx + ddx, dy + ddy, site));
                                        nonzero = true;
                                    }
                            bool rhs = s == t && ddx == 0 && ddy == 0;
                            if (rhs) row.set(N);
                            if ((nonzero || rhs) && !add(std::move(row))) return std::nullopt;
                        }
        }
        return rref;
    };

    // back-substitution: rows may still contain pivot columns of earlier
    // rows, but every column of a row is >= its own pivot, so processing in
    // descending pivot order finalizes each coordinate once
    auto backsolve = [&](const Rref& rref, const BitVec& seed, bool use_rhs) {
        const auto& rows = rref.rows();
        const auto& piv = rref.pivots();
        std::vector<int> order(rows.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return piv[a] > piv[b]; });
        BitVec v = seed;
        for (int i : order) {
            if (v.get(piv[i])) v.flip(piv[i]);
            int parity = use_rhs ? (int)rows[i].get(N) : 0;
            const auto& rw = rows[i].words();
            const auto& vw = v.words();
            size_t nw = std::min(rw.size(), vw.size());
            uint64_t acc = 0;
            for (size_t k = 0; k < nw; ++k) acc ^= rw[k] & vw[k];
            parity ^= (int)(std::popcount(acc) & 1);
            if (parity) v.set(piv[i]);
        }
        return v;
    };
    auto split_units = [&](const BitVec& v) {
        std::vector<BitVec> out(ss, BitVec(U));
        for (int s = 0; s < ss; ++s)
            for (int k = 0; k < U; ++k)
                if (v.get(s * U + k)) out[s].set(k);
        return out;
    };

    long long combos = 0;
    std::vector<Pin> pins(pin_order.size());
    Gf2Span phis(2 * ts);
    std::vector<int> phi_ranks;

    std::optional<LocalCliffordMap> found;
    long long zfeas = 0, xfeas = 0, verified_fail = 0;
    auto leaf = [&]() -> bool {
        auto zsys = build_rows(1, pins, nullptr);
        if (!zsys) return false;
        ++zfeas;
        if (map_search_debug() && zfeas <= 5)
            fprintf(stderr, "[map] css zfeas combo=%lld zfree=%d\n", combos,
                    N - (int)zsys->pivots().size());
        // deterministic retries over the Z-side solution space: the bilinear
        // coupling means not every Z-side solution admits an X-side one.
        // Arbitrary corners of the space tend to be degenerate (the unit
        // images fail to stay a basis), so steer the retries toward sparse
        // solutions by greedy weight minimization over the nullspace
        std::vector<int> piv_mark(N, 0);
        for (int p : zsys->pivots()) piv_mark[p] = 1;
        BitVec part0 = backsolve(*zsys, BitVec(N), true);
        std::vector<BitVec> nullbasis;
        for (int f = 0; f < N; ++f) {
            if (piv_mark[f]) continue;
            BitVec seed(N);
            seed.set(f);
            nullbasis.push_back(backsolve(*zsys, seed, false));
        }
        for (bool changed = true; changed;) {  // weight-reduce the basis itself
            changed = false;
            for (size_t i = 0; i < nullbasis.size(); ++i)
                for (size_t j = 0; j < nullbasis.size(); ++j) {
                    if (i == j) continue;
                    BitVec w = nullbasis[i];
                    w ^= nullbasis[j];
                    if (w.popcount() < nullbasis[i].popcount()) {
                        nullbasis[i] = std::move(w);
                        changed = true;
                    }
                }
        }
        // objective steering toward balanced, nondegenerate per-unit images:
        // total weight alone prefers degenerate solutions (colliding or
        // parity-singular units), which can never extend to an invertible map
        auto objective = [&](const BitVec& v) {
            long long obj = 0;
            std::vector<int> wt(ss, 0);
            std::vector<uint32_t> phi(ss, 0);  // per-site parity rows (ts <= 32)
            for (int s = 0; s < ss; ++s) {
                const auto& wd = v.words();
                for (int k = 0; k < U; ++k)
                    if (wd[(s * U + k) / 64] >> ((s * U + k) % 64) & 1) {
                        ++wt[s];
                        phi[s] ^= 1u << (k % ts);
                    }
            }
            for (int s = 0; s < ss; ++s) {
                if (wt[s] == 0) obj += 1 << 20;
                obj += (long long)wt[s] * wt[s];
            }
            if (ts <= 32) {  // site-parity matrix of the units must have full rank
                int rank = 0;
                for (int s = 0; s < ss; ++s) {
                    uint32_t row = phi[s];
                    for (bool again = true; again;) {
                        again = false;
                        for (int t = 0; t < s; ++t)
                            if (phi[t] && (row & (phi[t] & -phi[t]))) {
                                row ^= phi[t];
                                again = true;
                            }
                    }
                    phi[s] = row;
                    if (row) ++rank;
                }
                obj += (long long)(ss - rank) << 12;
            }
            return obj;
        };
        auto sparsify = [&](BitVec v) {
            long long cur = objective(v);
            for (bool changed = true; changed;) {
                changed = false;
                for (const auto& n : nullbasis) {
                    BitVec w = v;
                    w ^= n;
                    if (long long o = objective(w); o < cur) {
                        v = std::move(w);
                        cur = o;
                        changed = true;
                    }
                }
                if (!changed)  // escape shallow local minima with pairs
                    for (size_t i = 0; i < nullbasis.size() && !changed; ++i)
                        for (size_t j = i + 1; j < nullbasis.size() && !changed; ++j) {
                            BitVec w = v;
                            w ^= nullbasis[i];
                            w ^= nullbasis[j];
                            if (long long o = objective(w); o < cur) {
                                v = std::move(w);
                                cur = o;
                                changed = true;
                            }
                        }
            }
            return v;
        };
        // full translation-invariance rank on a small torus: unit images that
        // are not a module basis cannot belong to an invertible map
        auto full_rank = [&](const BitVec& v) {
            const int m = 4;
            if (m * m * ts > 256) return true;  // filter only for small cells
            using Row = std::array<uint64_t, 4>;
            auto top = [](const Row& a) {
                for (int w = 3; w >= 0; --w)
                    if (a[w]) return 64 * w + 63 - std::countl_zero(a[w]);
                return -1;
            };
            std::array<Row, 256> pivrow{};
            std::array<bool, 256> have{};
            for (int s = 0; s < ss; ++s)
                for (int by = 0; by < m; ++by)
                    for (int bx = 0; bx < m; ++bx) {
                        Row row{};
                        for (int dy = -r; dy <= r; ++dy)
                            for (int dx = -r; dx <= r; ++dx)
                                for (int site = 0; site < ts; ++site) {
                                    if (!v.get(ubit(s, dx, dy, site))) continue;
                                    int cx = ((bx + dx) % m + m) % m;
                                    int cy = ((by + dy) % m + m) % m;
                                    int bit = (cy * m + cx) * ts + site;
                                    row[bit / 64] ^= 1ull << (bit % 64);
                                }
                        for (int p = top(row); p >= 0; p = top(row)) {
                            if (!have[p]) {
                                pivrow[p] = row;
                                have[p] = true;
                                break;
                            }
                            for (int w = 0; w < 4; ++w) row[w] ^= pivrow[p][w];
                        }
                        if (top(row) < 0) return false;  // dependent unit image
                    }
            return true;
        };
        BitVec sparse0 = sparsify(part0);
        std::vector<BitVec> tries{sparse0};
        for (int f = 0; f < (int)nullbasis.size() && (int)tries.size() < 12; ++f) {
            BitVec v = sparse0;
            v ^= nullbasis[f];
            v = sparsify(std::move(v));
            if (std::find(tries.begin(), tries.end(), v) == tries.end())
                tries.push_back(std::move(v));
        }
        tries.push_back(part0);
        for (const auto& zv : tries) {
            if (!full_rank(zv)) continue;
            auto zu = split_units(zv);
            auto xsys = build_rows(0, pins, &zu);
            if (!xsys) continue;
            ++xfeas;
            auto xu = split_units(backsolve(*xsys, BitVec(N), true));
            LocalCliffordMap map;
            map.source_name = source.name;
            map.target_name = target.name;
            map.source_sites = ss;
            map.target_sites = ts;
            map.images.resize(2 * ss);
            for (int s = 0; s < ss; ++s)
                for (int dy = -r; dy <= r; ++dy)
                    for (int dx = -r; dx <= r; ++dx)
                        for (int site = 0; site < ts; ++site) {
                            int k = ubit(0, dx, dy, site);
                            if (xu[s].get(k)) {
                                auto& im = map.images[2 * s];
                                (part_at(0, site) == 0 ? im.xs : im.zs)
                                    .push_back({dx, dy, site});
                            }
                            if (zu[s].get(k)) {
                                auto& im = map.images[2 * s + 1];
                                (part_at(1, site) == 0 ? im.xs : im.zs)
                                    .push_back({dx, dy, site});
                            }
                        }
            if (auto m = polish_and_verify(std::move(map), source, target)) {
                found = std::move(m);
                return true;
            }
            ++verified_fail;
        }
        return false;
    };

    std::function<bool(int)> choose = [&](int level) -> bool {
        if (level == (int)pin_order.size()) {
            ++combos;
            return leaf();
        }
        for (const auto& cand : pin_cands[level]) {
            if (combos >= combo_budget) return false;
            BitVec f = phi_of(cand, src[pin_order[level]].part);
            int before = phis.rank();
            Gf2Span probe = phis;
            probe.add(f);
            if (probe.rank() == before) continue;  // pinned parities dependent
            pins[level] = {pin_order[level], &cand};
            phi_ranks.push_back(before);
            phis = probe;
            bool hit = choose(level + 1);
            // rebuild the parity span on backtrack
            phis = Gf2Span(2 * ts);
            phi_ranks.pop_back();
            for (int i = 0; i < level; ++i)
                phis.add(phi_of(*pins[i].image, src[pin_order[i]].part));
            if (hit) return true;
        }
        return false;
    };
    choose(0);
    if (map_search_debug()) {
        std::string align;
        for (int s = 0; s < ts; ++s) align += char('0' + swp[s]);
        fprintf(stderr,
                "[map] css align=%s: combos=%lld zfeas=%lld xfeas=%lld vfail=%lld %s\n",
                align.c_str(), combos, zfeas, xfeas, verified_fail, found ? "hit" : "done");
    }
    return found;
}

std::optional<LocalCliffordMap> attempt_css(const CodeDef& source, const CodeDef& target,
                                            int radius) {
    CssProblem P;
    P.ss = source.lattice.sites_per_cell;
    P.ts = target.lattice.sites_per_cell;
    P.r = radius;
    P.W = 2 * radius + 1;
    P.U = P.W * P.W * P.ts;
    P.N = P.ss * P.U;
    P.ncols = P.N + 1;
    for (const auto& T : source.stabilizer_templates) {
        auto t = css_template(T, source.lattice);
        if (!t) return std::nullopt;
        P.src.push_back(std::move(*t));
    }
    {
        auto signer = [&](int c) {
            return c <= target.lattice.L / 2 ? c : c - target.lattice.L;
        };
        for (const auto& T : target.stabilizer_templates) {
            TgtBits bits;
            for (const auto& q : T.x_support())
                bits.push_back({signer(q.cx), signer(q.cy), q.site, 0});
            for (const auto& q : T.z_support())
                bits.push_back({signer(q.cx), signer(q.cy), q.site, 1});
            if (bits.empty()) return std::nullopt;
            P.tgt.push_back(std::move(bits));
        }
    }
    for (int i = 0; i < (int)P.src.size(); ++i)
        if (P.src[i].single_cell) P.singles[P.src[i].part].push_back(i);
    if (P.singles[0].empty() || P.singles[1].empty()) return std::nullopt;

    // letter alignments are taken constant on the site classes tied together
    // by common target templates, so whole templates stay class-pure
    std::vector<int> comp(P.ts);
    for (int s = 0; s < P.ts; ++s) comp[s] = s;
    std::function<int(int)> root = [&](int a) {
        return comp[a] == a ? a : comp[a] = root(comp[a]);
    };
    for (const auto& bits : P.tgt)
        for (size_t i = 1; i < bits.size(); ++i) {
            int a = root(bits[0][2]), b = root(bits[i][2]);
            if (a != b) comp[std::max(a, b)] = std::min(a, b);
        }
    std::vector<int> ridx(P.ts, -1);
    int ncomp = 0;
    for (int s = 0; s < P.ts; ++s)
        if (root(s) == s) ridx[s] = ncomp++;
    std::vector<int> masks;
    if (ncomp <= 6)
        for (int m = 0; m < (1 << ncomp); ++m) masks.push_back(m);
    else
        masks = {0, (1 << ncomp) - 1};  // too many classes: uniform alignments only

    // cheap first rounds across all alignments before spending the full
    // pinning budget on any one of them
    for (long long cap : {1000LL, 200000LL})
        for (int mask : masks) {
            std::vector<int> swp(P.ts);
            for (int s = 0; s < P.ts; ++s) swp[s] = (mask >> ridx[root(s)]) & 1;
            if (auto m = css_aligned(source, target, P, swp, cap)) return m;
        }
    return std::nullopt;
}

}  // namespace

std::optional<LocalCliffordMap> find_map(const CodeDef& source, const CodeDef& target,
                                         int radius) {
    if (source.lattice.sites_per_cell != target.lattice.sites_per_cell) return std::nullopt;
    if (source.lattice.L != target.lattice.L)
        throw std::invalid_argument("find_map: source and target must share the torus size");
    // logical-count obstruction: a symplectic group isomorphism needs equal k
    int ks = source.lattice.num_qubits() - code_rank(source);
    int kt = target.lattice.num_qubits() - code_rank(target);
    if (ks != kt) return std::nullopt;
    int sites = source.lattice.sites_per_cell;

    // strategy 0: CSS-structured linear solve (pure-type generator images)
    if (auto m = attempt_css(source, target, radius)) return m;

    // strategy 1: search in a cell basis adapted to the source's single-cell
    // stabilizers, whose images are enumerated over target stabilizer
    // instances; the partner and complement blocks are found by propagation
    if (auto adapted = cell_adapted_basis(source);
        adapted && !adapted->instance_blocks.empty()) {
        SearchCtx probe;
        probe.init(radius, sites, sites);
        auto inst = instance_candidates(probe, target);
        // fast passes: images of the single-cell stabilizers are single
        // instances, with the first one anchored at shift zero (a solution
        // whose translate stays inside the offset window has this form)
        std::vector<std::vector<BitVec>> fast(2 * sites);
        for (int b : adapted->instance_blocks) fast[b] = inst.singles;
        fast[adapted->instance_blocks.front()] = inst.zero_shift;
        for (auto [wide, css] : {std::pair{false, true}, {true, true}, {false, false},
                                 {true, false}})
            if (auto m = attempt_search(
                    source, target, radius, *adapted, &fast,
                    SearchLimits{8000000, 1LL << 60, 1LL << 60, wide, css}))
                return m;
        // general passes: arbitrary shifts and products of two instances,
        // iterative deepening on the per-node descent caps so that weakly
        // constrained partner blocks stay nearly deterministic at first
        std::vector<std::vector<BitVec>> cands(2 * sites);
        for (int b : adapted->instance_blocks) cands[b] = inst.with_pairs;
        for (const SearchLimits& lim : {SearchLimits{300000, 8, 4},
                                        SearchLimits{1500000, 64, 16},
                                        SearchLimits{10000000, 1LL << 60, 1LL << 60}})
            if (auto m = attempt_search(source, target, radius, *adapted, &cands, lim))
                return m;
    }

    // strategy 2: unstructured search over the per-site generator images
    return attempt_search(source, target, radius, identity_cell_basis(sites), nullptr,
                          SearchLimits{});
}

// ---------------------------------------------------------------------------
// MapInstance
// ---------------------------------------------------------------------------

MapInstance::MapInstance(LocalCliffordMap map, CodeDef source, CodeDef target)
    : map_(std::move(map)),
      source_(std::move(source)),
      target_(std::move(target)),
      forward_(2 * target_.lattice.num_qubits(), /*track_combos=*/true),
      tgt_stab_(target_.stabilizer_instances()),
      syndrome_solver_(1) {
    if (source_.lattice.L != target_.lattice.L)
        throw std::invalid_argument("MapInstance: torus size mismatch");
    const LatticeSpec& src = source_.lattice;
    for (int q = 0; q < src.num_qubits(); ++q) {
        QubitIndex qi = src.from_linear(q);
        for (char letter : {'X', 'Z'}) {
            PauliOperator gen = PauliOperator::single(src, qi, letter);
            forward_.add(to_symplectic(apply(map_, gen)));
        }
    }
    if (forward_.rank() != 2 * src.num_qubits())
        throw std::invalid_argument("MapInstance: map is not invertible on this torus");

    // syndrome functionals: s_i(E) = <S_i, E>, i.e. the half-swapped vector
    auto stab = source_.stabilizer_instances();
    int n = src.num_qubits();
    std::vector<BitVec> rows;
    for (const auto& s : stab) {
        BitVec v = to_symplectic(s), r(2 * n);
        for (int b = 0; b < n; ++b) {
            if (v.get(b)) r.set(n + b);
            if (v.get(n + b)) r.set(b);
        }
        rows.push_back(std::move(r));
    }
    syndrome_solver_ = Gf2Span(2 * n, /*track_combos=*/true);
    syndrome_rows_ = std::move(rows);
    for (const auto& r : syndrome_rows_) syndrome_solver_.add(r);
}

PauliOperator MapInstance::pull_back(const PauliOperator& target_op) const {
    auto combo = forward_.decompose(to_symplectic(target_op));
    if (!combo) throw std::invalid_argument("pull_back: vector outside the image space");
    const LatticeSpec& src = source_.lattice;
    std::vector<QubitIndex> xs, zs;
    for (int q = 0; q < src.num_qubits(); ++q) {
        if (combo->get(2 * q)) xs.push_back(src.from_linear(q));
        if (combo->get(2 * q + 1)) zs.push_back(src.from_linear(q));
    }
    PauliOperator pre = PauliOperator(src, std::move(xs), std::move(zs), 0).unsigned_part();
    int delta = ((target_op.display_phase_exp() - apply(map_, pre).display_phase_exp()) % 4 + 4) %
                4;
    if (delta == 0) return pre;
    if (delta != 2) throw std::logic_error("pull_back: non-real phase ratio");
    return PauliOperator(src, std::vector<QubitIndex>(pre.x_support()),
                         std::vector<QubitIndex>(pre.z_support()),
                         (pre.phase_exp() + 2) % 4);
}

PauliOperator MapInstance::representative_error(const std::vector<uint8_t>& syndrome) const {
    if (syndrome.size() != syndrome_rows_.size())
        throw std::invalid_argument("representative_error: syndrome length mismatch");
    const LatticeSpec& src = source_.lattice;
    int n = src.num_qubits();
    // echelon rows: pivot = lowest set bit; rows may still contain later
    // pivots, so back-substitute in decreasing pivot order
    const auto& rows = syndrome_solver_.rows();
    std::vector<size_t> order(rows.size());
    for (size_t j = 0; j < rows.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return rows[a].lowest_set() > rows[b].lowest_set(); });
    BitVec e(2 * n);
    for (size_t j : order) {
        auto combo = syndrome_solver_.decompose(rows[j]);
        int rhs = 0;
        for (size_t i = 0; i < syndrome_rows_.size(); ++i)
            if (combo && combo->get((int)i) && syndrome[i]) rhs ^= 1;
        if (rhs ^ rows[j].and_parity(e)) e.flip(rows[j].lowest_set());
    }
    // consistency: dependent stabilizer relations must agree
    for (size_t i = 0; i < syndrome_rows_.size(); ++i)
        if (syndrome_rows_[i].and_parity(e) != (syndrome[i] & 1))
            throw std::invalid_argument("representative_error: inconsistent syndrome");
    std::vector<QubitIndex> xs, zs;
    for (int b = 0; b < n; ++b) {
        if (e.get(b)) xs.push_back(src.from_linear(b));
        if (e.get(n + b)) zs.push_back(src.from_linear(b));
    }
    return PauliOperator(src, std::move(xs), std::move(zs), 0).unsigned_part();
}

std::vector<uint8_t> MapInstance::push_syndrome(const std::vector<uint8_t>& source_syndrome) const {
    PauliOperator rep = representative_error(source_syndrome);
    PauliOperator img = apply(map_, rep);
    std::vector<uint8_t> out;
    out.reserve(tgt_stab_.size());
    for (const auto& t : tgt_stab_) out.push_back(commute_sign(t, img) == -1 ? 1 : 0);
    return out;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string format_map(const LocalCliffordMap& map) {
    std::ostringstream os;
    os << "cliffordmap v1\n";
    os << "source " << (map.source_name.empty() ? "?" : map.source_name) << " "
       << map.source_sites << "\n";
    os << "target " << (map.target_name.empty() ? "?" : map.target_name) << " "
       << map.target_sites << "\n";
    os << "locality " << map.v << "\n";
    for (const auto& a : map.ancilla_in) os << "ancilla_in " << a.site << " " << a.letter << "\n";
    for (const auto& a : map.ancilla_out)
        os << "ancilla_out " << a.site << " " << a.letter << "\n";
    const char letters[2] = {'X', 'Z'};
    for (int s = 0; s < map.source_sites; ++s)
        for (int p = 0; p < 2; ++p) {
            const auto& t = map.images[2 * s + p];
            os << "image " << s << " " << letters[p] << " ";
            // reuse the operator text format on a large scratch torus so
            // signed offsets survive the round trip
            int R = 1;
            for (const auto& o : t.xs) R = std::max({R, std::abs(o[0]), std::abs(o[1])});
            for (const auto& o : t.zs) R = std::max({R, std::abs(o[0]), std::abs(o[1])});
            os << (2 * R + 1) << " ";
            LatticeSpec scratch(map.target_sites, 2 * R + 1);
            os << format_operator(t.instantiate(scratch, R, R)) << "\n";
        }
    return os.str();
}

LocalCliffordMap parse_map(const std::string& text) {
    LocalCliffordMap map;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "cliffordmap v1")
        throw std::invalid_argument("parse_map: bad header");
    std::map<std::pair<int, char>, ImageTemplate> images;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "source") {
            ls >> map.source_name >> map.source_sites;
        } else if (kw == "target") {
            ls >> map.target_name >> map.target_sites;
        } else if (kw == "locality") {
            ls >> map.v;
        } else if (kw == "ancilla_in" || kw == "ancilla_out") {
            SiteLetter a;
            ls >> a.site >> a.letter;
            (kw == "ancilla_in" ? map.ancilla_in : map.ancilla_out).push_back(a);
        } else if (kw == "image") {
            int site = 0, Lscratch = 0;
            char letter = 0;
            ls >> site >> letter >> Lscratch;
            std::string rest;
            std::getline(ls, rest);
            LatticeSpec scratch(map.target_sites, Lscratch);
            PauliOperator p = parse_operator(scratch, rest);
            int R = Lscratch / 2;
            ImageTemplate t;
            for (const auto& q : p.x_support()) t.xs.push_back({q.cx - R, q.cy - R, q.site});
            for (const auto& q : p.z_support()) t.zs.push_back({q.cx - R, q.cy - R, q.site});
            t.phase_exp = p.phase_exp();
            images[{site, letter}] = std::move(t);
        } else {
            throw std::invalid_argument("parse_map: unknown keyword " + kw);
        }
    }
    map.images.resize(2 * map.source_sites);
    for (int s = 0; s < map.source_sites; ++s) {
        map.images[2 * s] = images.at({s, 'X'});
        map.images[2 * s + 1] = images.at({s, 'Z'});
    }
    return map;
}

}  // namespace topomap
