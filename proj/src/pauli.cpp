#include "topomap/pauli.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace topomap {

namespace {

std::vector<QubitIndex> canonicalize(const LatticeSpec& shape, std::vector<QubitIndex> v) {
    for (auto& q : v) {
        if (q.site < 0 || q.site >= shape.sites_per_cell)
            throw std::invalid_argument("site index out of range for lattice");
        q = shape.reduce(q.cx, q.cy, q.site);
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

/// XOR of sorted sets.
std::vector<QubitIndex> sym_diff(const std::vector<QubitIndex>& a, const std::vector<QubitIndex>& b) {
    std::vector<QubitIndex> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

int overlap_parity(const std::vector<QubitIndex>& a, const std::vector<QubitIndex>& b) {
    size_t i = 0, j = 0;
    int par = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            par ^= 1;
            ++i;
            ++j;
        }
    }
    return par;
}

int overlap_count(const std::vector<QubitIndex>& a, const std::vector<QubitIndex>& b) {
    size_t i = 0, j = 0;
    int n = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else { ++n; ++i; ++j; }
    }
    return n;
}

/// Minimal cyclic interval length (in cells) covering the coordinate set.
int covering_extent(std::vector<int> coords, int L) {
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    int m = (int)coords.size();
    if (m == 0) return 0;
    int max_gap = coords.front() + L - coords.back() - 1;
    for (int i = 0; i + 1 < m; ++i) max_gap = std::max(max_gap, coords[i + 1] - coords[i] - 1);
    return L - max_gap;
}

}  // namespace

PauliOperator::PauliOperator(LatticeSpec shape, std::vector<QubitIndex> xs,
                             std::vector<QubitIndex> zs, int phase_exp)
    : shape_(std::move(shape)),
      xs_(canonicalize(shape_, std::move(xs))),
      zs_(canonicalize(shape_, std::move(zs))),
      phase_(((phase_exp % 4) + 4) % 4) {}

PauliOperator PauliOperator::single(const LatticeSpec& shape, const QubitIndex& q, char letter) {
    switch (letter) {
        case 'X': return PauliOperator(shape, {q}, {}, 0);
        case 'Z': return PauliOperator(shape, {}, {q}, 0);
        case 'Y': return PauliOperator(shape, {q}, {q}, 1);  // Y = i X Z
        default: throw std::invalid_argument("Pauli letter must be X, Y or Z");
    }
}

std::vector<QubitIndex> PauliOperator::support() const {
    std::vector<QubitIndex> out;
    out.reserve(xs_.size() + zs_.size());
    std::set_union(xs_.begin(), xs_.end(), zs_.begin(), zs_.end(), std::back_inserter(out));
    return out;
}

int PauliOperator::weight() const {
    return (int)xs_.size() + (int)zs_.size() - overlap_count(xs_, zs_);
}

int PauliOperator::display_phase_exp() const {
    return ((phase_ - overlap_count(xs_, zs_)) % 4 + 4) % 4;
}

PauliOperator PauliOperator::translated(int dx, int dy) const {
    std::vector<QubitIndex> xs = xs_, zs = zs_;
    for (auto& q : xs) q = shape_.reduce(q.cx + dx, q.cy + dy, q.site);
    for (auto& q : zs) q = shape_.reduce(q.cx + dx, q.cy + dy, q.site);
    PauliOperator out(shape_);
    std::sort(xs.begin(), xs.end());
    std::sort(zs.begin(), zs.end());
    out.xs_ = std::move(xs);
    out.zs_ = std::move(zs);
    out.phase_ = phase_;
    return out;
}

PauliOperator PauliOperator::unsigned_part() const {
    PauliOperator out = *this;
    out.phase_ = overlap_count(xs_, zs_) % 4;  // display phase +1
    return out;
}

PauliOperator operator*(const PauliOperator& p, const PauliOperator& q) {
    if (!p.shape_.same_shape(q.shape_))
        throw std::invalid_argument("Pauli multiply: mismatched lattice dimensions");
    PauliOperator out(p.shape_);
    // (i^k1 X^a1 Z^b1)(i^k2 X^a2 Z^b2): moving Z^b1 across X^a2 costs (-1)^(b1.a2)
    out.phase_ = (p.phase_ + q.phase_ + 2 * overlap_parity(p.zs_, q.xs_)) % 4;
    out.xs_ = sym_diff(p.xs_, q.xs_);
    out.zs_ = sym_diff(p.zs_, q.zs_);
    return out;
}

int commute_sign(const PauliOperator& p, const PauliOperator& q) {
    if (!p.shape().same_shape(q.shape()))
        throw std::invalid_argument("commute_sign: mismatched lattice dimensions");
    int par = overlap_parity(p.x_support(), q.z_support()) ^
              overlap_parity(p.z_support(), q.x_support());
    return par ? -1 : 1;
}

int range_of(const PauliOperator& p) {
    auto supp = p.support();
    if (supp.empty()) return 0;
    std::vector<int> xs, ys;
    xs.reserve(supp.size());
    ys.reserve(supp.size());
    for (const auto& q : supp) {
        xs.push_back(q.cx);
        ys.push_back(q.cy);
    }
    int L = p.shape().L;
    return std::max(covering_extent(std::move(xs), L), covering_extent(std::move(ys), L));
}

std::string format_operator(const PauliOperator& p) {
    static const char* phases[4] = {"+1", "+i", "-1", "-i"};
    std::ostringstream os;
    os << phases[p.display_phase_exp()] << ";";
    size_t i = 0, j = 0;
    const auto& xs = p.x_support();
    const auto& zs = p.z_support();
    auto emit = [&os](const QubitIndex& q, char letter) {
        os << ' ' << q.cx << ',' << q.cy << ',' << q.site << ':' << letter;
    };
    while (i < xs.size() || j < zs.size()) {
        if (j >= zs.size() || (i < xs.size() && xs[i] < zs[j])) {
            emit(xs[i], 'X');
            ++i;
        } else if (i >= xs.size() || zs[j] < xs[i]) {
            emit(zs[j], 'Z');
            ++j;
        } else {
            emit(xs[i], 'Y');
            ++i;
            ++j;
        }
    }
    return os.str();
}

PauliOperator parse_operator(const LatticeSpec& shape, const std::string& line) {
    auto semi = line.find(';');
    if (semi == std::string::npos) throw std::invalid_argument("operator line missing ';'");
    std::string ph = line.substr(0, semi);
    // strip spaces
    ph.erase(std::remove(ph.begin(), ph.end(), ' '), ph.end());
    int phase_exp;
    if (ph == "+1" || ph == "1") phase_exp = 0;
    else if (ph == "+i" || ph == "i") phase_exp = 1;
    else if (ph == "-1") phase_exp = 2;
    else if (ph == "-i") phase_exp = 3;
    else throw std::invalid_argument("bad phase token: " + ph);

    PauliOperator out = PauliOperator::identity(shape);
    std::istringstream is(line.substr(semi + 1));
    std::string tok;
    while (is >> tok) {
        int x, y, s;
        char colon, letter;
        char c1, c2;
        std::istringstream ts(tok);
        if (!(ts >> x >> c1 >> y >> c2 >> s >> colon >> letter) || c1 != ',' || c2 != ',' ||
            colon != ':')
            throw std::invalid_argument("bad site token: " + tok);
        out = out * PauliOperator::single(shape, shape.reduce(x, y, s), letter);
    }
    // phase token is the display phase of the whole product
    int delta = ((phase_exp - out.display_phase_exp()) % 4 + 4) % 4;
    return PauliOperator(shape, out.x_support(), out.z_support(), out.phase_exp() + delta);
}

std::ostream& operator<<(std::ostream& os, const PauliOperator& p) {
    return os << format_operator(p);
}

}  // namespace topomap
