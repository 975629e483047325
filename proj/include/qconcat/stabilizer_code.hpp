#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qconcat/bitvec.hpp"
#include "qconcat/gf2.hpp"
#include "qconcat/pauli.hpp"

namespace qconcat {

// Label of a logical (coset) class: 2k bits for a code with k logical qubits.
// Bit j       (0 <= j < k): the operator anticommutes with logical Z_j,
//                           i.e. it carries logical X on qubit j.
// Bit k + j             : the operator anticommutes with logical X_j.
class LogicalClass {
  public:
    LogicalClass() = default;
    explicit LogicalClass(std::size_t k) : bits_(2 * k) {}
    explicit LogicalClass(BitVec bits) : bits_(std::move(bits)) {
        if (bits_.size() % 2 != 0) throw std::invalid_argument("LogicalClass: needs 2k bits");
    }
    static LogicalClass from_packed(std::size_t k, std::uint64_t packed) {
        if (2 * k > 64) throw std::invalid_argument("LogicalClass: packed form needs 2k <= 64");
        return LogicalClass(BitVec::from_word(2 * k, packed));
    }

    std::size_t k() const { return bits_.size() / 2; }
    const BitVec& bits() const { return bits_; }
    bool is_trivial() const { return !bits_.any(); }

    bool x_bit(std::size_t j) const { return bits_.get(j); }
    bool z_bit(std::size_t j) const { return bits_.get(k() + j); }
    void set_x_bit(std::size_t j, bool v = true) { bits_.set(j, v); }
    void set_z_bit(std::size_t j, bool v = true) { bits_.set(k() + j, v); }

    std::uint64_t packed() const {
        if (bits_.size() > 64) throw std::logic_error("LogicalClass: too wide to pack");
        return bits_.low_word();
    }

    LogicalClass operator^(const LogicalClass& o) const { return LogicalClass(bits_ ^ o.bits_); }
    bool operator==(const LogicalClass& o) const { return bits_ == o.bits_; }
    bool operator!=(const LogicalClass& o) const { return bits_ != o.bits_; }
    bool operator<(const LogicalClass& o) const { return bits_ < o.bits_; }

    std::string str() const { return bits_.str(); }

  private:
    BitVec bits_;
};

// An [[n, k]] stabilizer code: n - k independent commuting generators plus a
// symplectic basis of logical X/Z operators. On construction the code builds
// a complete minimum-weight coset-leader table indexed by syndrome, so n is
// limited to 63 qubits and n - k to 20 syndrome bits.
class StabilizerCode {
  public:
    StabilizerCode(std::vector<Pauli> generators, std::vector<Pauli> logical_x, std::vector<Pauli> logical_z,
                   std::optional<int> distance = std::nullopt)
        : gens_(std::move(generators)), lx_(std::move(logical_x)), lz_(std::move(logical_z)), distance_(distance) {
        validate();
        pack();
        build_leader_table();
        build_fast_tables();
    }

    // CSS construction: rows of hx become X-type generators, rows of hz
    // Z-type generators. Logical operators are derived deterministically from
    // the kernels of hz / hx reduced modulo the respective row spaces.
    static StabilizerCode css(const Gf2Mat& hx, const Gf2Mat& hz, std::optional<int> distance = std::nullopt);

    // [[15,7,3]] quantum Hamming code: hx = hz = parity-check matrix of the
    // [15,11,3] Hamming code (column q is the binary expansion of q + 1).
    static StabilizerCode quantum_hamming_15_7_3();

    // [[4,2,2]] error-detecting code: hx = hz = [1 1 1 1].
    static StabilizerCode code_422();

    std::size_t n() const { return n_; }
    std::size_t k() const { return lx_.size(); }
    std::size_t num_generators() const { return gens_.size(); }
    std::optional<int> distance() const { return distance_; }

    const std::vector<Pauli>& stabilizers() const { return gens_; }
    const std::vector<Pauli>& logical_x() const { return lx_; }
    const std::vector<Pauli>& logical_z() const { return lz_; }

    // --- general (Pauli-level) interface ---

    BitVec syndrome(const Pauli& e) const {
        if (e.size() != n_) throw std::invalid_argument("StabilizerCode: operator size mismatch");
        return unpack_syndrome(synd_pair(e.x().low_word(), e.z().low_word()));
    }

    // Logical class of e relative to the recovery frame: the label of L in
    // the decomposition e = L * S * T(syndrome(e)). Stabilizer-invariant, and
    // trivial exactly when e is corrected by T.

    // Minimum-weight representative of the coset with syndrome s; ties are
    // broken toward the smallest (x, z) bit pattern.
    Pauli recovery(const BitVec& s) const {
        const auto& e = leaders_.at(pack_syndrome(s));
        return Pauli(BitVec::from_word(n_, e.x), BitVec::from_word(n_, e.z));
    }

    LogicalClass logical_class(const Pauli& e) const {
        if (e.size() != n_) throw std::invalid_argument("StabilizerCode: operator size mismatch");
        return LogicalClass::from_packed(k(), class_pair(e.x().low_word(), e.z().low_word()));
    }

    // The canonical member of class L within the syndrome-s coset:
    // recovery(s) adjusted by logical operators.
    Pauli class_representative(const LogicalClass& L, const BitVec& s) const {
        if (L.k() != k()) throw std::invalid_argument("StabilizerCode: class label size mismatch");
        Pauli rep = recovery(s);
        LogicalClass delta = logical_class(rep) ^ L;
        for (std::size_t j = 0; j < k(); ++j) {
            if (delta.x_bit(j)) rep *= lx_[j];
            if (delta.z_bit(j)) rep *= lz_[j];
        }
        return rep;
    }

    // --- packed X-only fast path (bit-flip channel) ---
    // Masks are little-endian over qubits; syndromes are packed with bit g =
    // generator g.

    std::uint32_t synd_x(std::uint64_t x) const {
        if (synd_x_table_.size()) return synd_x_table_[x];
        return synd_x_slow(x);
    }
    std::uint32_t synd_pair(std::uint64_t x, std::uint64_t z) const {
        std::uint32_t s = 0;
        for (std::size_t g = 0; g < gens_.size(); ++g) {
            bool b = (std::popcount(x & gz_[g]) ^ std::popcount(z & gx_[g])) & 1;
            s |= std::uint32_t{b} << g;
        }
        return s;
    }

    // k-bit logical-X label (recovery frame) of a pure-X operator; the z
    // half of the class vanishes whenever x_only_ok().
    std::uint32_t class_x(std::uint64_t x) const {
        if (class_x_table_.size()) return class_x_table_[x];
        return class_x_slow(x);
    }
    std::uint64_t class_pair(std::uint64_t x, std::uint64_t z) const {
        return raw_pattern(x, z) ^ leaders_[synd_pair(x, z)].cls;
    }

    // Coset-leader x mask for a syndrome reachable by X-only errors. Only
    // meaningful when x_only_ok(); callers on the fast path must check once.
    std::uint64_t leader_x(std::uint32_t s) const { return leaders_[s].x; }
    std::uint64_t leader_z(std::uint32_t s) const { return leaders_[s].z; }
    std::size_t leader_weight(std::uint32_t s) const { return leaders_[s].weight; }

    // True when every syndrome reachable by an X-only error has a pure-X
    // coset leader and the logical X operators have no z part; the packed
    // X-only decoding paths require this.
    bool x_only_ok() const { return x_only_ok_; }

    std::uint32_t pack_syndrome(const BitVec& s) const {
        if (s.size() != gens_.size()) throw std::invalid_argument("StabilizerCode: syndrome size mismatch");
        return static_cast<std::uint32_t>(s.low_word());
    }
    BitVec unpack_syndrome(std::uint32_t s) const { return BitVec::from_word(gens_.size(), s); }

    // --- serialization ---
    // Text format: "n k" on the first line, then n - k stabilizer strings,
    // k logical X strings and k logical Z strings, one per line. Blank lines
    // and lines starting with '#' are skipped.
    static StabilizerCode load(std::istream& in, std::optional<int> distance = std::nullopt);
    void save(std::ostream& out) const;

  private:
    struct Leader {
        std::uint64_t x = 0, z = 0;
        std::uint64_t cls = 0;       // raw commutation pattern of the leader
        std::uint8_t weight = 0xff;  // 0xff = unset during construction
    };

    void validate();
    void pack();
    void build_leader_table();
    void build_fast_tables();

    std::uint32_t synd_x_slow(std::uint64_t x) const {
        std::uint32_t s = 0;
        for (std::size_t g = 0; g < gens_.size(); ++g) s |= std::uint32_t{static_cast<std::uint32_t>(std::popcount(x & gz_[g]) & 1)} << g;
        return s;
    }

    // Commutation pattern with the logical duals, before recovery-frame
    // adjustment: bit j = anticommutes with logical Z_j, bit k + j = with
    // logical X_j.
    std::uint64_t raw_pattern(std::uint64_t x, std::uint64_t z) const {
        std::uint64_t c = 0;
        for (std::size_t j = 0; j < k(); ++j) {
            bool xb = (std::popcount(x & lzz_[j]) ^ std::popcount(z & lzx_[j])) & 1;
            bool zb = (std::popcount(x & lxz_[j]) ^ std::popcount(z & lxx_[j])) & 1;
            c |= std::uint64_t{xb} << j;
            c |= std::uint64_t{zb} << (k() + j);
        }
        return c;
    }

    std::uint32_t class_x_slow(std::uint64_t x) const {
        std::uint32_t c = 0;
        for (std::size_t j = 0; j < k(); ++j) c |= std::uint32_t{static_cast<std::uint32_t>(std::popcount(x & lzz_[j]) & 1)} << j;
        const std::uint64_t kmask = (std::uint64_t{1} << k()) - 1;
        return c ^ static_cast<std::uint32_t>(leaders_[synd_x_slow(x)].cls & kmask);
    }

    std::size_t n_ = 0;
    std::vector<Pauli> gens_, lx_, lz_;
    std::optional<int> distance_;

    // packed copies of the generator / logical supports
    std::vector<std::uint64_t> gx_, gz_, lxx_, lxz_, lzx_, lzz_;

    std::vector<Leader> leaders_;              // indexed by packed syndrome
    std::vector<std::uint32_t> synd_x_table_;  // 2^n entries when n <= 16
    std::vector<std::uint32_t> class_x_table_;
    bool x_only_ok_ = false;
};

inline void StabilizerCode::validate() {
    if (gens_.empty() && lx_.empty()) throw std::invalid_argument("StabilizerCode: empty definition");
    n_ = gens_.empty() ? lx_[0].size() : gens_[0].size();
    if (n_ == 0 || n_ > 63) throw std::invalid_argument("StabilizerCode: supported sizes are 1..63 qubits");
    if (lx_.size() != lz_.size()) throw std::invalid_argument("StabilizerCode: logical X/Z counts differ");
    if (gens_.size() + lx_.size() != n_)
        throw std::invalid_argument("StabilizerCode: need n - k generators and k logical pairs (n=" +
                                    std::to_string(n_) + ", generators=" + std::to_string(gens_.size()) +
                                    ", k=" + std::to_string(lx_.size()) + ")");
    if (gens_.size() > 20) throw std::invalid_argument("StabilizerCode: more than 20 generators unsupported");
    if (lx_.size() > 32) throw std::invalid_argument("StabilizerCode: more than 32 logical qubits unsupported");

    auto check_size = [&](const Pauli& p, const char* what, std::size_t i) {
        if (p.size() != n_)
            throw std::invalid_argument(std::string("StabilizerCode: ") + what + " " + std::to_string(i) +
                                        " acts on " + std::to_string(p.size()) + " qubits, expected " +
                                        std::to_string(n_));
    };
    for (std::size_t i = 0; i < gens_.size(); ++i) check_size(gens_[i], "generator", i);
    for (std::size_t i = 0; i < lx_.size(); ++i) check_size(lx_[i], "logical X", i);
    for (std::size_t i = 0; i < lz_.size(); ++i) check_size(lz_[i], "logical Z", i);

    for (std::size_t i = 0; i < gens_.size(); ++i)
        for (std::size_t j = i + 1; j < gens_.size(); ++j)
            if (!gens_[i].commutes_with(gens_[j]))
                throw std::invalid_argument("StabilizerCode: generators " + std::to_string(i) + " and " +
                                            std::to_string(j) + " anticommute");

    // Independence: the symplectic rows (x|z) must have full rank.
    Gf2Mat sym(gens_.size(), 2 * n_);
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        for (std::size_t q = 0; q < n_; ++q) {
            if (gens_[i].x().get(q)) sym.set(i, q);
            if (gens_[i].z().get(q)) sym.set(i, n_ + q);
        }
    }
    if (sym.rank() != gens_.size()) throw std::invalid_argument("StabilizerCode: generators are not independent");

    for (std::size_t i = 0; i < lx_.size(); ++i) {
        for (std::size_t g = 0; g < gens_.size(); ++g) {
            if (!lx_[i].commutes_with(gens_[g]))
                throw std::invalid_argument("StabilizerCode: logical X " + std::to_string(i) +
                                            " anticommutes with generator " + std::to_string(g));
            if (!lz_[i].commutes_with(gens_[g]))
                throw std::invalid_argument("StabilizerCode: logical Z " + std::to_string(i) +
                                            " anticommutes with generator " + std::to_string(g));
        }
        for (std::size_t j = 0; j < lx_.size(); ++j) {
            bool anti_xz = !lx_[i].commutes_with(lz_[j]);
            if (anti_xz != (i == j))
                throw std::invalid_argument("StabilizerCode: logical X " + std::to_string(i) + " / Z " +
                                            std::to_string(j) + " violate the symplectic pairing");
            if (j > i) {
                if (!lx_[i].commutes_with(lx_[j]))
                    throw std::invalid_argument("StabilizerCode: logical X operators " + std::to_string(i) +
                                                " and " + std::to_string(j) + " anticommute");
                if (!lz_[i].commutes_with(lz_[j]))
                    throw std::invalid_argument("StabilizerCode: logical Z operators " + std::to_string(i) +
                                                " and " + std::to_string(j) + " anticommute");
            }
        }
    }
}

inline void StabilizerCode::pack() {
    auto low = [](const BitVec& v) { return v.low_word(); };
    for (const auto& g : gens_) {
        gx_.push_back(low(g.x()));
        gz_.push_back(low(g.z()));
    }
    for (const auto& l : lx_) {
        lxx_.push_back(low(l.x()));
        lxz_.push_back(low(l.z()));
    }
    for (const auto& l : lz_) {
        lzx_.push_back(low(l.x()));
        lzz_.push_back(low(l.z()));
    }
}

inline void StabilizerCode::build_leader_table() {
    const std::size_t bits = gens_.size();
    leaders_.assign(std::size_t{1} << bits, Leader{});
    std::size_t remaining = leaders_.size();

    // Sweep patterns by weight; within a weight keep the smallest (x, z).
    // Weight-w supports are enumerated as combinations, each qubit taking
    // X, Y or Z.
    std::vector<std::size_t> comb, type;
    std::size_t visited = 0;
    for (std::size_t w = 0; w <= n_ && remaining > 0; ++w) {
        comb.resize(w);
        for (std::size_t i = 0; i < w; ++i) comb[i] = i;
        while (true) {
            // all 3^w type assignments on this support
            type.assign(w, 0);
            while (true) {
                if (++visited > 500'000'000)
                    throw std::invalid_argument("StabilizerCode: coset-leader enumeration too large for this code");
                std::uint64_t x = 0, z = 0;
                for (std::size_t i = 0; i < w; ++i) {
                    std::uint64_t bit = std::uint64_t{1} << comb[i];
                    if (type[i] != 2) x |= bit;  // X or Y
                    if (type[i] != 0) z |= bit;  // Y or Z
                }
                std::uint32_t s = synd_pair(x, z);
                Leader& L = leaders_[s];
                if (L.weight == 0xff) {
                    L.x = x;
                    L.z = z;
                    L.weight = static_cast<std::uint8_t>(w);
                    --remaining;
                } else if (L.weight == w && (x < L.x || (x == L.x && z < L.z))) {
                    L.x = x;
                    L.z = z;
                }
                std::size_t t = 0;
                while (t < w && type[t] == 2) type[t++] = 0;
                if (t == w) break;
                ++type[t];
            }
            if (w == 0) break;
            // next combination
            std::size_t i = w;
            while (i > 0) {
                --i;
                if (comb[i] + (w - i) < n_) break;
                if (i == 0) { i = w; break; }
            }
            if (i == w) break;
            ++comb[i];
            for (std::size_t j = i + 1; j < w; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    if (remaining > 0) throw std::logic_error("StabilizerCode: syndrome table incomplete; generators not independent?");
    for (auto& L : leaders_) L.cls = raw_pattern(L.x, L.z);
}

inline void StabilizerCode::build_fast_tables() {
    // X-only reachability: syndromes of X errors form the span of the
    // per-qubit columns.
    std::vector<bool> reachable(leaders_.size(), false);
    reachable[0] = true;
    std::vector<std::uint32_t> frontier{0};
    for (std::size_t q = 0; q < n_; ++q) {
        std::uint32_t col = synd_x_slow(std::uint64_t{1} << q);
        std::vector<std::uint32_t> added;
        for (std::size_t s = 0; s < reachable.size(); ++s)
            if (reachable[s] && !reachable[s ^ col]) added.push_back(static_cast<std::uint32_t>(s) ^ col);
        for (auto s : added) reachable[s] = true;
    }
    x_only_ok_ = true;
    for (std::size_t s = 0; s < leaders_.size(); ++s)
        if (reachable[s] && leaders_[s].z != 0) x_only_ok_ = false;
    for (std::size_t j = 0; j < lxz_.size() && x_only_ok_; ++j)
        if (lxz_[j] != 0) x_only_ok_ = false;

    if (n_ <= 16) {
        std::size_t size = std::size_t{1} << n_;
        synd_x_table_.resize(size);
        class_x_table_.resize(size);
        for (std::uint64_t x = 0; x < size; ++x) {
            synd_x_table_[x] = synd_x_slow(x);
            class_x_table_[x] = class_x_slow(x);
        }
    }
}

inline StabilizerCode StabilizerCode::css(const Gf2Mat& hx, const Gf2Mat& hz, std::optional<int> distance) {
    if (hx.cols() != hz.cols()) throw std::invalid_argument("css: hx and hz must have the same number of columns");
    const std::size_t n = hx.cols();
    if (n == 0) throw std::invalid_argument("css: empty parity-check matrices");
    for (std::size_t i = 0; i < hx.rows(); ++i)
        for (std::size_t j = 0; j < hz.rows(); ++j)
            if (BitVec::and_parity(hx.row(i), hz.row(j)))
                throw std::invalid_argument("css: hx row " + std::to_string(i) + " and hz row " + std::to_string(j) +
                                            " are not orthogonal");
    if (hx.rank() != hx.rows()) throw std::invalid_argument("css: hx rows are linearly dependent");
    if (hz.rank() != hz.rows()) throw std::invalid_argument("css: hz rows are linearly dependent");

    std::vector<Pauli> gens;
    for (std::size_t i = 0; i < hx.rows(); ++i) gens.emplace_back(hx.row(i), BitVec(n));
    for (std::size_t i = 0; i < hz.rows(); ++i) gens.emplace_back(BitVec(n), hz.row(i));

    // Representatives of ker(h_other) modulo rowspace(h_same), reduced to a
    // deterministic echelon basis.
    auto quotient_basis = [n](const Gf2Mat& h_same, const Gf2Mat& h_other) {
        Gf2Mat reduced_same = h_same;
        auto pivots = reduced_same.rref();
        Gf2Mat quot(0, n);
        for (auto& v : h_other.null_space()) {
            for (std::size_t pr = 0; pr < pivots.size(); ++pr)
                if (v.get(pivots[pr])) v ^= reduced_same.row(pr);
            if (v.any()) quot.append_row(std::move(v));
        }
        quot.rref();
        std::vector<BitVec> basis;
        for (std::size_t r = 0; r < quot.rows(); ++r)
            if (quot.row(r).any()) basis.push_back(quot.row(r));
        return basis;
    };

    auto xvecs = quotient_basis(hx, hz);
    auto zvecs = quotient_basis(hz, hx);
    const std::size_t k = n - hx.rows() - hz.rows();
    if (xvecs.size() != k || zvecs.size() != k)
        throw std::invalid_argument("css: logical rank mismatch (expected k=" + std::to_string(k) + ", got " +
                                    std::to_string(xvecs.size()) + " X and " + std::to_string(zvecs.size()) + " Z)");

    // Re-pair the Z side so that <x_i, z_j> = delta_ij.
    std::vector<std::uint64_t> pairing(k, 0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if (BitVec::and_parity(xvecs[a], zvecs[b])) pairing[a] |= std::uint64_t{1} << b;
    // z'_a = sum_b c_ab z_b with <x_i, z'_a> = delta_ia requires C = (P^-1)^T.
    auto inv = gf2::invert(pairing);
    std::vector<BitVec> zpaired(k, BitVec(n));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if ((inv[b] >> a) & 1) zpaired[a] ^= zvecs[b];

    std::vector<Pauli> lx, lz;
    for (std::size_t j = 0; j < k; ++j) {
        lx.emplace_back(xvecs[j], BitVec(n));
        lz.emplace_back(BitVec(n), zpaired[j]);
    }
    return StabilizerCode(std::move(gens), std::move(lx), std::move(lz), distance);
}

inline StabilizerCode StabilizerCode::quantum_hamming_15_7_3() {
    Gf2Mat h(4, 15);
    for (std::size_t c = 0; c < 15; ++c)
        for (std::size_t r = 0; r < 4; ++r)
            if (((c + 1) >> r) & 1) h.set(r, c);
    return css(h, h, 3);
}

inline StabilizerCode StabilizerCode::code_422() {
    Gf2Mat h = Gf2Mat::from_strings({"1111"});
    return css(h, h, 2);
}

inline StabilizerCode StabilizerCode::load(std::istream& in, std::optional<int> distance) {
    auto next_line = [&in](std::string& out) {
        while (std::getline(in, out)) {
            std::size_t a = out.find_first_not_of(" \t\r");
            if (a == std::string::npos) continue;
            std::size_t b = out.find_last_not_of(" \t\r");
            out = out.substr(a, b - a + 1);
            if (out[0] == '#') continue;
            return true;
        }
        return false;
    };
    std::string line;
    if (!next_line(line)) throw std::invalid_argument("code file: missing header line");
    std::istringstream hdr(line);
    long long n = -1, k = -1;
    if (!(hdr >> n >> k) || n <= 0 || k < 0 || k > n)
        throw std::invalid_argument("code file: header must be 'n k' with 0 <= k <= n");
    auto read_pauli = [&](const char* what, std::size_t i) {
        if (!next_line(line))
            throw std::invalid_argument(std::string("code file: missing ") + what + " line " + std::to_string(i));
        Pauli p = Pauli::from_string(line);
        if (p.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument(std::string("code file: ") + what + " line " + std::to_string(i) + " has " +
                                        std::to_string(p.size()) + " qubits, expected " + std::to_string(n));
        return p;
    };
    std::vector<Pauli> gens, lx, lz;
    for (long long i = 0; i < n - k; ++i) gens.push_back(read_pauli("stabilizer", i));
    for (long long i = 0; i < k; ++i) lx.push_back(read_pauli("logical X", i));
    for (long long i = 0; i < k; ++i) lz.push_back(read_pauli("logical Z", i));
    return StabilizerCode(std::move(gens), std::move(lx), std::move(lz), distance);
}

inline void StabilizerCode::save(std::ostream& out) const {
    out << n_ << ' ' << k() << '\n';
    for (const auto& g : gens_) out << g.str() << '\n';
    for (const auto& l : lx_) out << l.str() << '\n';
    for (const auto& l : lz_) out << l.str() << '\n';
}

}  // namespace qconcat
