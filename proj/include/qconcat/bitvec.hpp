#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qconcat {

// Packed GF(2) vector. Bit i lives in word i/64 at position i%64, so the
// vector compares and prints like a little-endian integer. Trailing bits of
// the last word are kept zero.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVec from_word(std::size_t n, std::uint64_t bits) {
        if (n < 64 && (bits >> n) != 0) throw std::invalid_argument("BitVec::from_word: bits beyond size");
        BitVec v(n);
        if (n > 0) v.w_[0] = bits;
        return v;
    }

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    bool get(std::size_t i) const {
        check_index(i);
        return (w_[i / 64] >> (i % 64)) & 1;
    }
    void set(std::size_t i, bool v = true) {
        check_index(i);
        std::uint64_t m = std::uint64_t{1} << (i % 64);
        if (v)
            w_[i / 64] |= m;
        else
            w_[i / 64] &= ~m;
    }
    void flip(std::size_t i) {
        check_index(i);
        w_[i / 64] ^= std::uint64_t{1} << (i % 64);
    }

    BitVec& operator^=(const BitVec& o) {
        check_same_size(o);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : w_) c += std::popcount(w);
        return c;
    }
    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }

    // Parity of <a, b> over GF(2).
    static bool and_parity(const BitVec& a, const BitVec& b) {
        a.check_same_size(b);
        std::uint64_t acc = 0;
        for (std::size_t i = 0; i < a.w_.size(); ++i) acc ^= a.w_[i] & b.w_[i];
        return std::popcount(acc) & 1;
    }

    // Popcount of a & b (used for weight of overlapping supports).
    static std::size_t and_popcount(const BitVec& a, const BitVec& b) {
        a.check_same_size(b);
        std::size_t c = 0;
        for (std::size_t i = 0; i < a.w_.size(); ++i) c += std::popcount(a.w_[i] & b.w_[i]);
        return c;
    }
    static std::size_t or_popcount(const BitVec& a, const BitVec& b) {
        a.check_same_size(b);
        std::size_t c = 0;
        for (std::size_t i = 0; i < a.w_.size(); ++i) c += std::popcount(a.w_[i] | b.w_[i]);
        return c;
    }

    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitVec& o) const { return !(*this == o); }

    // Total order: shorter first, then value as a little-endian integer.
    // "Lexicographically smaller bits" throughout the library means smaller
    // under this order.
    bool operator<(const BitVec& o) const { return cmp(o) < 0; }
    int cmp(const BitVec& o) const {
        if (n_ != o.n_) return n_ < o.n_ ? -1 : 1;
        for (std::size_t i = w_.size(); i-- > 0;) {
            if (w_[i] != o.w_[i]) return w_[i] < o.w_[i] ? -1 : 1;
        }
        return 0;
    }

    std::uint64_t low_word() const { return w_.empty() ? 0 : w_[0]; }

    // Up to 64 bits starting at pos, little-endian.
    std::uint64_t extract_bits(std::size_t pos, std::size_t len) const {
        if (len == 0) return 0;
        if (len > 64 || pos + len > n_) throw std::out_of_range("BitVec::extract_bits: bad range");
        std::size_t w = pos / 64, off = pos % 64;
        std::uint64_t lo = w_[w] >> off;
        if (off != 0 && w + 1 < w_.size()) lo |= w_[w + 1] << (64 - off);
        return len == 64 ? lo : (lo & ((std::uint64_t{1} << len) - 1));
    }

    // Write bits (little-endian) into [pos, pos + len); bits beyond len must be zero.
    void deposit_bits(std::size_t pos, std::size_t len, std::uint64_t bits) {
        if (len == 0) return;
        if (len > 64 || pos + len > n_) throw std::out_of_range("BitVec::deposit_bits: bad range");
        if (len < 64 && (bits >> len) != 0) throw std::invalid_argument("BitVec::deposit_bits: bits beyond len");
        std::size_t w = pos / 64, off = pos % 64;
        w_[w] |= bits << off;
        if (off != 0 && off + len > 64) w_[w + 1] |= bits >> (64 - off);
    }
    std::span<const std::uint64_t> words() const { return w_; }
    std::span<std::uint64_t> words() { return w_; }

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ n_;
        for (auto w : w_) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdull;
            h ^= h >> 33;
        }
        return static_cast<std::size_t>(h);
    }

    // "0100..." with bit 0 first.
    std::string str() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

  private:
    void check_index(std::size_t i) const {
        if (i >= n_) throw std::out_of_range("BitVec: index " + std::to_string(i) + " out of range for size " + std::to_string(n_));
    }
    void check_same_size(const BitVec& o) const {
        if (n_ != o.n_) throw std::invalid_argument("BitVec: size mismatch (" + std::to_string(n_) + " vs " + std::to_string(o.n_) + ")");
    }
    std::uint64_t tail_mask(std::size_t word) const {
        std::size_t used = n_ - word * 64;
        return used >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << used) - 1);
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace qconcat
