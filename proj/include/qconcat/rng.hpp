#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

#include "qconcat/pauli.hpp"

namespace qconcat {

// Philox4x32-10 counter-based generator. Every draw is a pure function of
// (key, counter), so trial streams can be evaluated in any order and on any
// number of workers with identical results.
namespace philox {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        std::array<std::uint32_t, 4> next;
        next[0] = static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0];
        next[1] = static_cast<std::uint32_t>(p1);
        next[2] = static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1];
        next[3] = static_cast<std::uint32_t>(p0);
        ctr = next;
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

}  // namespace philox

// One trial's private random stream, addressed by (seed, point, trial).
class TrialStream {
  public:
    TrialStream(std::uint64_t seed, std::uint32_t point, std::uint64_t trial)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          base_{static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), point, 0} {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            auto ctr = base_;
            ctr[3] = block_index_++;
            buf_ = philox::block(ctr, key_);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

  private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> base_;
    std::array<std::uint32_t, 4> buf_{};
    std::uint32_t block_index_ = 0;
    int pos_ = 4;
};

// Integer threshold for "flips with probability p" on a u32 draw; exact at
// the 2^-32 resolution and free of libm in the sampling loop.
inline std::uint64_t flip_threshold(double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return std::uint64_t{1} << 32;
    return static_cast<std::uint64_t>(std::llround(std::ldexp(p, 32)));
}

// Fill per-block X masks for a bit-flip channel: qubit q of block b flips
// independently with probability p. Consumes exactly one u32 per qubit.
inline void sample_x_blocks(std::uint64_t seed, std::uint32_t point, std::uint64_t trial, std::uint64_t threshold,
                            std::size_t block_n, std::span<std::uint64_t> out) {
    TrialStream ts(seed, point, trial);
    for (auto& mask : out) {
        std::uint64_t m = 0;
        for (std::size_t q = 0; q < block_n; ++q)
            if (ts.next_u32() < threshold) m |= std::uint64_t{1} << q;
        mask = m;
    }
}

// Bit-flip channel sample as a Pauli operator (X components only).
inline Pauli sample_error(std::size_t n, double p, std::uint64_t seed, std::uint32_t point, std::uint64_t trial) {
    TrialStream ts(seed, point, trial);
    const std::uint64_t threshold = flip_threshold(p);
    Pauli e(n);
    for (std::size_t q = 0; q < n; ++q)
        if (ts.next_u32() < threshold) e.x().set(q);
    return e;
}

}  // namespace qconcat
