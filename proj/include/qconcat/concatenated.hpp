#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qconcat/pauli.hpp"
#include "qconcat/stabilizer_code.hpp"

namespace qconcat {

// Per-block syndromes of a concatenated code, level by level. Levels are
// named 1 (innermost, physical blocks) through r (top); blocks within a
// level are 0-based. Syndromes are packed with bit g = generator g of the
// base code.
class SyndromeTree {
  public:
    SyndromeTree() = default;
    explicit SyndromeTree(const std::vector<std::size_t>& blocks_per_level) {
        s_.reserve(blocks_per_level.size());
        for (auto b : blocks_per_level) s_.emplace_back(b, 0);
    }

    std::size_t levels() const { return s_.size(); }
    std::size_t blocks(std::size_t level) const { return lvl(level).size(); }
    std::uint32_t at(std::size_t level, std::size_t block) const { return lvl(level).at(block); }
    void set(std::size_t level, std::size_t block, std::uint32_t s) { lvl(level).at(block) = s; }
    std::span<const std::uint32_t> level(std::size_t level) const { return lvl(level); }
    std::span<std::uint32_t> level(std::size_t level) { return lvl(level); }

    void clear() {
        for (auto& v : s_) std::fill(v.begin(), v.end(), 0);
    }
    bool all_zero() const {
        for (const auto& v : s_)
            for (auto s : v)
                if (s) return false;
        return true;
    }
    bool operator==(const SyndromeTree& o) const { return s_ == o.s_; }
    bool operator!=(const SyndromeTree& o) const { return !(*this == o); }

  private:
    std::vector<std::uint32_t>& lvl(std::size_t level) {
        if (level < 1 || level > s_.size()) throw std::out_of_range("SyndromeTree: level " + std::to_string(level));
        return s_[level - 1];
    }
    const std::vector<std::uint32_t>& lvl(std::size_t level) const {
        return const_cast<SyndromeTree*>(this)->lvl(level);
    }

    std::vector<std::vector<std::uint32_t>> s_;
};

// Homogeneous r-level concatenation of an [[n, k]] base code in the
// rate-preserving layout: an r-level code consists of n contiguous copies of
// the (r-1)-level code, and top block j (one per logical qubit of the
// (r-1)-level code) collects logical qubit j of every copy, copy c landing at
// symbol position c. Total parameters are [[n^r, k^r]]. Logical qubit
// indices follow the top blocks: global index = top_block * k + local.
class ConcatenatedCode {
  public:
    ConcatenatedCode(StabilizerCode base, std::size_t levels) : base_(std::move(base)), r_(levels) {
        if (r_ < 1) throw std::invalid_argument("ConcatenatedCode: need at least one level");
        const std::size_t n = base_.n(), k = base_.k();
        if (k == 0) throw std::invalid_argument("ConcatenatedCode: base code must encode at least one qubit");
        double total = 1;
        for (std::size_t t = 0; t < r_; ++t) total *= static_cast<double>(n);
        if (total > 1e15) throw std::invalid_argument("ConcatenatedCode: too many physical qubits");
        n_total_ = 1;
        k_total_ = 1;
        for (std::size_t t = 0; t < r_; ++t) {
            n_total_ *= n;
            k_total_ *= k;
        }
        // blocks_at(t) = n^(r-t) * k^(t-1)
        bcount_.resize(r_);
        for (std::size_t t = 1; t <= r_; ++t) {
            std::size_t c = 1;
            for (std::size_t i = 0; i < r_ - t; ++i) c *= n;
            for (std::size_t i = 0; i + 1 < t; ++i) c *= k;
            bcount_[t - 1] = c;
        }
        build_slot_tables();
    }

    const StabilizerCode& base() const { return base_; }
    std::size_t levels() const { return r_; }
    std::size_t n_total() const { return n_total_; }
    std::size_t k_total() const { return k_total_; }
    std::size_t blocks_at(std::size_t level) const {
        check_level(level, 1);
        return bcount_[level - 1];
    }

    // Logical qubit `logical` of level-`level` block `block` feeds which
    // (parent block, symbol position) at level + 1?
    std::pair<std::size_t, std::size_t> parent_slot(std::size_t level, std::size_t block, std::size_t logical) const {
        check_level(level, 1);
        if (level == r_) throw std::invalid_argument("parent_slot: top level has no parent");
        if (logical >= base_.k()) throw std::out_of_range("parent_slot: logical index out of range");
        check_block(level, block);
        const std::size_t k = base_.k();
        std::size_t cur_r = r_, base_off = 0;
        while (level < cur_r - 1) {
            std::size_t bt_sub = count_in(cur_r - 1, level);
            std::size_t c = block / bt_sub;
            block %= bt_sub;
            base_off += c * count_in(cur_r - 1, level + 1);
            --cur_r;
        }
        std::size_t copy = block / count_in(cur_r - 1, level);  // level == cur_r - 1 here
        std::size_t local = block % count_in(cur_r - 1, level);
        return {base_off + local * k + logical, copy};
    }

    // Inverse: symbol position `pos` of level-`level` block `block` is
    // logical qubit `second` of level - 1 block `first`.
    std::pair<std::size_t, std::size_t> child_slot(std::size_t level, std::size_t block, std::size_t pos) const {
        check_level(level, 2);
        check_block(level, block);
        if (pos >= base_.n()) throw std::out_of_range("child_slot: position out of range");
        const std::size_t k = base_.k();
        std::size_t cur_r = r_, base_off = 0;
        while (level < cur_r) {
            std::size_t bt_sub = count_in(cur_r - 1, level);
            std::size_t c = block / bt_sub;
            block %= bt_sub;
            base_off += c * count_in(cur_r - 1, level - 1);
            --cur_r;
        }
        // block is a top block of a `level`-level subcode
        std::size_t child_local = pos * count_in(level - 1, level - 1) + block / k;
        return {base_off + child_local, block % k};
    }

    // Physical qubit range of a level-1 block.
    std::size_t block_offset(std::size_t level1_block) const { return level1_block * base_.n(); }

    SyndromeTree empty_tree() const { return SyndromeTree(bcount_); }

    SyndromeTree extract_syndromes(const Pauli& e) const {
        SyndromeTree tree = empty_tree();
        reduce_general(e, tree, nullptr);
        return tree;
    }

    LogicalClass true_logical_class(const Pauli& e) const {
        SyndromeTree tree = empty_tree();
        LogicalClass cls(k_total_);
        reduce_general(e, tree, &cls);
        return cls;
    }

    // X-only fast path: level-1 x masks in, per-block syndromes and the
    // packed k_total-bit logical X label out. Buffers are reused.
    struct XWork {
        std::vector<std::vector<std::uint64_t>> x;  // [level-1][block]
    };
    XWork make_xwork() const {
        XWork w;
        w.x.reserve(r_);
        for (std::size_t t = 1; t <= r_; ++t) w.x.emplace_back(bcount_[t - 1], 0);
        return w;
    }

    void reduce_x(std::span<const std::uint64_t> level1_x, SyndromeTree& tree, std::vector<std::uint64_t>& top_class,
                  XWork& work) const {
        if (level1_x.size() != bcount_[0]) throw std::invalid_argument("reduce_x: wrong block count");
        const std::size_t k = base_.k();
        top_class.assign((k_total_ + 63) / 64, 0);
        std::copy(level1_x.begin(), level1_x.end(), work.x[0].begin());
        for (std::size_t t = 1; t <= r_; ++t) {
            auto& cur = work.x[t - 1];
            auto synd = tree.level(t);
            if (t < r_) {
                auto& next = work.x[t];
                std::fill(next.begin(), next.end(), 0);
                const auto* pb = pblock_[t - 1].data();
                const auto* pp = ppos_[t - 1].data();
                for (std::size_t b = 0; b < cur.size(); ++b) {
                    std::uint64_t x = cur[b];
                    synd[b] = base_.synd_x(x);
                    std::uint32_t cls = base_.class_x(x);
                    while (cls) {
                        unsigned j = std::countr_zero(cls);
                        cls &= cls - 1;
                        std::size_t slot = b * k + j;
                        next[pb[slot]] |= std::uint64_t{1} << pp[slot];
                    }
                }
            } else {
                for (std::size_t b = 0; b < cur.size(); ++b) {
                    std::uint64_t x = cur[b];
                    synd[b] = base_.synd_x(x);
                    std::uint32_t cls = base_.class_x(x);
                    deposit_class(top_class, b, cls);
                }
            }
        }
    }

    // Bits [block*k, block*k + k) of a packed logical label.
    void deposit_class(std::vector<std::uint64_t>& words, std::size_t top_block, std::uint64_t cls) const {
        const std::size_t k = base_.k();
        std::size_t bit = top_block * k, w = bit / 64, off = bit % 64;
        words[w] |= cls << off;
        if (off != 0 && off + k > 64) words[w + 1] |= cls >> (64 - off);
    }

  private:
    void check_level(std::size_t level, std::size_t lo) const {
        if (level < lo || level > r_)
            throw std::out_of_range("ConcatenatedCode: level " + std::to_string(level) + " out of range");
    }
    void check_block(std::size_t level, std::size_t block) const {
        if (block >= bcount_[level - 1])
            throw std::out_of_range("ConcatenatedCode: block " + std::to_string(block) + " out of range at level " +
                                    std::to_string(level));
    }

    // blocks at level t inside an r_sub-level subcode: n^(r_sub-t) k^(t-1)
    std::size_t count_in(std::size_t r_sub, std::size_t t) const {
        std::size_t c = 1;
        for (std::size_t i = 0; i < r_sub - t; ++i) c *= base_.n();
        for (std::size_t i = 0; i + 1 < t; ++i) c *= base_.k();
        return c;
    }

    void build_slot_tables() {
        const std::size_t k = base_.k();
        pblock_.resize(r_ > 0 ? r_ - 1 : 0);
        ppos_.resize(pblock_.size());
        for (std::size_t t = 1; t < r_; ++t) {
            pblock_[t - 1].resize(bcount_[t - 1] * k);
            ppos_[t - 1].resize(bcount_[t - 1] * k);
            for (std::size_t b = 0; b < bcount_[t - 1]; ++b) {
                for (std::size_t j = 0; j < k; ++j) {
                    auto [pb, pos] = parent_slot(t, b, j);
                    pblock_[t - 1][b * k + j] = static_cast<std::uint32_t>(pb);
                    ppos_[t - 1][b * k + j] = static_cast<std::uint32_t>(pos);
                }
            }
        }
    }

    void reduce_general(const Pauli& e, SyndromeTree& tree, LogicalClass* cls_out) const {
        if (e.size() != n_total_) throw std::invalid_argument("ConcatenatedCode: operator size mismatch");
        const std::size_t n = base_.n(), k = base_.k();
        std::vector<std::uint64_t> cur_x(bcount_[0]), cur_z(bcount_[0]);
        for (std::size_t b = 0; b < bcount_[0]; ++b) {
            cur_x[b] = e.x().extract_bits(b * n, n);
            cur_z[b] = e.z().extract_bits(b * n, n);
        }
        for (std::size_t t = 1; t <= r_; ++t) {
            std::vector<std::uint64_t> next_x, next_z;
            if (t < r_) {
                next_x.assign(bcount_[t], 0);
                next_z.assign(bcount_[t], 0);
            }
            for (std::size_t b = 0; b < bcount_[t - 1]; ++b) {
                tree.set(t, b, base_.synd_pair(cur_x[b], cur_z[b]));
                std::uint64_t cls = base_.class_pair(cur_x[b], cur_z[b]);
                if (t < r_) {
                    for (std::size_t j = 0; j < k; ++j) {
                        auto [pb, pos] = parent_slot(t, b, j);
                        if ((cls >> j) & 1) next_x[pb] |= std::uint64_t{1} << pos;
                        if ((cls >> (k + j)) & 1) next_z[pb] |= std::uint64_t{1} << pos;
                    }
                } else if (cls_out) {
                    for (std::size_t j = 0; j < k; ++j) {
                        if ((cls >> j) & 1) cls_out->set_x_bit(b * k + j);
                        if ((cls >> (k + j)) & 1) cls_out->set_z_bit(b * k + j);
                    }
                }
            }
            cur_x = std::move(next_x);
            cur_z = std::move(next_z);
        }
    }

    StabilizerCode base_;
    std::size_t r_ = 1;
    std::size_t n_total_ = 0, k_total_ = 0;
    std::vector<std::size_t> bcount_;
    std::vector<std::vector<std::uint32_t>> pblock_, ppos_;
};

}  // namespace qconcat
