#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "qconcat/stabilizer_code.hpp"

namespace qconcat {

// Ordered class list with log-probabilities, descending; ties broken toward
// lexicographically smaller class bits. Entries are distinct classes.
struct SoftEntry {
    LogicalClass cls;
    double logp;
};
struct SoftList {
    std::vector<SoftEntry> entries;
};

// Packed variant used on the decoding hot path (class labels <= 64 bits).
struct XSoftEntry {
    std::uint64_t cls;
    double logp;
};
using XList = std::vector<XSoftEntry>;

namespace detail {

inline double logsumexp2(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Fixed-order log-sum-exp over a span (two passes, max first).
inline double logsumexp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

inline void sort_xlist(XList& list) {
    std::sort(list.begin(), list.end(), [](const XSoftEntry& a, const XSoftEntry& b) {
        if (a.logp != b.logp) return a.logp > b.logp;
        return a.cls < b.cls;
    });
}

// Keep the top min(limit, size) entries and renormalize them to sum to 1.
inline void truncate_renormalize(XList& list, std::size_t limit) {
    if (list.size() > limit) list.resize(limit);
    std::vector<double> lps(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) lps[i] = list[i].logp;
    double z = logsumexp(lps);
    for (auto& e : list) e.logp -= z;
}

}  // namespace detail

// Reliability of a block: log-ratio of its two most likely classes.
// Singleton lists are certain and get +infinity.
inline double reliability(const SoftList& list) {
    if (list.entries.empty()) throw std::invalid_argument("reliability: empty list");
    if (list.entries.size() == 1) return std::numeric_limits<double>::infinity();
    return list.entries[0].logp - list.entries[1].logp;
}
inline double reliability_x(const XList& list) {
    if (list.empty()) throw std::invalid_argument("reliability: empty list");
    if (list.size() == 1) return std::numeric_limits<double>::infinity();
    return list[0].logp - list[1].logp;
}

// Indices of the M least reliable blocks, ascending; reliability ties prefer
// the smaller block index.
inline std::vector<std::size_t> select_blocks(std::span<const double> gammas, std::size_t m) {
    if (m > gammas.size()) throw std::invalid_argument("select_blocks: M exceeds block count");
    std::vector<std::size_t> idx(gammas.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return gammas[a] < gammas[b]; });
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Enumerates test patterns as digit vectors: digit i selects an entry of
// selected block i's class list. Without a cap the order is an odometer
// (digit 0 fastest); with a cap, patterns come in non-increasing order of
// total log-probability (ties: lexicographically smaller digits first),
// truncated after `cap` patterns. Either way the all-top pattern is first.
class TpEnumerator {
  public:
    // weights[i][d] = logp of choice d for digit i (non-increasing in d).
    TpEnumerator(std::vector<std::vector<double>> weights, std::optional<std::size_t> cap)
        : weights_(std::move(weights)), cap_(cap) {
        for (const auto& w : weights_)
            if (w.empty()) throw std::invalid_argument("TpEnumerator: empty choice list");
        if (cap_ && *cap_ < 1) throw std::invalid_argument("TpEnumerator: cap must be >= 1");
        if (cap_) {
            Node first;
            first.digits.assign(weights_.size(), 0);
            first.logp = 0;
            for (const auto& w : weights_) first.logp += w[0];
            first.last_nz = 0;
            heap_.push(std::move(first));
        }
    }

    std::size_t digit_count() const { return weights_.size(); }

    // Full pattern count (without cap).
    double full_count() const {
        double c = 1;
        for (const auto& w : weights_) c *= static_cast<double>(w.size());
        return c;
    }

    // Writes the next pattern into `digits`; returns false when exhausted.
    bool next(std::vector<std::uint32_t>& digits) {
        if (cap_) return next_capped(digits);
        return next_odometer(digits);
    }

  private:
    bool next_odometer(std::vector<std::uint32_t>& digits) {
        if (!started_) {
            digits.assign(weights_.size(), 0);
            started_ = true;
            return true;
        }
        if (digits.size() != weights_.size()) throw std::logic_error("TpEnumerator: digit vector mutated");
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (digits[i] + 1 < weights_[i].size()) {
                ++digits[i];
                std::fill(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(i), 0u);
                return true;
            }
        }
        return false;
    }

    struct Node {
        std::vector<std::uint32_t> digits;
        double logp = 0;
        std::size_t last_nz = 0;  // largest index with a nonzero digit (0 when all zero)
    };
    struct NodeLess {
        bool operator()(const Node& a, const Node& b) const {
            if (a.logp != b.logp) return a.logp < b.logp;  // max-heap on logp
            return a.digits > b.digits;                    // then smaller digits first
        }
    };

    // Each pattern is generated exactly once: the parent of a nonzero
    // pattern decrements its last nonzero digit, so children increment
    // digits at positions >= last_nz.
    bool next_capped(std::vector<std::uint32_t>& digits) {
        if (emitted_ >= *cap_ || heap_.empty()) return false;
        Node cur = heap_.top();
        heap_.pop();
        ++emitted_;
        digits = cur.digits;
        for (std::size_t i = cur.last_nz; i < weights_.size(); ++i) {
            if (cur.digits[i] + 1 < weights_[i].size()) {
                Node child = cur;
                child.logp += weights_[i][cur.digits[i] + 1] - weights_[i][cur.digits[i]];
                ++child.digits[i];
                child.last_nz = i;
                heap_.push(std::move(child));
            }
        }
        return true;
    }

    std::vector<std::vector<double>> weights_;
    std::optional<std::size_t> cap_;
    bool started_ = false;
    std::priority_queue<Node, std::vector<Node>, NodeLess> heap_;
    std::size_t emitted_ = 0;
};

// Materialized test patterns over all blocks: entry b of a pattern is the
// class-list index chosen for block b (blocks outside the selected set stay
// at their top entry, index 0).
inline std::vector<std::vector<std::uint32_t>> generate_test_patterns(const std::vector<SoftList>& lists,
                                                                      std::span<const std::size_t> selected,
                                                                      std::size_t d,
                                                                      std::optional<std::size_t> cap) {
    if (d < 1) throw std::invalid_argument("generate_test_patterns: D must be >= 1");
    std::vector<std::vector<double>> weights;
    weights.reserve(selected.size());
    for (auto b : selected) {
        const auto& entries = lists.at(b).entries;
        std::size_t m = std::min<std::size_t>(d, entries.size());
        std::vector<double> w(m);
        for (std::size_t i = 0; i < m; ++i) w[i] = entries[i].logp;
        weights.push_back(std::move(w));
    }
    TpEnumerator en(std::move(weights), cap);
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> digits;
    while (en.next(digits)) {
        std::vector<std::uint32_t> tp(lists.size(), 0);
        for (std::size_t i = 0; i < selected.size(); ++i) tp[selected[i]] = digits[i];
        out.push_back(std::move(tp));
    }
    return out;
}

}  // namespace qconcat
