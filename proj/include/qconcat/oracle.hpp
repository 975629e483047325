#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qconcat/concatenated.hpp"
#include "qconcat/soft.hpp"

namespace qconcat {

namespace detail {

inline void check_prior(std::span<const double> prior, std::size_t n, const char* who) {
    if (prior.size() != n) throw std::invalid_argument(std::string(who) + ": prior size mismatch");
    for (double q : prior)
        if (!(q > 0 && q < 1)) throw std::invalid_argument(std::string(who) + ": prior must lie in (0, 1)");
}

inline SoftList grouped_soft_list(std::size_t k, const std::map<std::uint64_t, std::vector<double>>& members) {
    std::vector<XSoftEntry> entries;
    for (const auto& [cls, lps] : members) entries.push_back({cls, logsumexp(lps)});
    std::vector<double> all(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) all[i] = entries[i].logp;
    double z = logsumexp(all);
    for (auto& e : entries) e.logp -= z;
    std::sort(entries.begin(), entries.end(), [](const XSoftEntry& a, const XSoftEntry& b) {
        if (a.logp != b.logp) return a.logp > b.logp;
        return a.cls < b.cls;
    });
    SoftList out;
    for (const auto& e : entries) out.entries.push_back({LogicalClass::from_packed(k, e.cls), e.logp});
    return out;
}

}  // namespace detail

// Exact degenerate maximum-likelihood decoding of one base code: enumerate
// every X-pattern with the given syndrome and sum probabilities per logical
// class. Exact but exponential; refuses beyond max_patterns.
inline std::pair<LogicalClass, SoftList> brute_force_dqmld(const StabilizerCode& code, const BitVec& syndrome,
                                                           std::span<const double> prior,
                                                           std::size_t max_patterns = std::size_t{1} << 20) {
    const std::size_t n = code.n();
    if (n >= 63 || (std::size_t{1} << n) > max_patterns)
        throw std::invalid_argument("brute_force_dqmld: 2^" + std::to_string(n) + " X-patterns exceed the oracle limit");
    detail::check_prior(prior, n, "brute_force_dqmld");
    double base = 0;
    std::vector<double> delta(n);
    for (std::size_t q = 0; q < n; ++q) {
        base += std::log1p(-prior[q]);
        delta[q] = std::log(prior[q]) - std::log1p(-prior[q]);
    }
    const std::uint32_t want = code.pack_syndrome(syndrome);
    std::map<std::uint64_t, std::vector<double>> members;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        if (code.synd_x(x) != want) continue;
        double lp = base;
        for (std::uint64_t m = x; m; m &= m - 1) lp += delta[static_cast<std::size_t>(std::countr_zero(m))];
        members[code.class_x(x)].push_back(lp);
    }
    if (members.empty()) throw std::invalid_argument("brute_force_dqmld: syndrome not reachable under the bit-flip channel");
    SoftList soft = detail::grouped_soft_list(code.k(), members);
    return {soft.entries.front().cls, soft};
}

// Same, for a concatenated code and a full syndrome tree with arbitrary
// per-qubit priors. Enumerates all 2^n_total X-patterns per call.
inline std::pair<LogicalClass, SoftList> brute_force_dqmld(const ConcatenatedCode& ccode, const SyndromeTree& tree,
                                                           std::span<const double> prior,
                                                           std::size_t max_patterns = std::size_t{1} << 20) {
    const std::size_t n = ccode.n_total(), nb = ccode.base().n();
    if (n >= 63 || (std::size_t{1} << n) > max_patterns)
        throw std::invalid_argument("brute_force_dqmld: 2^" + std::to_string(n) + " X-patterns exceed the oracle limit");
    if (2 * ccode.k_total() > 64) throw std::invalid_argument("brute_force_dqmld: logical label too wide");
    detail::check_prior(prior, n, "brute_force_dqmld");
    double base = 0;
    std::vector<double> delta(n);
    for (std::size_t q = 0; q < n; ++q) {
        base += std::log1p(-prior[q]);
        delta[q] = std::log(prior[q]) - std::log1p(-prior[q]);
    }
    SyndromeTree scratch = ccode.empty_tree();
    auto work = ccode.make_xwork();
    std::vector<std::uint64_t> cls_words;
    std::vector<std::uint64_t> level1(ccode.blocks_at(1));
    std::map<std::uint64_t, std::vector<double>> members;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        for (std::size_t b = 0; b < level1.size(); ++b) level1[b] = (x >> (b * nb)) & ((std::uint64_t{1} << nb) - 1);
        ccode.reduce_x(level1, scratch, cls_words, work);
        if (scratch != tree) continue;
        double lp = base;
        for (std::uint64_t m = x; m; m &= m - 1) lp += delta[static_cast<std::size_t>(std::countr_zero(m))];
        members[cls_words[0]].push_back(lp);
    }
    if (members.empty()) throw std::invalid_argument("brute_force_dqmld: tree not produced by any X error");
    SoftList soft = detail::grouped_soft_list(ccode.k_total(), members);
    return {soft.entries.front().cls, soft};
}

// Cached oracle for repeated decoding of one concatenated code under a
// uniform flip probability: one exhaustive pass builds per-tree-signature
// weight histograms, after which each decode is a table lookup.
class BruteForceOracle {
  public:
    explicit BruteForceOracle(const ConcatenatedCode& ccode, std::size_t max_patterns = std::size_t{1} << 20)
        : ccode_(&ccode) {
        const std::size_t n = ccode.n_total(), nb = ccode.base().n(), m = ccode.base().num_generators();
        if (n >= 63 || (std::size_t{1} << n) > max_patterns)
            throw std::invalid_argument("BruteForceOracle: 2^" + std::to_string(n) +
                                        " X-patterns exceed the oracle limit");
        if (2 * ccode.k_total() > 64) throw std::invalid_argument("BruteForceOracle: logical label too wide");
        std::size_t sig_bits = 0;
        for (std::size_t t = 1; t <= ccode.levels(); ++t) sig_bits += ccode.blocks_at(t) * m;
        if (sig_bits > 64) throw std::invalid_argument("BruteForceOracle: syndrome tree signature too wide");

        SyndromeTree scratch = ccode.empty_tree();
        auto work = ccode.make_xwork();
        std::vector<std::uint64_t> cls_words;
        std::vector<std::uint64_t> level1(ccode.blocks_at(1));
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            for (std::size_t b = 0; b < level1.size(); ++b)
                level1[b] = (x >> (b * nb)) & ((std::uint64_t{1} << nb) - 1);
            ccode.reduce_x(level1, scratch, cls_words, work);
            auto& hist = table_[signature(scratch)][cls_words[0]];
            if (hist.empty()) hist.assign(n + 1, 0);
            ++hist[static_cast<std::size_t>(std::popcount(x))];
        }
    }

    const ConcatenatedCode& code() const { return *ccode_; }

    std::pair<LogicalClass, SoftList> decode(const SyndromeTree& tree, double p) const {
        if (!(p > 0 && p < 1)) throw std::invalid_argument("BruteForceOracle: p must lie in (0, 1)");
        auto it = table_.find(signature(tree));
        if (it == table_.end()) throw std::invalid_argument("BruteForceOracle: tree not produced by any X error");
        const std::size_t n = ccode_->n_total();
        const double lp1 = std::log(p), lp0 = std::log1p(-p);
        std::map<std::uint64_t, std::vector<double>> members;
        for (const auto& [cls, hist] : it->second) {
            auto& lps = members[cls];
            for (std::size_t w = 0; w <= n; ++w)
                if (hist[w])
                    lps.push_back(std::log(static_cast<double>(hist[w])) + static_cast<double>(w) * lp1 +
                                  static_cast<double>(n - w) * lp0);
        }
        SoftList soft = detail::grouped_soft_list(ccode_->k_total(), members);
        return {soft.entries.front().cls, soft};
    }

  private:
    std::uint64_t signature(const SyndromeTree& tree) const {
        const std::size_t m = ccode_->base().num_generators();
        std::uint64_t sig = 0;
        for (std::size_t t = 1; t <= ccode_->levels(); ++t)
            for (std::size_t b = 0; b < ccode_->blocks_at(t); ++b) sig = (sig << m) | tree.at(t, b);
        return sig;
    }

    const ConcatenatedCode* ccode_;
    std::map<std::uint64_t, std::map<std::uint64_t, std::vector<std::uint32_t>>> table_;
};

}  // namespace qconcat
