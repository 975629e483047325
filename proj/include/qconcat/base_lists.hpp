#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qconcat/soft.hpp"
#include "qconcat/stabilizer_code.hpp"

namespace qconcat {

// X-error cosets of a base code grouped by syndrome: every pattern of weight
// <= weight_cap, or all 2^n patterns in exhaustive mode. The coset leader is
// always present (appended past the cap when the coset has no light member),
// so no list is empty. Patterns are sorted by (weight, value).
class BaseCosets {
  public:
    BaseCosets(const StabilizerCode& code, int weight_cap, bool exhaustive)
        : code_(&code), wcap_(weight_cap), exhaustive_(exhaustive) {
        if (code.n() > 16) throw std::invalid_argument("BaseCosets: base codes are limited to 16 qubits");
        if (!code.x_only_ok()) throw std::invalid_argument("BaseCosets: code does not support X-only decoding");
        if (weight_cap < 0) throw std::invalid_argument("BaseCosets: negative weight cap");
        const std::size_t n = code.n();
        const std::size_t nsynd = std::size_t{1} << code.num_generators();

        std::vector<std::vector<std::uint64_t>> bucket(nsynd);
        if (exhaustive_) {
            for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) bucket[code.synd_x(x)].push_back(x);
        } else {
            std::uint64_t x = 0;
            bucket[code.synd_x(0)].push_back(0);
            for (int w = 1; w <= std::min<int>(weight_cap, static_cast<int>(n)); ++w) {
                // lowest pattern of weight w, then Gosper's hack for the rest
                x = (std::uint64_t{1} << w) - 1;
                while (x < (std::uint64_t{1} << n)) {
                    bucket[code.synd_x(x)].push_back(x);
                    std::uint64_t c = x & -x, r = x + c;
                    x = (((r ^ x) >> 2) / c) | r;
                }
            }
        }
        // X-reachable syndromes: the XOR span of the single-qubit columns.
        std::vector<char> reach(nsynd, 0);
        reach[0] = 1;
        for (std::size_t q = 0; q < n; ++q) {
            std::uint32_t col = code.synd_x(std::uint64_t{1} << q);
            for (std::size_t s = 0; s < nsynd; ++s)
                if (reach[s]) reach[s ^ col] = 1;
        }
        index_of_.assign(nsynd, -1);
        for (std::size_t s = 0; s < nsynd; ++s) {
            if (!reach[s]) continue;
            auto& pats = bucket[s];
            if (pats.empty()) pats.push_back(code.leader_x(static_cast<std::uint32_t>(s)));
            std::sort(pats.begin(), pats.end(), [](std::uint64_t a, std::uint64_t b) {
                auto wa = std::popcount(a), wb = std::popcount(b);
                if (wa != wb) return wa < wb;
                return a < b;
            });
            index_of_[s] = static_cast<std::int32_t>(synds_.size());
            synds_.push_back(static_cast<std::uint32_t>(s));
            offsets_.push_back(patterns_.size());
            patterns_.insert(patterns_.end(), pats.begin(), pats.end());
        }
        offsets_.push_back(patterns_.size());
    }

    const StabilizerCode& code() const { return *code_; }
    int weight_cap() const { return wcap_; }
    bool exhaustive() const { return exhaustive_; }
    std::span<const std::uint32_t> reachable_syndromes() const { return synds_; }
    bool reachable(std::uint32_t synd) const { return synd < index_of_.size() && index_of_[synd] >= 0; }

    std::span<const std::uint64_t> patterns(std::uint32_t synd) const {
        if (!reachable(synd)) throw std::invalid_argument("BaseCosets: syndrome not reachable under the bit-flip channel");
        auto i = static_cast<std::size_t>(index_of_[synd]);
        return {patterns_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

  private:
    const StabilizerCode* code_;
    int wcap_;
    bool exhaustive_;
    std::vector<std::uint32_t> synds_;
    std::vector<std::int32_t> index_of_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint64_t> patterns_;
};

// Candidates for one syndrome under independent per-qubit flip priors,
// log-probabilities normalized over the returned set.
inline std::vector<std::pair<std::uint64_t, double>> candidates_x(const BaseCosets& cosets, std::uint32_t synd,
                                                                  std::span<const double> prior) {
    const std::size_t n = cosets.code().n();
    if (prior.size() != n) throw std::invalid_argument("candidates_x: prior size mismatch");
    double base = 0;
    std::vector<double> delta(n);
    for (std::size_t q = 0; q < n; ++q) {
        if (!(prior[q] > 0 && prior[q] < 1)) throw std::invalid_argument("candidates_x: prior must lie in (0, 1)");
        base += std::log1p(-prior[q]);
        delta[q] = std::log(prior[q]) - std::log1p(-prior[q]);
    }
    auto pats = cosets.patterns(synd);
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(pats.size());
    std::vector<double> lps(pats.size());
    for (std::size_t i = 0; i < pats.size(); ++i) {
        double lp = base;
        for (std::uint64_t m = pats[i]; m; m &= m - 1) lp += delta[static_cast<std::size_t>(std::countr_zero(m))];
        lps[i] = lp;
        out.push_back({pats[i], lp});
    }
    double z = detail::logsumexp(lps);
    for (auto& [x, lp] : out) lp -= z;
    return out;
}

// Per-syndrome class lists for a fixed uniform flip probability: sorted XList,
// direct class -> index lookup, per-logical marginals, and the most likely
// physical representative of each class.
class BaseInstance {
  public:
    BaseInstance() = default;
    BaseInstance(const BaseCosets& cosets, double p) {
        if (!(p > 0 && p < 1)) throw std::invalid_argument("BaseInstance: p must lie in (0, 1)");
        const StabilizerCode& code = cosets.code();
        const std::size_t n = code.n(), k = code.k();
        nsynd_ = std::size_t{1} << code.num_generators();
        k_ = k;
        std::vector<double> lp_of_weight(n + 1);
        for (std::size_t w = 0; w <= n; ++w)
            lp_of_weight[w] = static_cast<double>(w) * std::log(p) + static_cast<double>(n - w) * std::log1p(-p);

        classes_.resize(nsynd_);
        reps_.resize(nsynd_);
        index_.assign(nsynd_ << k, kAbsent);
        marginals_.assign(nsynd_ * k, 0.0);
        struct Acc {
            std::uint64_t rep;
            double rep_lp;
            std::vector<double> lps;
        };
        for (std::uint32_t s : cosets.reachable_syndromes()) {
            auto pats = cosets.patterns(s);
            std::vector<double> lps(pats.size());
            for (std::size_t i = 0; i < pats.size(); ++i)
                lps[i] = lp_of_weight[static_cast<std::size_t>(std::popcount(pats[i]))];
            double z = detail::logsumexp(lps);

            std::vector<std::uint32_t> order;  // distinct classes in first-seen order
            std::vector<Acc> acc;
            std::vector<std::int32_t> slot(std::size_t{1} << k, -1);
            for (std::size_t i = 0; i < pats.size(); ++i) {
                std::uint32_t c = code.class_x(pats[i]);
                double lp = lps[i] - z;
                if (slot[c] < 0) {
                    slot[c] = static_cast<std::int32_t>(acc.size());
                    order.push_back(c);
                    acc.push_back({pats[i], lp, {lp}});
                } else {
                    Acc& a = acc[static_cast<std::size_t>(slot[c])];
                    a.lps.push_back(lp);
                    if (lp > a.rep_lp || (lp == a.rep_lp && pats[i] < a.rep)) {
                        a.rep = pats[i];
                        a.rep_lp = lp;
                    }
                }
            }
            XList list;
            std::vector<std::uint64_t> reps;
            for (std::size_t j = 0; j < order.size(); ++j)
                list.push_back({order[j], detail::logsumexp(acc[j].lps)});
            detail::sort_xlist(list);
            for (const auto& e : list) reps.push_back(acc[static_cast<std::size_t>(slot[e.cls])].rep);
            for (std::size_t i = 0; i < list.size(); ++i) {
                index_[(std::size_t{s} << k) + list[i].cls] = static_cast<std::int32_t>(i);
                double pr = std::exp(list[i].logp);
                for (std::uint64_t m = list[i].cls; m; m &= m - 1)
                    marginals_[s * k + static_cast<std::size_t>(std::countr_zero(m))] += pr;
            }
            classes_[s] = std::move(list);
            reps_[s] = std::move(reps);
        }
    }

    // Sorted class list for a reachable syndrome (empty span if unreachable).
    const XList& classes(std::uint32_t synd) const { return classes_[synd]; }
    // Index of cls within classes(synd), or a negative sentinel when absent.
    std::int32_t class_index(std::uint32_t synd, std::uint64_t cls) const {
        return index_[(std::size_t{synd} << k_) + cls];
    }
    std::uint64_t representative(std::uint32_t synd, std::size_t idx) const { return reps_[synd][idx]; }
    // P(logical j flipped | syndrome), one entry per logical qubit.
    std::span<const double> marginals(std::uint32_t synd) const { return {marginals_.data() + synd * k_, k_}; }

    static constexpr std::int32_t kAbsent = -1;

  private:
    std::size_t nsynd_ = 0, k_ = 0;
    std::vector<XList> classes_;
    std::vector<std::vector<std::uint64_t>> reps_;
    std::vector<std::int32_t> index_;   // [synd << k | cls] -> list position
    std::vector<double> marginals_;
};

// Pauli-facing adapters used by tests and the single-shot CLI path.
inline std::vector<std::pair<Pauli, double>> base_candidates(const StabilizerCode& code, const BitVec& syndrome,
                                                             std::span<const double> prior, int weight_cap,
                                                             std::size_t exhaustive_threshold) {
    BaseCosets cosets(code, weight_cap, code.n() <= exhaustive_threshold);
    auto xs = candidates_x(cosets, code.pack_syndrome(syndrome), prior);
    std::vector<std::pair<Pauli, double>> out;
    out.reserve(xs.size());
    for (auto [x, lp] : xs)
        out.push_back({Pauli(BitVec::from_word(code.n(), x), BitVec(code.n())), lp});
    return out;
}

// Groups candidates by logical class (degenerate decoding): one entry per
// class, probabilities summed, sorted by descending probability.
inline SoftList class_list(const StabilizerCode& code, const std::vector<std::pair<Pauli, double>>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("class_list: empty candidate set");
    std::vector<LogicalClass> order;
    std::vector<std::vector<double>> member_lps;
    for (const auto& [e, lp] : candidates) {
        LogicalClass c = code.logical_class(e);
        auto it = std::find(order.begin(), order.end(), c);
        if (it == order.end()) {
            order.push_back(c);
            member_lps.push_back({lp});
        } else {
            member_lps[static_cast<std::size_t>(it - order.begin())].push_back(lp);
        }
    }
    SoftList out;
    for (std::size_t i = 0; i < order.size(); ++i)
        out.entries.push_back({order[i], detail::logsumexp(member_lps[i])});
    std::sort(out.entries.begin(), out.entries.end(), [](const SoftEntry& a, const SoftEntry& b) {
        if (a.logp != b.logp) return a.logp > b.logp;
        return a.cls < b.cls;
    });
    return out;
}

}  // namespace qconcat
