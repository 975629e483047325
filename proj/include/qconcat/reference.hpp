#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "qconcat/decoders.hpp"

namespace qconcat {
namespace detail {

inline void truncate_renormalize(SoftList& list, std::size_t limit) {
    if (list.entries.size() > limit) list.entries.resize(limit);
    std::vector<double> lps(list.entries.size());
    for (std::size_t i = 0; i < list.entries.size(); ++i) lps[i] = list.entries[i].logp;
    double z = logsumexp(lps);
    for (auto& e : list.entries) e.logp -= z;
}

// One recursion step of the readable decoder, written directly in terms of
// the public building blocks. `off` holds the first block index per level of
// the sub-code rooted here.
inline SoftList ref_scope(const ConcatenatedCode& cc, const SyndromeTree& tree, const DecoderConfig& cfg, double p,
                          std::size_t t, const std::vector<std::size_t>& off) {
    const StabilizerCode& base = cc.base();
    const std::size_t n = base.n(), k = base.k();
    if (t == 1) {
        std::vector<double> prior(n, p);
        return class_list(base, base_candidates(base, base.unpack_syndrome(tree.at(1, off[0])), prior,
                                                cfg.resolved_weight_cap(base), cfg.exhaustive_threshold));
    }

    std::vector<SoftList> lists(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::size_t> soff(t - 1);
        for (std::size_t tau = 1; tau + 1 <= t; ++tau) {
            std::size_t cnt = 1;  // blocks at level tau inside one (t-1)-level copy
            for (std::size_t i = 0; i < t - 1 - tau; ++i) cnt *= n;
            for (std::size_t i = 0; i + 1 < tau; ++i) cnt *= k;
            soff[tau - 1] = off[tau - 1] + c * cnt;
        }
        lists[c] = ref_scope(cc, tree, cfg, p, t - 1, soff);
        if (t - 1 >= 2) truncate_renormalize(lists[c], cfg.list_size);
    }
    std::size_t kout = 1;
    for (std::size_t i = 0; i + 1 < t; ++i) kout *= k;

    std::vector<double> gamma(n);
    for (std::size_t c = 0; c < n; ++c) gamma[c] = reliability(lists[c]);
    auto selected = select_blocks(gamma, std::min(cfg.flips, n));
    auto tps = generate_test_patterns(lists, selected, cfg.list_size, cfg.tp_cap);

    std::map<std::vector<BitVec>, bool> seen;
    std::vector<LogicalClass> arrival;
    std::map<LogicalClass, std::size_t> index_of;
    std::vector<std::vector<double>> member_lps;

    for (const auto& tp : tps) {
        std::vector<Pauli> corr(kout);
        for (std::size_t j = 0; j < kout; ++j) {
            BitVec q(n);
            for (std::size_t c = 0; c < n; ++c)
                if (lists[c].entries[tp[c]].cls.x_bit(j)) q.set(c);
            corr[j] = outer_correct(base, base.unpack_syndrome(tree.at(t, off[t - 1] + j)), Pauli(q, BitVec(n)));
        }
        auto cand = assemble_candidate(lists, tp, corr);
        if (!cand) continue;  // some block's required class is absent from its list
        std::vector<BitVec> key;
        key.reserve(n);
        for (const auto& c : cand->block_classes) key.push_back(c.bits());
        if (!seen.emplace(std::move(key), true).second) continue;

        // residual top class: each outer block sees the pattern written by the
        // required classes, already consistent with its observed syndrome
        LogicalClass top(kout * k);
        for (std::size_t j = 0; j < kout; ++j) {
            BitVec ph(n);
            for (std::size_t c = 0; c < n; ++c)
                if (cand->block_classes[c].x_bit(j)) ph.set(c);
            LogicalClass cj = base.logical_class(Pauli(ph, BitVec(n)));
            for (std::size_t m = 0; m < k; ++m)
                if (cj.x_bit(m)) top.set_x_bit(j * k + m, true);
        }
        auto [it, fresh] = index_of.emplace(top, arrival.size());
        if (fresh) {
            arrival.push_back(top);
            member_lps.emplace_back();
        }
        member_lps[it->second].push_back(cand->logp);
    }

    SoftList outl;
    if (arrival.empty()) {
        outl.entries.push_back({LogicalClass(kout * k), 0.0});  // HDD fallback
        return outl;
    }
    std::vector<double> glp(arrival.size());
    for (std::size_t g = 0; g < arrival.size(); ++g) glp[g] = logsumexp(member_lps[g]);
    double z = logsumexp(glp);
    for (std::size_t g = 0; g < arrival.size(); ++g) outl.entries.push_back({arrival[g], glp[g] - z});
    std::sort(outl.entries.begin(), outl.entries.end(), [](const SoftEntry& a, const SoftEntry& b) {
        if (a.logp != b.logp) return a.logp > b.logp;
        return a.cls < b.cls;
    });
    return outl;
}

}  // namespace detail

// Slow decoder with the same semantics as Decoder::lmld_ca, kept as an
// executable specification for property tests.
struct ReferenceResult {
    LogicalClass estimate;
    SoftList soft;
};

inline ReferenceResult reference_lmld_ca(const ConcatenatedCode& ccode, const SyndromeTree& tree,
                                         const DecoderConfig& cfg, double p) {
    cfg.validate();
    if (tree.levels() != ccode.levels()) throw std::invalid_argument("reference_lmld_ca: tree level count mismatch");
    for (std::size_t t = 1; t <= ccode.levels(); ++t)
        if (tree.blocks(t) != ccode.blocks_at(t))
            throw std::invalid_argument("reference_lmld_ca: tree block count mismatch");
    if (ccode.levels() >= 2 && cfg.flips > ccode.base().n())
        throw std::invalid_argument("reference_lmld_ca: M exceeds the inner block count");
    std::vector<std::size_t> off(ccode.levels(), 0);
    SoftList top = detail::ref_scope(ccode, tree, cfg, p, ccode.levels(), off);
    return {top.entries.front().cls, top};
}

}  // namespace qconcat
