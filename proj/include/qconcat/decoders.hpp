#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qconcat/base_lists.hpp"
#include "qconcat/concatenated.hpp"
#include "qconcat/soft.hpp"

namespace qconcat {

// Knobs shared by the soft decoders: number of perturbed blocks M, per-block
// list size D, an optional cap on the number of test patterns, the level-1
// coset weight cap (defaults to the base-code distance), and the threshold
// below which level-1 candidate sets are exhaustive.
struct DecoderConfig {
    std::size_t flips = 8;
    std::size_t list_size = 2;
    std::optional<std::size_t> tp_cap;
    std::optional<int> weight_cap;
    std::size_t exhaustive_threshold = 0;

    void validate() const {
        if (list_size < 1) throw std::invalid_argument("DecoderConfig: D must be >= 1");
        if (list_size > 255) throw std::invalid_argument("DecoderConfig: D above 255 is unsupported");
        if (tp_cap && *tp_cap < 1) throw std::invalid_argument("DecoderConfig: TP cap must be >= 1");
        if (weight_cap && *weight_cap < 0) throw std::invalid_argument("DecoderConfig: negative weight cap");
    }

    int resolved_weight_cap(const StabilizerCode& base) const {
        if (weight_cap) return *weight_cap;
        if (base.distance()) return *base.distance();
        throw std::invalid_argument("DecoderConfig: weight cap unset and code distance unknown");
    }
};

// Outer HDD correction under a test-pattern hypothesis: the coset leader of
// the outer syndrome updated by the hypothesis' own contribution.
inline Pauli outer_correct(const StabilizerCode& code, const BitVec& s_out, const Pauli& tp_contribution) {
    return code.recovery(s_out ^ code.syndrome(tp_contribution));
}

// One restricted-subset hypothesis: the required class per inner block and
// the summed block log-probability. An absent class anywhere voids the whole
// hypothesis (the null symbol), signalled by returning no value.
struct CandidateError {
    std::vector<LogicalClass> block_classes;
    double logp = 0;
};

inline std::optional<CandidateError> assemble_candidate(const std::vector<SoftList>& lists,
                                                        const std::vector<std::uint32_t>& tp,
                                                        const std::vector<Pauli>& outer_corrections) {
    const std::size_t nblocks = lists.size();
    const std::size_t kout = outer_corrections.size();
    CandidateError cand;
    cand.block_classes.reserve(nblocks);
    for (std::size_t c = 0; c < nblocks; ++c) {
        LogicalClass req = lists[c].entries.at(tp.at(c)).cls;
        if (req.k() != kout) throw std::invalid_argument("assemble_candidate: class width / correction count mismatch");
        for (std::size_t j = 0; j < kout; ++j) {
            if (outer_corrections[j].z().any()) throw std::invalid_argument("assemble_candidate: correction is not X-type");
            if (outer_corrections[j].x().get(c)) req.set_x_bit(j, !req.x_bit(j));
        }
        bool found = false;
        for (const auto& e : lists[c].entries) {
            if (e.cls == req) {
                cand.logp += e.logp;
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
        cand.block_classes.push_back(std::move(req));
    }
    return cand;
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

// The three decoders for one concatenated code under bit-flip noise. A
// Decoder owns per-probability candidate tables and reusable scratch, so use
// one instance per thread; decode results are pure functions of
// (tree, config, p).
class Decoder {
  public:
    Decoder(const ConcatenatedCode& ccode, DecoderConfig cfg) : cc_(&ccode), base_(&ccode.base()), cfg_(cfg) {
        cfg_.validate();
        const std::size_t n = base_->n(), k = base_->k(), r = cc_->levels();
        if (n > 16) throw std::invalid_argument("Decoder: base codes are limited to 16 qubits");
        if (k > 8) throw std::invalid_argument("Decoder: base codes are limited to 8 logical qubits");
        if (!base_->x_only_ok()) throw std::invalid_argument("Decoder: code does not support X-only decoding");
        if (r >= 2 && cfg_.flips > n) throw std::invalid_argument("Decoder: M exceeds the inner block count");
        std::size_t kout_top = 1;
        for (std::size_t t = 1; t + 1 <= r; ++t) {
            kout_top *= k;
            if (kout_top > 64) throw std::invalid_argument("Decoder: sub-code logical labels exceed 64 bits");
        }
        cosets_.emplace(*base_, cfg_.resolved_weight_cap(*base_), n <= cfg_.exhaustive_threshold);
        col_.resize(n);
        for (std::size_t q = 0; q < n; ++q) col_[q] = base_->synd_x(std::uint64_t{1} << q);

        // scope scratch: depth d decodes a (r - d)-level sub-code
        if (r >= 2) {
            scopes_.resize(r - 1);
            offs_.resize(r - 1);
            for (std::size_t d = 0; d + 1 < r; ++d) {
                const std::size_t t = r - d;
                std::size_t kout = 1;
                for (std::size_t i = 0; i + 1 < t; ++i) kout *= k;
                ScopeScratch& s = scopes_[d];
                s.kout = kout;
                s.lists.resize(n);
                s.own.resize(n);
                s.synd1.resize(n);
                s.gamma.resize(n);
                s.L.assign(n, 0);
                s.F.assign(n, 0);
                s.idx.assign(n, 0);
                s.lp.assign(n, 0);
                s.dirty_mark.assign(n, 0);
                s.Q.assign(kout, 0);
                s.A.assign(kout, 0);
                s.scur.assign(kout, 0);
                s.clsj.assign(kout, 0);
                s.souter.assign(kout, 0);
                s.words = (d == 0) ? (cc_->k_total() + 63) / 64 : 1;
                s.cw.assign(s.words, 0);
                s.sllr.assign(n * kout, 0.0);
                s.sbase.assign(n, 0.0);
                s.sorder.resize(kout);
                s.scost.resize(kout);
                s.szm.assign(kout * k, 0.0);
                s.szs.assign(kout * k, 0.0);
                s.smarg.assign(kout * k, 0.0);
                offs_[d].assign(t, 0);
            }
        }
    }

    const ConcatenatedCode& code() const { return *cc_; }
    const DecoderConfig& config() const { return cfg_; }

    // HDD hypothesizes the coset leader at every level; in the recovery frame
    // each leader's residual class is trivial by construction, so the
    // composed estimate is always the trivial class and decoding succeeds
    // exactly when the true residual class is trivial.
    LogicalClass hdd(const SyndromeTree& tree) const {
        check_tree(tree);
        return LogicalClass(cc_->k_total());
    }

    // Symbol-MAP: every sub-tree is summarized by per-symbol flip marginals;
    // one level up those marginals act as independent per-qubit priors, whose
    // top-D product assignments feed the same test-pattern search used by
    // lmld_ca. Each candidate is priced by the product prior (no class is
    // ever absent), and the top level hard-decides each symbol from its
    // candidate-set marginal.
    LogicalClass symbol_map(const SyndromeTree& tree, double p) {
        check_tree(tree);
        prepare(p);
        const std::size_t r = cc_->levels(), k = base_->k();
        LogicalClass est(cc_->k_total());
        if (r == 1) {
            auto m = instance_.marginals(reachable_syndrome(tree.at(1, 0)));
            for (std::size_t j = 0; j < k; ++j)
                if (m[j] > 0.5) est.set_x_bit(j, true);  // exact ties keep the trivial symbol
            return est;
        }
        tree_ = &tree;
        smap_scope(0, r);
        tree_ = nullptr;
        const std::vector<double>& m = scopes_[0].smarg;
        for (std::size_t l = 0; l < cc_->k_total(); ++l)
            if (m[l] > 0.5) est.set_x_bit(l, true);  // exact ties keep the trivial symbol
        return est;
    }

    struct LmldResult {
        LogicalClass estimate;
        SoftList soft;
    };

    LmldResult lmld_ca(const SyndromeTree& tree, double p) {
        check_tree(tree);
        prepare(p);
        const std::size_t r = cc_->levels(), k = base_->k();
        if (r == 1) {
            const XList& list = instance_.classes(reachable_syndrome(tree.at(1, 0)));
            LmldResult res;
            for (const auto& e : list) res.soft.entries.push_back({LogicalClass::from_packed(k, e.cls), e.logp});
            res.estimate = res.soft.entries.front().cls;
            return res;
        }
        tree_ = &tree;
        run_scope(0, r);
        tree_ = nullptr;
        ScopeScratch& s = scopes_[0];
        LmldResult res;
        if (s.group_count == 0) {
            res.estimate = LogicalClass(cc_->k_total());  // every hypothesis voided: HDD fallback
            res.soft.entries.push_back({res.estimate, 0.0});
            return res;
        }
        std::vector<double> lps(s.group_count);
        for (std::size_t g = 0; g < s.group_count; ++g) lps[g] = s.g_m[g] + std::log(s.g_s[g]);
        double z = detail::logsumexp(lps);
        std::vector<std::size_t> order(s.group_count);
        for (std::size_t g = 0; g < s.group_count; ++g) order[g] = g;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (lps[a] != lps[b]) return lps[a] > lps[b];
            return words_less(s, a, b);
        });
        // Analytically tied top classes differ only by summation noise here,
        // while an exact reimplementation may compute them bitwise equal; rank
        // the tied leaders by class so both break the tie identically.
        std::size_t tied = 1;
        while (tied < s.group_count && lps[order[tied]] >= lps[order[0]] - kTieTol) ++tied;
        std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(tied),
                  [&](std::size_t a, std::size_t b) { return words_less(s, a, b); });
        for (std::size_t g : order) {
            BitVec bits(2 * cc_->k_total());
            for (std::size_t w = 0; w < s.words; ++w) {
                std::size_t lo = w * 64;
                if (lo >= cc_->k_total()) break;
                std::size_t len = std::min<std::size_t>(64, cc_->k_total() - lo);
                bits.deposit_bits(lo, len, s.g_words[g * s.words + w]);
            }
            res.soft.entries.push_back({LogicalClass(std::move(bits)), lps[g] - z});
        }
        res.estimate = res.soft.entries.front().cls;
        return res;
    }

  private:
    static constexpr double kMarginalFloor = 1e-12;
    static constexpr double kTieTol = 1e-9;
    static constexpr std::size_t kTpLimit = std::size_t{1} << 20;

    struct ScopeScratch {
        std::size_t kout = 0, words = 0;
        // inner block lists
        std::vector<std::span<const XSoftEntry>> lists;
        std::vector<XList> own;
        std::vector<std::uint32_t> synd1;
        std::vector<double> gamma;
        std::vector<std::size_t> sel;
        std::vector<std::vector<double>> weights;
        std::vector<std::uint32_t> digits, prev_digits;
        // per inner block TP state
        std::vector<std::uint64_t> L, F;
        std::vector<std::int32_t> idx;  // list position of the required class, -1 when absent
        std::vector<double> lp;
        std::size_t phi = 0;
        // per outer block TP state
        std::vector<std::uint64_t> Q, A;
        std::vector<std::uint32_t> scur, clsj, souter;
        std::vector<std::uint64_t> cw;  // candidate top-class words
        // dirty blocks within one TP transition
        std::vector<std::uint32_t> dirty;
        std::vector<std::uint32_t> dirty_mark;
        std::uint32_t dirty_epoch = 0;
        // dedup of required-class index tuples (8 bits per block)
        std::vector<std::uint64_t> dk_lo, dk_hi;
        std::vector<std::uint32_t> d_stamp;
        std::uint32_t d_epoch = 0;
        std::size_t d_mask = 0;
        // grouping by top-level class, accumulated in arrival order
        std::vector<std::uint32_t> g_slot, g_stamp;
        std::uint32_t g_epoch = 0;
        std::size_t g_mask = 0;
        std::vector<std::uint64_t> g_words;
        std::vector<double> g_m, g_s;
        std::size_t group_count = 0;
        // sub-scope output
        XList out;
        // symbol-MAP: per-block product priors, candidate identities, and
        // streaming per-symbol marginal accumulators
        std::vector<double> sllr, sbase;
        std::vector<std::uint32_t> sorder;
        struct Flip {
            double cost;
            std::uint64_t mask;
            std::uint32_t last;
        };
        std::vector<Flip> sheap;
        std::vector<double> scost;
        std::vector<std::uint64_t> sreq;
        std::vector<std::uint32_t> sd_slot, sd_stamp;
        std::uint32_t sd_epoch = 0;
        std::size_t sd_mask = 0;
        std::vector<double> szm, szs;
        double za_m = 0, za_s = 0;
        std::vector<double> smarg;
    };

    void check_tree(const SyndromeTree& tree) const {
        if (tree.levels() != cc_->levels()) throw std::invalid_argument("Decoder: tree level count mismatch");
        for (std::size_t t = 1; t <= cc_->levels(); ++t)
            if (tree.blocks(t) != cc_->blocks_at(t)) throw std::invalid_argument("Decoder: tree block count mismatch");
    }

    std::uint32_t reachable_syndrome(std::uint32_t s) const {
        if (!cosets_->reachable(s))
            throw std::invalid_argument("Decoder: syndrome not reachable under the bit-flip channel");
        return s;
    }

    void prepare(double p) {
        if (ready_ && p == p_) return;
        instance_ = BaseInstance(*cosets_, p);
        p_ = p;
        ready_ = true;
    }

    static bool words_less(const ScopeScratch& s, std::size_t a, std::size_t b) {
        for (std::size_t w = s.words; w-- > 0;) {
            std::uint64_t wa = s.g_words[a * s.words + w], wb = s.g_words[b * s.words + w];
            if (wa != wb) return wa < wb;
        }
        return false;
    }

    // Decode the (r - d)-level sub-code whose per-level block offsets are in
    // offs_[d]; results land in scopes_[d] (groups at depth 0, a truncated
    // XList otherwise).
    void run_scope(std::size_t d, std::size_t t) {
        ScopeScratch& s = scopes_[d];
        const std::size_t n = base_->n(), k = base_->k();
        const SyndromeTree& tree = *tree_;

        if (t == 2) {
            for (std::size_t c = 0; c < n; ++c) {
                std::uint32_t s1 = reachable_syndrome(tree.at(1, offs_[d][0] + c));
                s.synd1[c] = s1;
                const XList& full = instance_.classes(s1);
                s.lists[c] = {full.data(), full.size()};
            }
        } else {
            for (std::size_t c = 0; c < n; ++c) {
                // copy c occupies a contiguous block range per level: its
                // (t-1)-level sub-code has n^(t-1-tau) k^(tau-1) blocks at level tau
                for (std::size_t tau = 1; tau <= t - 1; ++tau) {
                    std::size_t cnt = 1;
                    for (std::size_t i = 0; i < t - 1 - tau; ++i) cnt *= n;
                    for (std::size_t i = 0; i + 1 < tau; ++i) cnt *= k;
                    offs_[d + 1][tau - 1] = offs_[d][tau - 1] + c * cnt;
                }
                run_scope(d + 1, t - 1);
                s.own[c] = scopes_[d + 1].out;
                s.lists[c] = {s.own[c].data(), s.own[c].size()};
            }
        }

        for (std::size_t j = 0; j < s.kout; ++j) s.souter[j] = tree.at(t, offs_[d][t - 1] + j);
        for (std::size_t c = 0; c < n; ++c) s.gamma[c] = reliability_x_span(s.lists[c]);

        s.sel = select_blocks(s.gamma, std::min(cfg_.flips, n));
        s.weights.assign(s.sel.size(), {});
        double full_count = 1;
        for (std::size_t i = 0; i < s.sel.size(); ++i) {
            const auto& list = s.lists[s.sel[i]];
            std::size_t m = std::min<std::size_t>(cfg_.list_size, list.size());
            s.weights[i].resize(m);
            for (std::size_t e = 0; e < m; ++e) s.weights[i][e] = list[e].logp;
            full_count *= static_cast<double>(m);
        }
        double bound = full_count;
        if (cfg_.tp_cap) bound = std::min(bound, static_cast<double>(*cfg_.tp_cap));
        if (bound > static_cast<double>(kTpLimit))
            throw std::invalid_argument("Decoder: test-pattern count exceeds " + std::to_string(kTpLimit) +
                                        "; set a TP cap");
        size_tables(s, static_cast<std::size_t>(bound));

        init_state(s, t);
        TpEnumerator en(s.weights, cfg_.tp_cap);
        s.prev_digits.assign(s.sel.size(), 0);
        bool first = true;
        while (en.next(s.digits)) {
            if (!first) {
                ++s.dirty_epoch;
                s.dirty.clear();
                for (std::size_t i = 0; i < s.sel.size(); ++i)
                    if (s.digits[i] != s.prev_digits[i])
                        set_block_class(s, s.sel[i], s.lists[s.sel[i]][s.digits[i]].cls);
                for (std::uint32_t c : s.dirty) refresh_block(s, t, c);
            }
            first = false;
            emit(s);
            s.prev_digits = s.digits;
        }

        if (d == 0) return;
        // sub-scope soft output: top min(D, available) classes, renormalized
        s.out.clear();
        if (s.group_count == 0) {
            s.out.push_back({0, 0.0});
            scopes_[d].out = s.out;
            return;
        }
        std::vector<double> lps(s.group_count);
        for (std::size_t g = 0; g < s.group_count; ++g) lps[g] = s.g_m[g] + std::log(s.g_s[g]);
        double z = detail::logsumexp(lps);
        for (std::size_t g = 0; g < s.group_count; ++g) s.out.push_back({s.g_words[g], lps[g] - z});
        detail::sort_xlist(s.out);
        detail::truncate_renormalize(s.out, cfg_.list_size);
    }

    // Symbol-MAP analogue of run_scope. Block lists hold the top-D class
    // assignments under the child marginal product, candidate weights come
    // straight from those priors (so no required class is ever absent), and
    // the scope reduces its candidate set to per-symbol marginals in smarg.
    void smap_scope(std::size_t d, std::size_t t) {
        ScopeScratch& s = scopes_[d];
        const std::size_t n = base_->n(), k = base_->k();
        const SyndromeTree& tree = *tree_;

        if (t == 2) {
            for (std::size_t c = 0; c < n; ++c)
                build_product_list(s, c, instance_.marginals(reachable_syndrome(tree.at(1, offs_[d][0] + c))));
        } else {
            for (std::size_t c = 0; c < n; ++c) {
                for (std::size_t tau = 1; tau <= t - 1; ++tau) {
                    std::size_t cnt = 1;
                    for (std::size_t i = 0; i < t - 1 - tau; ++i) cnt *= n;
                    for (std::size_t i = 0; i + 1 < tau; ++i) cnt *= k;
                    offs_[d + 1][tau - 1] = offs_[d][tau - 1] + c * cnt;
                }
                smap_scope(d + 1, t - 1);
                build_product_list(s, c, scopes_[d + 1].smarg);
            }
        }

        for (std::size_t j = 0; j < s.kout; ++j) s.souter[j] = tree.at(t, offs_[d][t - 1] + j);
        for (std::size_t c = 0; c < n; ++c) s.gamma[c] = reliability_x_span(s.lists[c]);

        s.sel = select_blocks(s.gamma, std::min(cfg_.flips, n));
        s.weights.assign(s.sel.size(), {});
        double full_count = 1;
        for (std::size_t i = 0; i < s.sel.size(); ++i) {
            const auto& list = s.lists[s.sel[i]];
            std::size_t m = std::min<std::size_t>(cfg_.list_size, list.size());
            s.weights[i].resize(m);
            for (std::size_t e = 0; e < m; ++e) s.weights[i][e] = list[e].logp;
            full_count *= static_cast<double>(m);
        }
        double bound = full_count;
        if (cfg_.tp_cap) bound = std::min(bound, static_cast<double>(*cfg_.tp_cap));
        if (bound > static_cast<double>(kTpLimit))
            throw std::invalid_argument("Decoder: test-pattern count exceeds " + std::to_string(kTpLimit) +
                                        "; set a TP cap");
        smap_size_tables(s, static_cast<std::size_t>(bound));

        init_tp_state(s);
        for (std::size_t c = 0; c < n; ++c) s.lp[c] = product_lp(s, c, s.L[c] ^ s.F[c]);
        TpEnumerator en(s.weights, cfg_.tp_cap);
        s.prev_digits.assign(s.sel.size(), 0);
        bool first = true;
        while (en.next(s.digits)) {
            if (!first) {
                ++s.dirty_epoch;
                s.dirty.clear();
                for (std::size_t i = 0; i < s.sel.size(); ++i)
                    if (s.digits[i] != s.prev_digits[i])
                        set_block_class(s, s.sel[i], s.lists[s.sel[i]][s.digits[i]].cls);
                for (std::uint32_t c : s.dirty) s.lp[c] = product_lp(s, c, s.L[c] ^ s.F[c]);
            }
            first = false;
            semit(s);
            s.prev_digits = s.digits;
        }

        double za = s.za_m + std::log(s.za_s);
        for (std::size_t l = 0; l < s.kout * k; ++l)
            s.smarg[l] = (s.szs[l] == 0) ? 0.0 : std::exp(s.szm[l] + std::log(s.szs[l]) - za);
    }

    // Top-min(D, 2^kout) class assignments under independent per-symbol flip
    // marginals; also records the log-odds used to weight arbitrary classes.
    void build_product_list(ScopeScratch& s, std::size_t c, std::span<const double> marg) {
        const std::size_t kout = s.kout;
        double* llr = s.sllr.data() + c * kout;
        double base = 0;
        std::uint64_t a0 = 0;
        for (std::size_t j = 0; j < kout; ++j) {
            double q = std::clamp(marg[j], kMarginalFloor, 1 - kMarginalFloor);
            llr[j] = std::log(q) - std::log1p(-q);
            base += std::log1p(-q);
            if (llr[j] > 0) a0 |= std::uint64_t{1} << j;
        }
        s.sbase[c] = base;
        double lp0 = base;
        for (std::uint64_t m = a0; m; m &= m - 1) lp0 += llr[std::countr_zero(m)];

        for (std::size_t j = 0; j < kout; ++j) s.sorder[j] = static_cast<std::uint32_t>(j);
        std::sort(s.sorder.begin(), s.sorder.end(), [&](std::uint32_t a, std::uint32_t b) {
            double ca = std::abs(llr[a]), cb = std::abs(llr[b]);
            if (ca != cb) return ca < cb;
            return a < b;
        });
        for (std::size_t j = 0; j < kout; ++j) s.scost[j] = std::abs(llr[s.sorder[j]]);

        std::size_t want = cfg_.list_size;
        if (kout < 20) want = std::min<std::size_t>(want, std::size_t{1} << kout);
        XList& out = s.own[c];
        out.clear();
        out.push_back({a0, lp0});
        auto heap_less = [](const ScopeScratch::Flip& a, const ScopeScratch::Flip& b) {
            if (a.cost != b.cost) return a.cost > b.cost;  // min-heap
            return a.mask > b.mask;
        };
        s.sheap.clear();
        if (want > 1) s.sheap.push_back({s.scost[0], 1, 0});
        while (out.size() < want && !s.sheap.empty()) {
            std::pop_heap(s.sheap.begin(), s.sheap.end(), heap_less);
            ScopeScratch::Flip f = s.sheap.back();
            s.sheap.pop_back();
            std::uint64_t flips = 0;
            for (std::uint64_t m = f.mask; m; m &= m - 1)
                flips |= std::uint64_t{1} << s.sorder[std::countr_zero(m)];
            out.push_back({a0 ^ flips, lp0 - f.cost});
            if (f.last + 1 < kout) {
                s.sheap.push_back({f.cost + s.scost[f.last + 1], f.mask | (std::uint64_t{1} << (f.last + 1)),
                                   f.last + 1});
                std::push_heap(s.sheap.begin(), s.sheap.end(), heap_less);
                s.sheap.push_back({f.cost - s.scost[f.last] + s.scost[f.last + 1],
                                   (f.mask ^ (std::uint64_t{1} << f.last)) | (std::uint64_t{1} << (f.last + 1)),
                                   f.last + 1});
                std::push_heap(s.sheap.begin(), s.sheap.end(), heap_less);
            }
        }
        detail::sort_xlist(out);
        s.lists[c] = {out.data(), out.size()};
    }

    double product_lp(const ScopeScratch& s, std::size_t c, std::uint64_t cls) const {
        const double* llr = s.sllr.data() + c * s.kout;
        double lp = s.sbase[c];
        for (std::uint64_t m = cls; m; m &= m - 1) lp += llr[std::countr_zero(m)];
        return lp;
    }

    void smap_size_tables(ScopeScratch& s, std::size_t bound) {
        std::size_t want = std::bit_ceil(std::max<std::size_t>(2 * bound, 16));
        if (s.sd_stamp.size() < want) {
            s.sd_slot.assign(want, 0);
            s.sd_stamp.assign(want, 0);
            s.sd_epoch = 0;
        }
        s.sd_mask = s.sd_stamp.size() - 1;
        ++s.sd_epoch;
        s.sreq.clear();
        std::fill(s.szm.begin(), s.szm.end(), 0.0);
        std::fill(s.szs.begin(), s.szs.end(), 0.0);
        s.za_m = 0;
        s.za_s = 0;
    }

    void semit(ScopeScratch& s) {
        const std::size_t n = base_->n();
        std::uint64_t h = 0;
        for (std::size_t c = 0; c < n; ++c) h = detail::mix64(h ^ (s.L[c] ^ s.F[c]));
        std::size_t slot = static_cast<std::size_t>(h) & s.sd_mask;
        for (;;) {
            if (s.sd_stamp[slot] != s.sd_epoch) break;
            const std::uint64_t* prev = s.sreq.data() + static_cast<std::size_t>(s.sd_slot[slot]) * n;
            bool same = true;
            for (std::size_t c = 0; c < n; ++c)
                if (prev[c] != (s.L[c] ^ s.F[c])) {
                    same = false;
                    break;
                }
            if (same) return;  // duplicate hypothesis
            slot = (slot + 1) & s.sd_mask;
        }
        s.sd_stamp[slot] = s.sd_epoch;
        s.sd_slot[slot] = static_cast<std::uint32_t>(s.sreq.size() / n);
        for (std::size_t c = 0; c < n; ++c) s.sreq.push_back(s.L[c] ^ s.F[c]);

        double lp = 0;
        for (std::size_t c = 0; c < n; ++c) lp += s.lp[c];
        if (s.za_s == 0) {
            s.za_m = lp;
            s.za_s = 1.0;
        } else if (lp <= s.za_m) {
            s.za_s += std::exp(lp - s.za_m);
        } else {
            s.za_s = s.za_s * std::exp(s.za_m - lp) + 1.0;
            s.za_m = lp;
        }
        for (std::size_t w = 0; w < s.words; ++w)
            for (std::uint64_t m = s.cw[w]; m; m &= m - 1) {
                std::size_t l = w * 64 + static_cast<std::size_t>(std::countr_zero(m));
                if (s.szs[l] == 0) {
                    s.szm[l] = lp;
                    s.szs[l] = 1.0;
                } else if (lp <= s.szm[l]) {
                    s.szs[l] += std::exp(lp - s.szm[l]);
                } else {
                    s.szs[l] = s.szs[l] * std::exp(s.szm[l] - lp) + 1.0;
                    s.szm[l] = lp;
                }
            }
    }

    static double reliability_x_span(std::span<const XSoftEntry> list) {
        if (list.empty()) throw std::logic_error("Decoder: empty block list");
        if (list.size() == 1) return std::numeric_limits<double>::infinity();
        return list[0].logp - list[1].logp;
    }

    void size_tables(ScopeScratch& s, std::size_t bound) {
        std::size_t want = std::bit_ceil(std::max<std::size_t>(2 * bound, 16));
        if (s.d_stamp.size() < want) {
            s.dk_lo.assign(want, 0);
            s.dk_hi.assign(want, 0);
            s.d_stamp.assign(want, 0);
            s.d_epoch = 0;
            s.g_slot.assign(want, 0);
            s.g_stamp.assign(want, 0);
            s.g_epoch = 0;
        }
        s.d_mask = s.d_stamp.size() - 1;
        s.g_mask = s.g_stamp.size() - 1;
        ++s.d_epoch;
        ++s.g_epoch;
        s.group_count = 0;
        s.g_words.clear();
        s.g_m.clear();
        s.g_s.clear();
    }

    void mark_dirty(ScopeScratch& s, std::size_t c) {
        if (s.dirty_mark[c] != s.dirty_epoch) {
            s.dirty_mark[c] = s.dirty_epoch;
            s.dirty.push_back(static_cast<std::uint32_t>(c));
        }
    }

    void xor_class_words(ScopeScratch& s, std::size_t j, std::uint64_t delta) const {
        const std::size_t k = base_->k();
        std::size_t bit = j * k, w = bit / 64, off = bit % 64;
        s.cw[w] ^= delta << off;
        if (off != 0 && off + k > 64) s.cw[w + 1] ^= delta >> (64 - off);
    }

    void set_block_class(ScopeScratch& s, std::size_t b, std::uint64_t cls) {
        std::uint64_t delta = s.L[b] ^ cls;
        if (!delta) return;
        s.L[b] = cls;
        mark_dirty(s, b);
        while (delta) {
            std::size_t j = static_cast<std::size_t>(std::countr_zero(delta));
            delta &= delta - 1;
            s.Q[j] ^= std::uint64_t{1} << b;
            s.scur[j] ^= col_[b];
            std::uint64_t na = base_->leader_x(s.scur[j]);
            if (na != s.A[j]) {
                for (std::uint64_t ch = s.A[j] ^ na; ch; ch &= ch - 1) {
                    std::size_t c2 = static_cast<std::size_t>(std::countr_zero(ch));
                    s.F[c2] ^= std::uint64_t{1} << j;
                    mark_dirty(s, c2);
                }
                s.A[j] = na;
            }
            std::uint32_t nc = base_->class_x(s.Q[j] ^ s.A[j]);
            if (nc != s.clsj[j]) {
                xor_class_words(s, j, s.clsj[j] ^ nc);
                s.clsj[j] = nc;
            }
        }
    }

    std::int32_t lookup(const ScopeScratch& s, std::size_t t, std::size_t c, std::uint64_t cls) const {
        if (t == 2) return instance_.class_index(s.synd1[c], cls);
        auto list = s.lists[c];
        for (std::size_t i = 0; i < list.size(); ++i)
            if (list[i].cls == cls) return static_cast<std::int32_t>(i);
        return -1;
    }

    void refresh_block(ScopeScratch& s, std::size_t t, std::size_t c) {
        if (s.idx[c] < 0) --s.phi;
        std::int32_t ni = lookup(s, t, c, s.L[c] ^ s.F[c]);
        s.idx[c] = ni;
        if (ni < 0) {
            ++s.phi;
            s.lp[c] = 0;
        } else {
            s.lp[c] = s.lists[c][static_cast<std::size_t>(ni)].logp;
        }
    }

    void init_tp_state(ScopeScratch& s) {
        const std::size_t n = base_->n();
        std::fill(s.F.begin(), s.F.end(), 0);
        std::fill(s.Q.begin(), s.Q.end(), 0);
        std::fill(s.cw.begin(), s.cw.end(), 0);
        for (std::size_t c = 0; c < n; ++c) {
            s.L[c] = s.lists[c][0].cls;
            for (std::uint64_t m = s.L[c]; m; m &= m - 1)
                s.Q[static_cast<std::size_t>(std::countr_zero(m))] |= std::uint64_t{1} << c;
        }
        for (std::size_t j = 0; j < s.kout; ++j) {
            s.scur[j] = s.souter[j] ^ base_->synd_x(s.Q[j]);
            s.A[j] = base_->leader_x(s.scur[j]);
            for (std::uint64_t m = s.A[j]; m; m &= m - 1)
                s.F[static_cast<std::size_t>(std::countr_zero(m))] ^= std::uint64_t{1} << j;
            s.clsj[j] = base_->class_x(s.Q[j] ^ s.A[j]);
            xor_class_words(s, j, s.clsj[j]);
        }
        s.dirty_epoch = 0;
        std::fill(s.dirty_mark.begin(), s.dirty_mark.end(), 0);
        ++s.dirty_epoch;
    }

    void init_state(ScopeScratch& s, std::size_t t) {
        init_tp_state(s);
        const std::size_t n = base_->n();
        s.phi = 0;
        for (std::size_t c = 0; c < n; ++c) {
            std::int32_t i = lookup(s, t, c, s.L[c] ^ s.F[c]);
            s.idx[c] = i;
            if (i < 0) {
                ++s.phi;
                s.lp[c] = 0;
            } else {
                s.lp[c] = s.lists[c][static_cast<std::size_t>(i)].logp;
            }
        }
    }

    void emit(ScopeScratch& s) {
        if (s.phi != 0) return;
        const std::size_t n = base_->n();
        // required-class index tuple, 8 bits per block
        std::uint64_t lo = 0, hi = 0;
        for (std::size_t c = 0; c < n && c < 8; ++c) lo |= static_cast<std::uint64_t>(s.idx[c] & 0xff) << (8 * c);
        for (std::size_t c = 8; c < n; ++c) hi |= static_cast<std::uint64_t>(s.idx[c] & 0xff) << (8 * (c - 8));
        std::size_t h = static_cast<std::size_t>(detail::mix64(lo ^ detail::mix64(hi))) & s.d_mask;
        while (s.d_stamp[h] == s.d_epoch) {
            if (s.dk_lo[h] == lo && s.dk_hi[h] == hi) return;  // duplicate hypothesis
            h = (h + 1) & s.d_mask;
        }
        s.d_stamp[h] = s.d_epoch;
        s.dk_lo[h] = lo;
        s.dk_hi[h] = hi;

        double lp = 0;
        for (std::size_t c = 0; c < n; ++c) lp += s.lp[c];

        std::uint64_t gh = 0;
        for (std::size_t w = 0; w < s.words; ++w) gh = detail::mix64(gh ^ s.cw[w]);
        std::size_t g = static_cast<std::size_t>(gh) & s.g_mask;
        for (;;) {
            if (s.g_stamp[g] != s.g_epoch) {
                s.g_stamp[g] = s.g_epoch;
                s.g_slot[g] = static_cast<std::uint32_t>(s.group_count);
                for (std::size_t w = 0; w < s.words; ++w) s.g_words.push_back(s.cw[w]);
                s.g_m.push_back(lp);
                s.g_s.push_back(1.0);
                ++s.group_count;
                return;
            }
            std::size_t gi = s.g_slot[g];
            bool same = true;
            for (std::size_t w = 0; w < s.words; ++w)
                if (s.g_words[gi * s.words + w] != s.cw[w]) {
                    same = false;
                    break;
                }
            if (same) {
                if (lp <= s.g_m[gi]) {
                    s.g_s[gi] += std::exp(lp - s.g_m[gi]);
                } else {
                    s.g_s[gi] = s.g_s[gi] * std::exp(s.g_m[gi] - lp) + 1.0;
                    s.g_m[gi] = lp;
                }
                return;
            }
            g = (g + 1) & s.g_mask;
        }
    }

    const ConcatenatedCode* cc_;
    const StabilizerCode* base_;
    DecoderConfig cfg_;
    std::optional<BaseCosets> cosets_;
    BaseInstance instance_;
    double p_ = -1;
    bool ready_ = false;
    std::vector<std::uint32_t> col_;
    std::vector<ScopeScratch> scopes_;
    std::vector<std::vector<std::size_t>> offs_;
    const SyndromeTree* tree_ = nullptr;
};

inline LogicalClass hdd_decode(const ConcatenatedCode& ccode, const SyndromeTree& tree) {
    if (tree.levels() != ccode.levels()) throw std::invalid_argument("hdd_decode: tree level count mismatch");
    for (std::size_t t = 1; t <= ccode.levels(); ++t)
        if (tree.blocks(t) != ccode.blocks_at(t)) throw std::invalid_argument("hdd_decode: tree block count mismatch");
    return LogicalClass(ccode.k_total());
}

inline LogicalClass symbol_map_decode(const ConcatenatedCode& ccode, const SyndromeTree& tree,
                                      const DecoderConfig& cfg, double p) {
    Decoder dec(ccode, cfg);
    return dec.symbol_map(tree, p);
}

inline std::pair<LogicalClass, SoftList> lmld_ca_decode(const ConcatenatedCode& ccode, const SyndromeTree& tree,
                                                        const DecoderConfig& cfg, double p) {
    Decoder dec(ccode, cfg);
    auto res = dec.lmld_ca(tree, p);
    return {res.estimate, res.soft};
}

}  // namespace qconcat
