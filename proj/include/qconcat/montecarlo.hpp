#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qconcat/concatenated.hpp"
#include "qconcat/decoders.hpp"
#include "qconcat/oracle.hpp"
#include "qconcat/rng.hpp"

namespace qconcat {

// 95% Wilson score interval; preferred over the normal approximation because
// stopping rules as low as 200 errors make the latter inaccurate.
struct Interval {
    double low = 0;
    double high = 0;
};

inline Interval wilson95(std::uint64_t errors, std::uint64_t trials) {
    if (errors > trials) throw std::invalid_argument("wilson95: errors exceed trials");
    if (trials == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (ph + z2 / (2.0 * n)) / denom;
    const double half = (z / denom) * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

enum class DecoderKind { kHdd, kSymbolMap, kLmldCa, kOracle };

// A decoder selection: kind plus the tuning knobs that apply to it. The
// display string is the canonical command-line name.
struct DecoderSpec {
    DecoderKind kind = DecoderKind::kHdd;
    DecoderConfig cfg;
    std::string display = "hdd";
};

namespace detail {

inline std::uint64_t parse_u64_token(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e)
        throw std::invalid_argument(std::string(key) + ": expected a non-negative integer, got '" +
                                    std::string(text) + "'");
    return v;
}

inline std::vector<std::string_view> split_tokens(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == ',')) ++i;
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != ',') ++j;
        if (j > i) out.push_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace detail

// Parses "lmld-ca M=8 D=4 wmax=3 tpcap=4096" and friends. The first token
// names the decoder; the rest tune it. Errors name the offending token.
inline DecoderSpec parse_decoder_spec(std::string_view text) {
    const auto toks = detail::split_tokens(text);
    if (toks.empty()) throw std::invalid_argument("decoder: empty decoder string");
    DecoderSpec spec;
    if (toks[0] == "hdd")
        spec.kind = DecoderKind::kHdd;
    else if (toks[0] == "symbol-map")
        spec.kind = DecoderKind::kSymbolMap;
    else if (toks[0] == "lmld-ca")
        spec.kind = DecoderKind::kLmldCa;
    else if (toks[0] == "oracle")
        spec.kind = DecoderKind::kOracle;
    else
        throw std::invalid_argument("decoder: unknown decoder '" + std::string(toks[0]) +
                                    "' (expected hdd, symbol-map, lmld-ca, or oracle)");
    spec.display = std::string(toks[0]);
    for (std::size_t i = 1; i < toks.size(); ++i) {
        const std::string_view tok = toks[i];
        const std::size_t eq = tok.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw std::invalid_argument("decoder: expected option=value, got '" + std::string(tok) + "'");
        const std::string_view key = tok.substr(0, eq);
        const std::string_view val = tok.substr(eq + 1);
        if (key == "M")
            spec.cfg.flips = detail::parse_u64_token("decoder: M", val);
        else if (key == "D")
            spec.cfg.list_size = detail::parse_u64_token("decoder: D", val);
        else if (key == "wmax")
            spec.cfg.weight_cap = static_cast<int>(detail::parse_u64_token("decoder: wmax", val));
        else if (key == "tpcap")
            spec.cfg.tp_cap = detail::parse_u64_token("decoder: tpcap", val);
        else
            throw std::invalid_argument("decoder: unknown option '" + std::string(key) + "'");
    }
    spec.cfg.validate();
    return spec;
}

// One experiment: a code, one decoder, a p sweep, and the stopping rule.
// Batch size is part of the config because the stopping check runs at batch
// boundaries; keeping it fixed makes results worker-count independent.
struct SimConfig {
    std::string label = "default";
    std::string code = "hamming15";
    std::size_t levels = 2;
    DecoderSpec decoder;
    std::vector<double> p_list;
    std::uint64_t min_errors = 1;
    std::uint64_t max_trials = 100000000;
    std::uint64_t batch = 1024;
    std::uint64_t seed = 1;
    std::size_t workers = 1;

    void validate() const {
        if (levels < 1) throw std::invalid_argument("levels: must be >= 1");
        if (p_list.empty()) throw std::invalid_argument("p: at least one point is required");
        for (double p : p_list)
            if (!(p > 0.0 && p < 0.5))
                throw std::invalid_argument("p: points must lie in (0, 1/2), got " + detail::fmt_g(p));
        if (min_errors < 1) throw std::invalid_argument("min_errors: must be >= 1");
        if (max_trials < min_errors) throw std::invalid_argument("max_trials: must be >= min_errors");
        if (batch < 1) throw std::invalid_argument("batch: must be >= 1");
        if (workers < 1) throw std::invalid_argument("workers: must be >= 1");
        decoder.cfg.validate();
    }
};

struct AggregateStats {
    double p = 0;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double error_rate = 0;
    double ci_low = 0;
    double ci_high = 0;
    double seconds = 0;
    bool failed = false;    // the decoder refused the point (e.g. oracle size limit)
    std::string message;
};

inline ConcatenatedCode make_code(const std::string& name, std::size_t levels) {
    if (name == "hamming15") return ConcatenatedCode(StabilizerCode::quantum_hamming_15_7_3(), levels);
    if (name == "c422") return ConcatenatedCode(StabilizerCode::code_422(), levels);
    throw std::invalid_argument("code: unknown code '" + name + "' (expected hamming15 or c422)");
}

namespace detail {

inline bool class_matches_x(const LogicalClass& est, std::span<const std::uint64_t> truth) {
    const std::size_t kt = est.k();
    for (std::size_t j = 0; j < kt; ++j) {
        const bool t = (truth[j >> 6] >> (j & 63)) & 1u;
        if (est.x_bit(j) != t) return false;
    }
    for (std::size_t j = 0; j < kt; ++j)
        if (est.z_bit(j)) return false;
    return true;
}

// Per-worker trial evaluator: owns the decoder instance and all scratch, so
// a trial is a pure function of (seed, point, trial index).
class TrialRunner {
  public:
    TrialRunner(const ConcatenatedCode& code, const DecoderSpec& spec, double p)
        : code_(&code),
          kind_(spec.kind),
          p_(p),
          threshold_(flip_threshold(p)),
          tree_(code.empty_tree()),
          work_(code.make_xwork()),
          level1_(code.blocks_at(1)) {
        switch (kind_) {
            case DecoderKind::kHdd:
                break;  // the estimate is the trivial class; nothing to build
            case DecoderKind::kSymbolMap:
            case DecoderKind::kLmldCa:
                dec_.emplace(code, spec.cfg);
                break;
            case DecoderKind::kOracle:
                oracle_.emplace(code);
                break;
        }
    }

    bool trial_fails(std::uint64_t seed, std::uint32_t point, std::uint64_t trial) {
        sample_x_blocks(seed, point, trial, threshold_, code_->base().n(), level1_);
        code_->reduce_x(level1_, tree_, truth_, work_);
        switch (kind_) {
            case DecoderKind::kHdd:
                for (std::uint64_t w : truth_)
                    if (w) return true;
                return false;
            case DecoderKind::kSymbolMap:
                return !class_matches_x(dec_->symbol_map(tree_, p_), truth_);
            case DecoderKind::kLmldCa:
                return !class_matches_x(dec_->lmld_ca(tree_, p_).estimate, truth_);
            case DecoderKind::kOracle:
                return !class_matches_x(oracle_->decode(tree_, p_).first, truth_);
        }
        return true;  // unreachable
    }

  private:
    const ConcatenatedCode* code_;
    DecoderKind kind_;
    double p_;
    std::uint64_t threshold_;
    SyndromeTree tree_;
    ConcatenatedCode::XWork work_;
    std::vector<std::uint64_t> level1_;
    std::vector<std::uint64_t> truth_;
    std::optional<Decoder> dec_;
    std::optional<BruteForceOracle> oracle_;
};

}  // namespace detail

// One p point. Trials run in fixed-size batches; the stopping rule is
// checked only at batch boundaries, so the (trials, errors) outcome depends
// on the batch size but never on the worker count. A refusal by the decoder
// (e.g. the oracle size limit) marks the point failed instead of throwing.
inline AggregateStats run_point(const ConcatenatedCode& code, const SimConfig& cfg, double p,
                                std::size_t point_index) {
    AggregateStats st;
    st.p = p;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (!(p > 0.0 && p < 0.5))
            throw std::invalid_argument("p: points must lie in (0, 1/2), got " + detail::fmt_g(p));
        const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
        std::vector<detail::TrialRunner> runners;
        runners.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) runners.emplace_back(code, cfg.decoder, p);

        const auto point = static_cast<std::uint32_t>(point_index);
        std::uint64_t trials = 0, errors = 0;
        while (true) {
            const std::uint64_t todo = std::min<std::uint64_t>(cfg.batch, cfg.max_trials - trials);
            if (todo == 0) break;
            std::uint64_t batch_errors = 0;
            if (workers == 1) {
                for (std::uint64_t i = 0; i < todo; ++i)
                    batch_errors += runners[0].trial_fails(cfg.seed, point, trials + i) ? 1 : 0;
            } else {
                std::vector<std::uint64_t> partial(workers, 0);
                std::vector<std::string> worker_error(workers);
                std::vector<std::thread> pool;
                pool.reserve(workers);
                for (std::size_t w = 0; w < workers; ++w) {
                    pool.emplace_back([&, w] {
                        try {
                            std::uint64_t c = 0;
                            for (std::uint64_t i = w; i < todo; i += workers)
                                c += runners[w].trial_fails(cfg.seed, point, trials + i) ? 1 : 0;
                            partial[w] = c;
                        } catch (const std::exception& ex) {
                            worker_error[w] = ex.what()[0] ? ex.what() : "decode failed";
                        }
                    });
                }
                for (auto& th : pool) th.join();
                for (const auto& msg : worker_error)
                    if (!msg.empty()) throw std::runtime_error(msg);
                for (std::uint64_t c : partial) batch_errors += c;
            }
            trials += todo;
            errors += batch_errors;
            if (errors >= cfg.min_errors) break;
        }
        st.trials = trials;
        st.errors = errors;
        st.error_rate = trials ? static_cast<double>(errors) / static_cast<double>(trials) : 0.0;
        const Interval ci = wilson95(errors, trials);
        st.ci_low = ci.low;
        st.ci_high = ci.high;
    } catch (const std::exception& ex) {
        st.failed = true;
        st.message = ex.what();
    }
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return st;
}

// All p points of one experiment, in input order. Point failures are
// recorded and the sweep continues.
inline std::vector<AggregateStats> run_sweep(const SimConfig& cfg) {
    cfg.validate();
    const ConcatenatedCode code = make_code(cfg.code, cfg.levels);
    std::vector<AggregateStats> out;
    out.reserve(cfg.p_list.size());
    for (std::size_t i = 0; i < cfg.p_list.size(); ++i) out.push_back(run_point(code, cfg, cfg.p_list[i], i));
    return out;
}

inline void write_csv_header(std::ostream& out) {
    out << "code,levels,decoder,M,D,wmax,p,trials,errors,error_rate,ci_low,ci_high,seconds,seed\n";
}

inline void write_csv_row(std::ostream& out, const SimConfig& cfg, int wmax, const AggregateStats& st,
                          bool with_timing) {
    out << cfg.code << ',' << cfg.levels << ',' << cfg.decoder.display << ',' << cfg.decoder.cfg.flips << ','
        << cfg.decoder.cfg.list_size << ',' << wmax << ',' << detail::fmt_g(st.p) << ',' << st.trials << ','
        << st.errors << ',' << detail::fmt_g(st.error_rate) << ',' << detail::fmt_g(st.ci_low) << ','
        << detail::fmt_g(st.ci_high) << ',' << detail::fmt_g(with_timing ? st.seconds : 0.0) << ',' << cfg.seed
        << '\n';
}

}  // namespace qconcat
