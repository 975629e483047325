// Acceptance gate: ten end-to-end checks covering code construction, exact
// oracle agreement, closed-form calibration, decoder orderings at fixed
// operating points, test-pattern accounting, and byte-level determinism.
// Prints one PASS/FAIL line per criterion; the exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qconcat/montecarlo.hpp"
#include "qconcat/oracle.hpp"
#include "qconcat/reference.hpp"

using namespace qconcat;

namespace {

constexpr std::uint64_t kSeed = 20260814;     // master seed for every sampled check
constexpr double kRelLogTol = 1e-12;          // class-distribution log-probability tolerance
constexpr double kAgreementFloor = 0.99;      // oracle match fraction floor
constexpr double kWerRelTol = 0.05;           // oracle word-error-rate relative tolerance
constexpr double kZ95 = 1.959963984540054;    // two-sided 95% normal quantile

struct Gate {
    int failures = 0;

    // budget <= 0 disables the wall-clock check (runtime targets, not bounds)
    void run(int id, double budget_seconds, const char* (*check)(std::string&)) {
        std::string detail;
        const char* verdict = nullptr;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            verdict = check(detail);
        } catch (const std::exception& ex) {
            verdict = "threw";
            detail = ex.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = verdict == nullptr;
        std::string why = ok ? detail : std::string(verdict) + (detail.empty() ? "" : ": " + detail);
        if (ok && budget_seconds > 0 && secs > budget_seconds) {
            ok = false;
            why = "exceeded the " + std::to_string(budget_seconds) + " s budget; " + detail;
        }
        if (!ok) ++failures;
        std::printf("criterion %d: %s — %s (%.1f s)\n", id, ok ? "PASS" : "FAIL", why.c_str(), secs);
        std::fflush(stdout);
    }
};

std::string fmt(double v) { return detail::fmt_g(v); }

AggregateStats measure(const ConcatenatedCode& code, const std::string& decoder, double p,
                       std::uint64_t min_errors, std::uint64_t max_trials, std::uint64_t batch) {
    SimConfig cfg;
    cfg.levels = code.levels();
    cfg.decoder = parse_decoder_spec(decoder);
    cfg.p_list = {p};
    cfg.min_errors = min_errors;
    cfg.max_trials = max_trials;
    cfg.batch = batch;
    cfg.seed = kSeed;
    cfg.validate();
    return run_point(code, cfg, p, 0);
}

bool below(const AggregateStats& a, const AggregateStats& b) { return a.ci_high < b.ci_low; }

std::string rates(const char* n1, const AggregateStats& a, const char* n2, const AggregateStats& b,
                  const char* n3, const AggregateStats& c) {
    std::ostringstream ss;
    ss << n1 << "=" << fmt(a.error_rate) << " (" << a.errors << "/" << a.trials << ") " << n2 << "="
       << fmt(b.error_rate) << " (" << b.errors << "/" << b.trials << ") " << n3 << "=" << fmt(c.error_rate)
       << " (" << c.errors << "/" << c.trials << ")";
    return ss.str();
}

int shell(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1: [[15,7,3]] construction — parameters, commutation, symplectic pairing,
// and an exhaustive scan showing no nontrivial X-logical of weight <= 2.
const char* c01_construction(std::string& detail) {
    const StabilizerCode code = StabilizerCode::quantum_hamming_15_7_3();
    if (code.n() != 15 || code.k() != 7 || code.num_generators() != 8) return "wrong [[n,k]] or generator count";
    if (!code.distance() || *code.distance() != 3) return "distance is not 3";

    const auto& gens = code.stabilizers();
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = i + 1; j < gens.size(); ++j)
            if (!gens[i].commutes_with(gens[j])) return "generators do not commute";

    const auto& lx = code.logical_x();
    const auto& lz = code.logical_z();
    for (std::size_t i = 0; i < 7; ++i) {
        for (const Pauli& g : gens)
            if (!lx[i].commutes_with(g) || !lz[i].commutes_with(g)) return "a logical hits a stabilizer";
        for (std::size_t j = 0; j < 7; ++j) {
            const bool want = i != j;
            if (lx[i].commutes_with(lz[j]) != want) return "symplectic pairing is wrong";
            if (!lx[i].commutes_with(lx[j]) || !lz[i].commutes_with(lz[j])) return "like logicals anticommute";
        }
    }

    std::size_t scanned = 0;
    for (std::size_t a = 0; a < 15; ++a)
        for (std::size_t b = a; b < 15; ++b) {
            const std::uint64_t x = (std::uint64_t{1} << a) | (std::uint64_t{1} << b);
            ++scanned;
            if (code.synd_x(x) == 0 && code.class_x(x) != 0) return "found an X-logical of weight <= 2";
        }
    detail = "n=15 k=7 d=3, 8 commuting generators, " + std::to_string(scanned) + " low-weight X patterns scanned";
    return nullptr;
}

// 2: exhaustive class_list vs brute_force_dqmld on every X-reachable
// syndrome of the base code, three channel strengths.
const char* c02_exact_single_level(std::string& detail) {
    const StabilizerCode code = StabilizerCode::quantum_hamming_15_7_3();
    const BaseCosets cosets(code, 15, true);
    if (cosets.reachable_syndromes().size() != 16) return "expected 16 X-reachable syndromes";
    std::size_t compared = 0;
    double worst = 0;
    for (const double p : {0.01, 0.05, 0.1}) {
        const std::vector<double> prior(15, p);
        for (const std::uint32_t s : cosets.reachable_syndromes()) {
            const BitVec synd = code.unpack_syndrome(s);
            const SoftList mine = class_list(code, base_candidates(code, synd, prior, 15, 15));
            const SoftList oracle = brute_force_dqmld(code, synd, prior).second;
            if (mine.entries.size() != oracle.entries.size()) return "class supports differ";
            std::map<std::uint64_t, double> want;
            for (const auto& e : oracle.entries) want[e.cls.packed()] = e.logp;
            for (const auto& e : mine.entries) {
                const auto it = want.find(e.cls.packed());
                if (it == want.end()) return "a class is missing from the oracle distribution";
                const double err =
                    std::abs(e.logp - it->second) / std::max({1.0, std::abs(e.logp), std::abs(it->second)});
                worst = std::max(worst, err);
                if (err > kRelLogTol) {
                    detail = "relative log-probability error " + fmt(err) + " at p=" + fmt(p);
                    return "distribution mismatch";
                }
                ++compared;
            }
        }
    }
    detail = std::to_string(compared) + " class probabilities matched, worst relative error " + fmt(worst);
    return nullptr;
}

// 3: single-level HDD at p = 0.01 over 10^6 trials against the closed form.
const char* c03_closed_form_hdd(std::string& detail) {
    const double p = 0.01;
    const double pc = 1.0 - std::pow(1.0 - p, 15) - 15.0 * p * std::pow(1.0 - p, 14);
    const ConcatenatedCode code = make_code("hamming15", 1);
    const AggregateStats st = measure(code, "hdd", p, 1000000, 1000000, 10000);
    if (st.failed) return "simulation failed";
    const double half = kZ95 * std::sqrt(pc * (1.0 - pc) / static_cast<double>(st.trials));
    detail = "rate=" + fmt(st.error_rate) + " over " + std::to_string(st.trials) + " trials, closed form " +
             fmt(pc) + " ± " + fmt(half);
    if (st.trials < 1000000) return "fewer than 10^6 trials";
    if (std::abs(st.error_rate - pc) > half) return "rate outside the 95% band around the closed form";
    return nullptr;
}

// 4: LMLD-CA with exhaustive base candidates, M=4, D=4, no TP cap against
// the brute-force oracle on the 16-qubit two-level [[4,2,2]] code.
const char* c04_oracle_equivalence(std::string& detail) {
    const ConcatenatedCode code = make_code("c422", 2);
    DecoderConfig cfg;
    cfg.flips = 4;
    cfg.list_size = 4;
    cfg.weight_cap = 4;
    cfg.exhaustive_threshold = 4;
    Decoder dec(code, cfg);
    const BruteForceOracle oracle(code);

    const double p = 0.05;
    const std::uint64_t samples = 10000;
    const std::uint64_t threshold = flip_threshold(p);
    SyndromeTree tree = code.empty_tree();
    auto work = code.make_xwork();
    std::vector<std::uint64_t> level1(code.blocks_at(1)), truth;
    std::uint64_t agree = 0, lmld_fail = 0, oracle_fail = 0;
    for (std::uint64_t t = 0; t < samples; ++t) {
        sample_x_blocks(kSeed, 0, t, threshold, code.base().n(), level1);
        code.reduce_x(level1, tree, truth, work);
        const LogicalClass mine = dec.lmld_ca(tree, p).estimate;
        const LogicalClass want = oracle.decode(tree, p).first;
        if (mine == want) ++agree;
        if (!detail::class_matches_x(mine, truth)) ++lmld_fail;
        if (!detail::class_matches_x(want, truth)) ++oracle_fail;
    }
    const double n = static_cast<double>(samples);
    const double agreement = static_cast<double>(agree) / n;
    const double wer_lmld = static_cast<double>(lmld_fail) / n;
    const double wer_oracle = static_cast<double>(oracle_fail) / n;
    detail = "agreement=" + fmt(agreement) + " wer_lmld=" + fmt(wer_lmld) + " wer_oracle=" + fmt(wer_oracle);
    if (agreement < kAgreementFloor) return "agreement below 0.99";
    if (std::abs(wer_lmld - wer_oracle) > kWerRelTol * wer_oracle) return "word-error rate off by more than 5%";
    return nullptr;
}

// 5: every single-X error on the two-level code decodes under all three
// decoders at the paper's working settings.
const char* c05_weight_one(std::string& detail) {
    const ConcatenatedCode code = make_code("hamming15", 2);
    DecoderConfig cfg;
    cfg.flips = 8;
    cfg.list_size = 2;
    cfg.weight_cap = 3;
    Decoder dec(code, cfg);
    const double p = 0.01;
    std::size_t failed = 0;
    for (std::size_t q = 0; q < code.n_total(); ++q) {
        BitVec x(code.n_total());
        x.set(q);
        const Pauli e(x, BitVec(code.n_total()));
        const SyndromeTree tree = code.extract_syndromes(e);
        const LogicalClass truth = code.true_logical_class(e);
        if (dec.hdd(tree) != truth) ++failed;
        if (dec.symbol_map(tree, p) != truth) ++failed;
        if (dec.lmld_ca(tree, p).estimate != truth) ++failed;
    }
    detail = std::to_string(3 * code.n_total()) + " decodes, " + std::to_string(failed) + " failures";
    return failed == 0 ? nullptr : "a single-X error was misdecoded";
}

// 6: two-level ordering at p = 0.02 — HDD > symbol-MAP >= LMLD-CA with the
// HDD and LMLD-CA confidence intervals disjoint.
const char* c06_two_level_ordering(std::string& detail) {
    const ConcatenatedCode code = make_code("hamming15", 2);
    const double p = 0.02;
    const AggregateStats hdd = measure(code, "hdd wmax=3", p, 10000, 1000000, 2000);
    const AggregateStats smap = measure(code, "symbol-map M=8 D=2 wmax=3", p, 500, 1000000, 2000);
    const AggregateStats lmld = measure(code, "lmld-ca M=8 D=2 wmax=3", p, 600, 1000000, 2000);
    detail = rates("hdd", hdd, "symbol-map", smap, "lmld-ca", lmld);
    if (hdd.failed || smap.failed || lmld.failed) return "a point failed";
    if (hdd.errors < 200 || smap.errors < 200 || lmld.errors < 200) return "fewer than 200 errors collected";
    if (!(hdd.error_rate > smap.error_rate)) return "HDD did not beat symbol-MAP's error rate";
    if (!(smap.error_rate >= lmld.error_rate)) return "symbol-MAP rate below LMLD-CA";
    if (!below(lmld, hdd)) return "HDD and LMLD-CA confidence intervals overlap";
    return nullptr;
}

// 7: three-level ordering at p = 0.02; degrades to LMLD-CA < HDD with the
// symbol-MAP comparison reported when the symbol-MAP and LMLD-CA intervals
// overlap at this trial budget.
const char* c07_three_level_ordering(std::string& detail) {
    const ConcatenatedCode code = make_code("hamming15", 3);
    const double p = 0.02;
    const AggregateStats hdd = measure(code, "hdd wmax=3", p, 1000, 200000, 200);
    const AggregateStats smap = measure(code, "symbol-map M=8 D=2 wmax=3", p, 1000, 200000, 200);
    const AggregateStats lmld = measure(code, "lmld-ca M=8 D=4 wmax=3", p, 200, 200000, 200);
    detail = rates("hdd", hdd, "symbol-map", smap, "lmld-ca", lmld);
    if (hdd.failed || smap.failed || lmld.failed) return "a point failed";
    if (hdd.errors < 100 || smap.errors < 100 || lmld.errors < 100) return "fewer than 100 errors collected";
    if (!(lmld.error_rate < hdd.error_rate)) return "LMLD-CA did not beat HDD's error rate";
    if (!below(lmld, hdd)) return "HDD and LMLD-CA confidence intervals overlap";
    if (below(lmld, smap)) {
        if (!(lmld.error_rate < smap.error_rate)) return "LMLD-CA rate not below symbol-MAP";
        if (!(smap.error_rate < hdd.error_rate)) return "symbol-MAP rate not below HDD";
        detail = "full ordering, " + detail;
    } else {
        detail = "degraded to LMLD-CA < HDD (symbol-MAP interval overlaps LMLD-CA's), " + detail;
    }
    return nullptr;
}

// 8: test-pattern accounting with full-length lists — exactly D^M patterns.
const char* c08_tp_accounting(std::string& detail) {
    std::vector<SoftList> lists(8);
    for (std::size_t b = 0; b < lists.size(); ++b)
        for (std::size_t i = 0; i < 4; ++i)
            lists[b].entries.push_back(
                {LogicalClass::from_packed(1, i), -0.1 * static_cast<double>(i * (b + 2))});
    std::vector<std::size_t> selected(8);
    for (std::size_t b = 0; b < 8; ++b) selected[b] = b;
    const auto tiny = generate_test_patterns(lists, selected, 2, std::nullopt);
    const auto full = generate_test_patterns(lists, selected, 4, std::nullopt);
    detail = "D=2 gives " + std::to_string(tiny.size()) + ", D=4 gives " + std::to_string(full.size());
    if (tiny.size() != 256) return "expected 2^8 = 256 test patterns";
    if (full.size() != 65536) return "expected 4^8 = 65536 test patterns";
    std::map<std::vector<std::uint32_t>, bool> uniq;
    for (const auto& tp : full)
        if (!uniq.emplace(tp, true).second) return "duplicate test pattern emitted";
    return nullptr;
}

// 9: byte-identical CSVs from the shipped two-level config under different
// worker counts.
const char* c09_determinism(std::string& detail) {
    const std::string base = std::string(QCONCAT_CLI_BIN) + " simulate --config " + QCONCAT_CONFIG_DIR +
                             "/two_level_fig2a.cfg --no-timing";
    const std::string out1 = "/tmp/qconcat_accept_w1.csv", out3 = "/tmp/qconcat_accept_w3.csv";
    const int rc1 = shell(base + " --workers 1 --out " + out1);
    const int rc3 = shell(base + " --workers 3 --out " + out3);
    if (rc1 != 0 || rc3 != 0)
        return "the simulate runs did not exit cleanly";
    const std::string bytes1 = slurp(out1), bytes3 = slurp(out3);
    std::size_t rows = 0;
    for (const char ch : bytes1) rows += ch == '\n';
    detail = std::to_string(bytes1.size()) + " bytes, " + std::to_string(rows) + " lines each";
    if (bytes1.empty()) return "empty CSV";
    if (bytes1 != bytes3) return "CSV bytes differ between --workers 1 and --workers 3";
    return nullptr;
}

// 10: word-error rate is monotone under list growth on one fixed sample of
// 10^3 errors at p = 0.02.
const char* c10_monotone_lists(std::string& detail) {
    const ConcatenatedCode code = make_code("hamming15", 2);
    const double p = 0.02;
    const std::uint64_t samples = 1000;
    const std::uint64_t threshold = flip_threshold(p);

    const auto failures = [&](std::size_t m, std::size_t d) {
        DecoderConfig cfg;
        cfg.flips = m;
        cfg.list_size = d;
        Decoder dec(code, cfg);
        SyndromeTree tree = code.empty_tree();
        auto work = code.make_xwork();
        std::vector<std::uint64_t> level1(code.blocks_at(1)), truth;
        std::uint64_t fails = 0;
        for (std::uint64_t t = 0; t < samples; ++t) {
            sample_x_blocks(kSeed, 0, t, threshold, code.base().n(), level1);
            code.reduce_x(level1, tree, truth, work);
            if (!detail::class_matches_x(dec.lmld_ca(tree, p).estimate, truth)) ++fails;
        }
        return fails;
    };

    const std::uint64_t m8d2 = failures(8, 2), m8d4 = failures(8, 4), m10d4 = failures(10, 4);
    detail = "failures out of 1000: M=8,D=2 -> " + std::to_string(m8d2) + "; M=8,D=4 -> " +
             std::to_string(m8d4) + "; M=10,D=4 -> " + std::to_string(m10d4);
    if (m8d2 < m8d4) return "growing D raised the word-error rate";
    if (m8d4 < m10d4) return "growing M raised the word-error rate";
    return nullptr;
}

}  // namespace

int main() {
    Gate gate;
    gate.run(1, 1.0, c01_construction);
    gate.run(2, 10.0, c02_exact_single_level);
    gate.run(3, 60.0, c03_closed_form_hdd);
    gate.run(4, 300.0, c04_oracle_equivalence);
    gate.run(5, 60.0, c05_weight_one);
    gate.run(6, 0.0, c06_two_level_ordering);      // 30 min target, reported only
    gate.run(7, 0.0, c07_three_level_ordering);    // 4 h target, reported only
    gate.run(8, 1.0, c08_tp_accounting);
    gate.run(9, 0.0, c09_determinism);             // 30 min target, reported only
    gate.run(10, 3600.0, c10_monotone_lists);
    if (gate.failures == 0) std::printf("all 10 criteria passed\n");
    return gate.failures;
}
