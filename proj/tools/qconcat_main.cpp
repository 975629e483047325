// Command-line front end: Monte Carlo experiment runner, single-shot
// decoder, oracle consistency checker, and shipped-code inspector.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qconcat/base_lists.hpp"
#include "qconcat/montecarlo.hpp"
#include "qconcat/oracle.hpp"
#include "qconcat/sim_config.hpp"

namespace {

using namespace qconcat;

std::size_t resolve_workers(const CLI::Option* flag, std::size_t flag_value, std::size_t config_value) {
    if (flag->count() > 0) return flag_value;
    if (const char* env = std::getenv("QCONCAT_WORKERS"))
        return static_cast<std::size_t>(detail::parse_u64_token("QCONCAT_WORKERS", env));
    return config_value;
}

LogicalClass decode_once(const ConcatenatedCode& code, const DecoderSpec& spec, const SyndromeTree& tree,
                         double p) {
    switch (spec.kind) {
        case DecoderKind::kHdd:
            return hdd_decode(code, tree);
        case DecoderKind::kSymbolMap:
            return symbol_map_decode(code, tree, spec.cfg, p);
        case DecoderKind::kLmldCa:
            return lmld_ca_decode(code, tree, spec.cfg, p).first;
        case DecoderKind::kOracle:
            return BruteForceOracle(code).decode(tree, p).first;
    }
    throw std::logic_error("decode_once: unhandled decoder kind");
}

// LMLD-CA tuned to subsume the oracle: exhaustive base candidates, every
// block selected, maximal list size, no test-pattern cap.
DecoderConfig exhaustive_lmld_config(const StabilizerCode& base) {
    DecoderConfig cfg;
    cfg.flips = base.n();
    cfg.list_size = 255;
    cfg.weight_cap = static_cast<int>(base.n());
    cfg.exhaustive_threshold = base.n();
    return cfg;
}

int run_simulate(const std::string& config_path, const std::string& out_path, const CLI::Option* seed_flag,
                 std::uint64_t seed_value, const CLI::Option* workers_flag, std::size_t workers_value,
                 bool no_timing) {
    ExperimentSet set = load_sim_config(config_path);
    for (SimConfig& cfg : set.experiments) {
        if (seed_flag->count() > 0) cfg.seed = seed_value;
        cfg.workers = resolve_workers(workers_flag, workers_value, cfg.workers);
        cfg.validate();
        make_code(cfg.code, cfg.levels);  // fail fast on an unknown code before any point runs
    }

    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("out: cannot write '" + out_path + "'");
    write_csv_header(out);

    bool any_failed = false;
    for (const SimConfig& cfg : set.experiments) {
        const ConcatenatedCode code = make_code(cfg.code, cfg.levels);
        const int wmax = cfg.decoder.cfg.resolved_weight_cap(code.base());
        for (std::size_t i = 0; i < cfg.p_list.size(); ++i) {
            const AggregateStats st = run_point(code, cfg, cfg.p_list[i], i);
            if (st.failed) {
                any_failed = true;
                std::cout << cfg.label << ": p=" << detail::fmt_g(st.p) << " FAILED: " << st.message << '\n';
                continue;
            }
            write_csv_row(out, cfg, wmax, st, !no_timing);
            std::cout << cfg.label << ": decoder=" << cfg.decoder.display << " p=" << detail::fmt_g(st.p)
                      << " trials=" << st.trials << " errors=" << st.errors
                      << " rate=" << detail::fmt_g(st.error_rate) << " ci=[" << detail::fmt_g(st.ci_low) << ","
                      << detail::fmt_g(st.ci_high) << "]";
            if (!no_timing) std::cout << " " << detail::fmt_g(st.seconds) << "s";
            std::cout << '\n';
        }
    }
    if (!out.good()) throw std::invalid_argument("out: write to '" + out_path + "' failed");
    return any_failed ? 2 : 0;
}

int run_decode(const std::string& code_name, std::size_t levels, const std::string& error_string,
               const std::string& error_file, const std::string& decoder_string, double p) {
    const ConcatenatedCode code = make_code(code_name, levels);
    const DecoderSpec spec = parse_decoder_spec(decoder_string);
    if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("p: must lie in (0, 1/2)");

    std::string text = error_string;
    if (!error_file.empty()) {
        std::ifstream in(error_file);
        if (!in) throw std::invalid_argument("--error-file: cannot open '" + error_file + "'");
        std::getline(in, text);
    }
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) text.pop_back();
    const Pauli e = Pauli::from_string(text);
    if (e.size() != code.n_total())
        throw std::invalid_argument("--error: expected " + std::to_string(code.n_total()) + " qubits, got " +
                                    std::to_string(e.size()));

    const SyndromeTree tree = code.extract_syndromes(e);
    for (std::size_t t = 1; t <= tree.levels(); ++t) {
        std::cout << "level " << t << " syndromes:";
        for (std::size_t b = 0; b < tree.blocks(t); ++b) std::cout << ' ' << tree.at(t, b);
        std::cout << '\n';
    }
    const LogicalClass est = decode_once(code, spec, tree, p);
    const LogicalClass truth = code.true_logical_class(e);
    std::cout << "estimate class: " << est.str() << '\n';
    std::cout << "true class:     " << truth.str() << '\n';
    std::cout << (est == truth ? "success" : "failure") << '\n';
    return 0;
}

int run_oracle_check(const std::string& code_name, std::size_t levels, std::uint64_t samples,
                     std::uint64_t seed) {
    if (samples == 0) {
        std::cout << "0 samples requested: vacuous pass\n";
        return 0;
    }
    const double p = 0.05;

    if (code_name == "hamming15" && levels == 1) {
        // Both sides are exact here, so agreement must be total: enumerate
        // every syndrome reachable under the bit-flip channel.
        const ConcatenatedCode code = make_code(code_name, levels);
        Decoder dec(code, exhaustive_lmld_config(code.base()));
        const BruteForceOracle oracle(code);
        const BaseCosets cosets(code.base(), static_cast<int>(code.base().n()), true);
        std::uint64_t agree = 0, total = 0;
        SyndromeTree tree = code.empty_tree();
        for (std::uint32_t s : cosets.reachable_syndromes()) {
            tree.set(1, 0, s);
            ++total;
            if (dec.lmld_ca(tree, p).estimate == oracle.decode(tree, p).first) ++agree;
        }
        const double agreement = static_cast<double>(agree) / static_cast<double>(total);
        std::cout << "syndromes=" << total << " agreement=" << detail::fmt_g(agreement)
                  << " wer_gap=" << detail::fmt_g(0.0) << '\n';
        return agreement == 1.0 ? 0 : 2;
    }

    if (code_name == "c422" && levels == 2) {
        const ConcatenatedCode code = make_code(code_name, levels);
        Decoder dec(code, exhaustive_lmld_config(code.base()));
        const BruteForceOracle oracle(code);
        SyndromeTree tree = code.empty_tree();
        auto work = code.make_xwork();
        std::vector<std::uint64_t> level1(code.blocks_at(1)), truth;
        const std::uint64_t threshold = flip_threshold(p);
        std::uint64_t agree = 0, lmld_errors = 0, oracle_errors = 0;
        for (std::uint64_t t = 0; t < samples; ++t) {
            sample_x_blocks(seed, 0, t, threshold, code.base().n(), level1);
            code.reduce_x(level1, tree, truth, work);
            const LogicalClass lmld = dec.lmld_ca(tree, p).estimate;
            const LogicalClass orc = oracle.decode(tree, p).first;
            if (lmld == orc) ++agree;
            if (!detail::class_matches_x(lmld, truth)) ++lmld_errors;
            if (!detail::class_matches_x(orc, truth)) ++oracle_errors;
        }
        const double n = static_cast<double>(samples);
        const double agreement = static_cast<double>(agree) / n;
        const double wer_lmld = static_cast<double>(lmld_errors) / n;
        const double wer_oracle = static_cast<double>(oracle_errors) / n;
        const double gap = wer_oracle > 0 ? (wer_lmld - wer_oracle) / wer_oracle : (wer_lmld > 0 ? 1.0 : 0.0);
        std::cout << "samples=" << samples << " agreement=" << detail::fmt_g(agreement)
                  << " wer_lmld=" << detail::fmt_g(wer_lmld) << " wer_oracle=" << detail::fmt_g(wer_oracle)
                  << " wer_gap=" << detail::fmt_g(gap) << '\n';
        const bool ok = agreement >= 0.99 && std::abs(gap) <= 0.05;
        return ok ? 0 : 2;
    }

    throw std::invalid_argument("oracle-check: unsupported code (use hamming15 with levels=1 or c422 with levels=2)");
}

int run_codes() {
    for (const std::string& name : {std::string("hamming15"), std::string("c422")}) {
        const StabilizerCode base =
            name == "hamming15" ? StabilizerCode::quantum_hamming_15_7_3() : StabilizerCode::code_422();
        std::cout << name << ": [[" << base.n() << "," << base.k();
        if (base.distance()) std::cout << "," << *base.distance();
        std::cout << "]] CSS, " << base.num_generators() << " generators\n";
        for (std::size_t r = 1; r <= 3; ++r) {
            const ConcatenatedCode code(base, r);
            std::cout << "  levels=" << r << ": n_total=" << code.n_total() << " k_total=" << code.k_total()
                      << " level-1 blocks=" << code.blocks_at(1) << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concatenated-code decoder experiments under bit-flip noise"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run the experiments in a config file and write a CSV");
    std::string config_path, out_path;
    std::uint64_t seed_value = 0;
    std::size_t workers_value = 1;
    bool no_timing = false;
    sim->add_option("--config", config_path, "Experiment config file (key = value with [sections])")->required();
    sim->add_option("--out", out_path, "Output CSV path")->required();
    auto* sim_seed = sim->add_option("--seed", seed_value, "Override the master seed of every experiment");
    auto* sim_workers =
        sim->add_option("--workers", workers_value, "Worker threads (QCONCAT_WORKERS overrides the config)");
    sim->add_flag("--no-timing", no_timing, "Zero the seconds column for byte-stable output");

    // decode
    auto* dec = app.add_subcommand("decode", "Decode one error and report the outcome");
    std::string dec_code = "hamming15", dec_error, dec_error_file, dec_decoder = "hdd";
    std::size_t dec_levels = 2;
    double dec_p = 0.01;
    dec->add_option("--code", dec_code, "Code name (hamming15 or c422)");
    dec->add_option("--levels", dec_levels, "Concatenation levels");
    auto* err_opt = dec->add_option("--error", dec_error, "Pauli string over {I,X,Y,Z}, one char per qubit");
    auto* errf_opt = dec->add_option("--error-file", dec_error_file, "File whose first line is the Pauli string");
    err_opt->excludes(errf_opt);
    dec->add_option("--decoder", dec_decoder, "Decoder string, e.g. 'lmld-ca M=8 D=2 wmax=3'");
    dec->add_option("--p", dec_p, "Channel error probability used for soft decoding");

    // oracle-check
    auto* orc = app.add_subcommand("oracle-check", "Compare LMLD-CA against the brute-force oracle");
    std::string orc_code = "c422";
    std::size_t orc_levels = 2;
    std::uint64_t orc_samples = 10000, orc_seed = 1;
    orc->add_option("--code", orc_code, "Code name (hamming15 levels=1 or c422 levels=2)");
    orc->add_option("--levels", orc_levels, "Concatenation levels");
    orc->add_option("--samples", orc_samples, "Sampled errors at p = 0.05 (0 passes vacuously)");
    orc->add_option("--seed", orc_seed, "Sampling seed");

    // codes
    app.add_subcommand("codes", "List the shipped codes and their geometry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (sim->parsed())
            return run_simulate(config_path, out_path, sim_seed, seed_value, sim_workers, workers_value,
                                no_timing);
        if (dec->parsed()) {
            if (err_opt->count() == 0 && errf_opt->count() == 0)
                throw std::invalid_argument("--error: provide --error or --error-file");
            return run_decode(dec_code, dec_levels, dec_error, dec_error_file, dec_decoder, dec_p);
        }
        if (orc->parsed()) return run_oracle_check(orc_code, orc_levels, orc_samples, orc_seed);
        return run_codes();
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
