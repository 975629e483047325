#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qconcat/montecarlo.hpp"

namespace qconcat {

// Experiment files are flat key=value text. Keys before the first [section]
// set shared defaults; every [section] is one experiment that inherits the
// defaults and may override any key. A file without sections describes a
// single experiment. '#' starts a comment.
//
//   code = hamming15
//   levels = 2
//   p = 0.01 0.02 0.05
//
//   [lmld-ca]
//   decoder = lmld-ca M=8 D=2 wmax=3
//   min_errors = 600
struct ExperimentSet {
    std::vector<SimConfig> experiments;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

inline double parse_double_token(std::string_view key, std::string_view text) {
    double v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e)
        throw std::invalid_argument(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    return v;
}

struct ExperimentBuilder {
    SimConfig cfg;
    bool has_decoder = false;
};

inline void apply_config_key(ExperimentBuilder& b, std::string_view key, std::string_view value) {
    if (key == "code")
        b.cfg.code = std::string(value);
    else if (key == "levels")
        b.cfg.levels = static_cast<std::size_t>(parse_u64_token("levels", value));
    else if (key == "p") {
        b.cfg.p_list.clear();
        for (std::string_view tok : split_tokens(value)) b.cfg.p_list.push_back(parse_double_token("p", tok));
    } else if (key == "seed")
        b.cfg.seed = parse_u64_token("seed", value);
    else if (key == "workers")
        b.cfg.workers = static_cast<std::size_t>(parse_u64_token("workers", value));
    else if (key == "batch")
        b.cfg.batch = parse_u64_token("batch", value);
    else if (key == "max_trials")
        b.cfg.max_trials = parse_u64_token("max_trials", value);
    else if (key == "min_errors")
        b.cfg.min_errors = parse_u64_token("min_errors", value);
    else if (key == "decoder") {
        b.cfg.decoder = parse_decoder_spec(value);
        b.has_decoder = true;
    } else
        throw std::invalid_argument("unknown key '" + std::string(key) + "'");
}

}  // namespace detail

inline ExperimentSet parse_sim_config(std::istream& in) {
    detail::ExperimentBuilder defaults;
    std::vector<detail::ExperimentBuilder> sections;
    bool in_section = false;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = detail::trim(raw);
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = detail::trim(line.substr(0, hash));
        if (line.empty()) continue;
        try {
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3)
                    throw std::invalid_argument("malformed section header '" + std::string(line) + "'");
                detail::ExperimentBuilder b = defaults;
                b.cfg.label = std::string(detail::trim(line.substr(1, line.size() - 2)));
                sections.push_back(std::move(b));
                in_section = true;
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
                throw std::invalid_argument("expected key = value, got '" + std::string(line) + "'");
            const std::string_view key = detail::trim(line.substr(0, eq));
            const std::string_view value = detail::trim(line.substr(eq + 1));
            if (key.empty()) throw std::invalid_argument("empty key");
            if (value.empty()) throw std::invalid_argument(std::string(key) + ": empty value");
            detail::apply_config_key(in_section ? sections.back() : defaults, key, value);
        } catch (const std::invalid_argument& ex) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + ex.what());
        }
    }

    if (!in_section) sections.push_back(defaults);
    ExperimentSet set;
    set.experiments.reserve(sections.size());
    for (auto& b : sections) {
        if (!b.has_decoder)
            throw std::invalid_argument("decoder: missing for experiment '" + b.cfg.label + "'");
        b.cfg.validate();
        set.experiments.push_back(std::move(b.cfg));
    }
    return set;
}

inline ExperimentSet parse_sim_config_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_sim_config(in);
}

inline ExperimentSet load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    return parse_sim_config(in);
}

}  // namespace qconcat
