#include "qconcat/sim_config.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

using namespace qconcat;

namespace {

void expect_parse_error(const std::string& text, const std::string& needle) {
    try {
        parse_sim_config_text(text);
        FAIL() << "expected a parse failure mentioning '" << needle << "'";
    } catch (const std::invalid_argument& ex) {
        EXPECT_NE(std::string(ex.what()).find(needle), std::string::npos) << ex.what();
    }
}

}  // namespace

TEST(SimConfigFile, SingleAnonymousExperiment) {
    const ExperimentSet set = parse_sim_config_text(
        "code = hamming15\n"
        "levels = 2\n"
        "decoder = lmld-ca M=8 D=2 wmax=3\n"
        "p = 0.01 0.02\n"
        "min_errors = 600\n"
        "seed = 5\n");
    ASSERT_EQ(set.experiments.size(), 1u);
    const SimConfig& cfg = set.experiments[0];
    EXPECT_EQ(cfg.label, "default");
    EXPECT_EQ(cfg.code, "hamming15");
    EXPECT_EQ(cfg.levels, 2u);
    EXPECT_EQ(cfg.decoder.kind, DecoderKind::kLmldCa);
    EXPECT_EQ(cfg.p_list, (std::vector<double>{0.01, 0.02}));
    EXPECT_EQ(cfg.min_errors, 600u);
    EXPECT_EQ(cfg.seed, 5u);
}

TEST(SimConfigFile, SectionsInheritAndOverrideDefaults) {
    const ExperimentSet set = parse_sim_config_text(
        "# shared sweep\n"
        "code = hamming15\n"
        "levels = 2\n"
        "p = 0.01, 0.02, 0.05   # comma or space separated\n"
        "seed = 9\n"
        "batch = 500\n"
        "\n"
        "[hdd]\n"
        "decoder = hdd\n"
        "min_errors = 10000\n"
        "\n"
        "[lmld]\n"
        "decoder = lmld-ca M=8 D=2 wmax=3\n"
        "min_errors = 600\n"
        "seed = 10\n");
    ASSERT_EQ(set.experiments.size(), 2u);
    EXPECT_EQ(set.experiments[0].label, "hdd");
    EXPECT_EQ(set.experiments[0].decoder.kind, DecoderKind::kHdd);
    EXPECT_EQ(set.experiments[0].min_errors, 10000u);
    EXPECT_EQ(set.experiments[0].seed, 9u);
    EXPECT_EQ(set.experiments[0].batch, 500u);
    EXPECT_EQ(set.experiments[0].p_list.size(), 3u);
    EXPECT_EQ(set.experiments[1].label, "lmld");
    EXPECT_EQ(set.experiments[1].min_errors, 600u);
    EXPECT_EQ(set.experiments[1].seed, 10u);
    EXPECT_EQ(set.experiments[1].p_list, set.experiments[0].p_list);
}

TEST(SimConfigFile, ErrorsNameTheOffendingKeyAndLine) {
    expect_parse_error("decoder = hdd\np = 0.01\nfoo = 1\n", "unknown key 'foo'");
    expect_parse_error("decoder = hdd\np = 0.01\nfoo = 1\n", "config line 3");
    expect_parse_error("just some words\n", "expected key = value");
    expect_parse_error("levels = two\n", "levels: expected a non-negative integer");
    expect_parse_error("p = 0.01 fast\n", "p: expected a number");
    expect_parse_error("min_errors =\n", "min_errors: empty value");
    expect_parse_error("= 3\n", "empty key");
    expect_parse_error("[broken\n", "malformed section header");
    expect_parse_error("decoder = lmld-ca Q=1\n", "decoder: unknown option 'Q'");
}

TEST(SimConfigFile, MissingDecoderOrEmptySweepIsRejected) {
    expect_parse_error("p = 0.01\n", "decoder: missing for experiment 'default'");
    expect_parse_error("p = 0.01\n[a]\nmin_errors = 5\n", "decoder: missing for experiment 'a'");
    expect_parse_error("decoder = hdd\n", "p: at least one point is required");
    expect_parse_error("decoder = hdd\np = 0.8\n", "p: points must lie in (0, 1/2)");
}

TEST(SimConfigFile, MissingFileNamesThePath) {
    try {
        load_sim_config("/nonexistent/qconcat.cfg");
        FAIL() << "expected an open failure";
    } catch (const std::invalid_argument& ex) {
        EXPECT_NE(std::string(ex.what()).find("cannot open"), std::string::npos);
        EXPECT_NE(std::string(ex.what()).find("/nonexistent/qconcat.cfg"), std::string::npos);
    }
}
