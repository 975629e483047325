#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QCONCAT_CLI_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    RunResult res;
    std::array<char, 4096> buf;
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string temp_path(const std::string& name) { return testing::TempDir() + "qconcat_cli_" + name; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    ASSERT_TRUE(out.good()) << "cannot write " << path;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(CliHelp, DocumentsEverySimulateFlag) {
    const RunResult top = run_cli("--help");
    EXPECT_EQ(top.exit_code, 0);
    for (const char* cmd : {"simulate", "decode", "oracle-check", "codes"})
        EXPECT_NE(top.output.find(cmd), std::string::npos) << top.output;

    const RunResult sim = run_cli("simulate --help");
    EXPECT_EQ(sim.exit_code, 0);
    for (const char* flag : {"--config", "--out", "--seed", "--workers", "--no-timing"})
        EXPECT_NE(sim.output.find(flag), std::string::npos) << sim.output;
}

TEST(CliSimulate, RunsAConfigAndWritesTheCsv) {
    const std::string cfg = temp_path("ok.cfg");
    const std::string csv = temp_path("ok.csv");
    write_file(cfg,
               "code = hamming15\n"
               "levels = 1\n"
               "p = 0.02 0.05\n"
               "batch = 500\n"
               "min_errors = 20\n"
               "max_trials = 20000\n"
               "seed = 4\n"
               "decoder = hdd\n");
    const RunResult res = run_cli("simulate --config " + cfg + " --out " + csv + " --no-timing");
    EXPECT_EQ(res.exit_code, 0) << res.output;
    EXPECT_NE(res.output.find("p=0.02"), std::string::npos) << res.output;
    EXPECT_NE(res.output.find("p=0.05"), std::string::npos) << res.output;

    const std::string data = read_file(csv);
    std::istringstream lines(data);
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header, "code,levels,decoder,M,D,wmax,p,trials,errors,error_rate,ci_low,ci_high,seconds,seed");
    int rows = 0;
    for (std::string line; std::getline(lines, line);)
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 2);
    EXPECT_NE(data.find("hamming15,1,hdd,"), std::string::npos) << data;
}

TEST(CliSimulate, WorkerCountAndEnvOverrideKeepBytesIdentical) {
    const std::string cfg = temp_path("det.cfg");
    write_file(cfg,
               "code = hamming15\n"
               "levels = 2\n"
               "p = 0.04\n"
               "batch = 100\n"
               "min_errors = 25\n"
               "max_trials = 10000\n"
               "seed = 12\n"
               "decoder = lmld-ca M=8 D=2 wmax=3\n");
    const std::string a = temp_path("det_w1.csv");
    const std::string b = temp_path("det_w3.csv");
    const std::string c = temp_path("det_env.csv");
    EXPECT_EQ(run_cli("simulate --config " + cfg + " --out " + a + " --no-timing --workers 1").exit_code, 0);
    EXPECT_EQ(run_cli("simulate --config " + cfg + " --out " + b + " --no-timing --workers 3").exit_code, 0);
    const std::string env_cmd = "QCONCAT_WORKERS=2 " + std::string(QCONCAT_CLI_BIN) + " simulate --config " +
                                cfg + " --out " + c + " --no-timing >/dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(env_cmd.c_str())), 0);
    const std::string bytes = read_file(a);
    EXPECT_FALSE(bytes.empty());
    EXPECT_EQ(bytes, read_file(b));
    EXPECT_EQ(bytes, read_file(c));
}

TEST(CliSimulate, InvalidConfigsExitOneNamingTheKey) {
    const std::string missing = run_cli("simulate --config /nonexistent.cfg --out /tmp/x.csv").output;
    EXPECT_EQ(run_cli("simulate --config /nonexistent.cfg --out /tmp/x.csv").exit_code, 1);
    EXPECT_NE(missing.find("cannot open"), std::string::npos) << missing;

    const std::string bad_key = temp_path("bad_key.cfg");
    write_file(bad_key, "decoder = hdd\np = 0.01\nfoo = 1\n");
    const RunResult res = run_cli("simulate --config " + bad_key + " --out /tmp/x.csv");
    EXPECT_EQ(res.exit_code, 1);
    EXPECT_NE(res.output.find("unknown key 'foo'"), std::string::npos) << res.output;

    const std::string no_p = temp_path("no_p.cfg");
    write_file(no_p, "decoder = hdd\n");
    const RunResult res2 = run_cli("simulate --config " + no_p + " --out /tmp/x.csv");
    EXPECT_EQ(res2.exit_code, 1);
    EXPECT_NE(res2.output.find("p: at least one point"), std::string::npos) << res2.output;

    EXPECT_EQ(run_cli("simulate --out /tmp/x.csv").exit_code, 1);  // --config is required
}

TEST(CliSimulate, PointFailuresExitTwoButKeepTheRun) {
    const std::string cfg = temp_path("refused.cfg");
    write_file(cfg,
               "code = hamming15\n"
               "levels = 2\n"
               "p = 0.02\n"
               "min_errors = 1\n"
               "max_trials = 10\n"
               "batch = 1\n"
               "decoder = oracle\n");  // 2^225 patterns: refused per point
    const std::string csv = temp_path("refused.csv");
    const RunResult res = run_cli("simulate --config " + cfg + " --out " + csv);
    EXPECT_EQ(res.exit_code, 2);
    EXPECT_NE(res.output.find("FAILED"), std::string::npos) << res.output;
    const std::string data = read_file(csv);
    EXPECT_EQ(data, "code,levels,decoder,M,D,wmax,p,trials,errors,error_rate,ci_low,ci_high,seconds,seed\n");
}

TEST(CliDecode, ReportsSyndromesClassesAndOutcome) {
    std::string identity(225, 'I');
    const RunResult res = run_cli("decode --code hamming15 --levels 2 --decoder hdd --error " + identity);
    EXPECT_EQ(res.exit_code, 0) << res.output;
    EXPECT_NE(res.output.find("level 1 syndromes:"), std::string::npos);
    EXPECT_NE(res.output.find("level 2 syndromes:"), std::string::npos);
    EXPECT_NE(res.output.find("estimate class:"), std::string::npos);
    EXPECT_NE(res.output.find("success"), std::string::npos);

    std::string single = identity;
    single[17] = 'X';
    for (const std::string dec : {"hdd", "symbol-map M=8 D=2 wmax=3", "lmld-ca M=8 D=2 wmax=3"}) {
        const RunResult r = run_cli("decode --code hamming15 --levels 2 --p 0.01 --decoder '" + dec +
                                    "' --error " + single);
        EXPECT_EQ(r.exit_code, 0) << r.output;
        EXPECT_NE(r.output.find("success"), std::string::npos) << dec << "\n" << r.output;
    }
}

TEST(CliDecode, ReadsTheErrorFromAFile) {
    const std::string path = temp_path("err.txt");
    std::string single(225, 'I');
    single[3] = 'X';
    write_file(path, single + "\n");
    const RunResult res = run_cli("decode --code hamming15 --levels 2 --decoder hdd --error-file " + path);
    EXPECT_EQ(res.exit_code, 0) << res.output;
    EXPECT_NE(res.output.find("success"), std::string::npos);
}

TEST(CliDecode, MalformedInputsExitOne) {
    const RunResult bad_char = run_cli("decode --code hamming15 --levels 2 --decoder hdd --error XQZ");
    EXPECT_EQ(bad_char.exit_code, 1);
    EXPECT_NE(bad_char.output.find("invalid character"), std::string::npos) << bad_char.output;

    const RunResult bad_len = run_cli("decode --code hamming15 --levels 2 --decoder hdd --error XXI");
    EXPECT_EQ(bad_len.exit_code, 1);
    EXPECT_NE(bad_len.output.find("expected 225 qubits"), std::string::npos) << bad_len.output;

    EXPECT_EQ(run_cli("decode --code hamming15 --levels 2 --decoder hdd").exit_code, 1);
    EXPECT_EQ(run_cli("decode --decoder turbo --error III").exit_code, 1);
}

TEST(CliOracleCheck, SupportedCodesPassAndOthersAreRejected) {
    const RunResult exact = run_cli("oracle-check --code hamming15 --levels 1");
    EXPECT_EQ(exact.exit_code, 0) << exact.output;
    EXPECT_NE(exact.output.find("agreement=1"), std::string::npos) << exact.output;

    const RunResult sampled = run_cli("oracle-check --code c422 --levels 2 --samples 500 --seed 3");
    EXPECT_EQ(sampled.exit_code, 0) << sampled.output;
    EXPECT_NE(sampled.output.find("agreement="), std::string::npos);
    EXPECT_NE(sampled.output.find("wer_gap="), std::string::npos);

    const RunResult vacuous = run_cli("oracle-check --code c422 --levels 2 --samples 0");
    EXPECT_EQ(vacuous.exit_code, 0);
    EXPECT_NE(vacuous.output.find("vacuous pass"), std::string::npos);

    const RunResult unsupported = run_cli("oracle-check --code hamming15 --levels 2 --samples 10");
    EXPECT_EQ(unsupported.exit_code, 1);
    EXPECT_NE(unsupported.output.find("unsupported code"), std::string::npos) << unsupported.output;
}

TEST(CliCodes, ListsShippedGeometry) {
    const RunResult res = run_cli("codes");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.output.find("hamming15: [[15,7,3]]"), std::string::npos) << res.output;
    EXPECT_NE(res.output.find("c422: [[4,2,2]]"), std::string::npos) << res.output;
    EXPECT_NE(res.output.find("n_total=3375"), std::string::npos) << res.output;
}

TEST(CliCodes, UnknownSubcommandExitsOne) {
    EXPECT_EQ(run_cli("frobnicate").exit_code, 1);
    EXPECT_EQ(run_cli("").exit_code, 1);  // a subcommand is required
}
