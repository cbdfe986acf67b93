// End-to-end checks of the command-line tool: exit codes, report contents,
// and byte-reproducibility of reports modulo the timestamp field.

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

std::string g_cli;

struct RunResult {
    int exitCode;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = g_cli + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, ""};
    while (fgets(buf.data(), buf.size(), p)) out += buf.data();
    int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string strip_timestamp(std::string s) {
    auto j = nlohmann::json::parse(s);
    j.erase("timestamp");
    return j.dump(2);
}

const char* kConicOnes = R"({"d":1,"n":2,"points":[[0],[1],[2]],"alpha":["1","1","1"]})";
const char* kConic211 =
    R"({"d":1,"n":2,"points":[[0],[1],[2]],"alpha":["2","1","1"],"mc":{"samples":200000,"seed":42},"checks":["mahler"]})";
const char* kBadLattice = R"({"d":1,"n":2,"points":[[0],[2],[4]],"alpha":["1","1","1"]})";

}  // namespace

TEST(Cli, RunConicUnitAlpha) {
    write_file("/tmp/toric_cli_a.json", kConicOnes);
    auto r = run("run /tmp/toric_cli_a.json --report /tmp/toric_cli_a_rep.json");
    EXPECT_EQ(r.exitCode, 0) << r.out;
    auto j = nlohmann::json::parse(slurp("/tmp/toric_cli_a_rep.json"));
    EXPECT_EQ(j["schema"], 1);
    EXPECT_TRUE(j["height"]["log_coeffs"].empty());  // h = 0 exactly
    EXPECT_EQ(j["generators"][0]["w"][0], "2");
    EXPECT_EQ(j["generators"][0]["w"][1], "-1");
    EXPECT_EQ(j["degree"], 2);
}

TEST(Cli, RunConicWithMahlerCheck) {
    write_file("/tmp/toric_cli_b.json", kConic211);
    auto r = run("run /tmp/toric_cli_b.json --report /tmp/toric_cli_b_rep.json --quiet");
    EXPECT_EQ(r.exitCode, 0) << r.out;
    auto j = nlohmann::json::parse(slurp("/tmp/toric_cli_b_rep.json"));
    double h = j["height"]["approx"].get<double>();
    double oracle = j["oracles"]["mahler"]["total"].get<double>();
    EXPECT_NEAR(h, std::log(2.0), 1e-9);
    EXPECT_NEAR(oracle, std::log(2.0), 0.01);
    EXPECT_TRUE(j["oracles"]["mahler"]["agree"].get<bool>());
    EXPECT_EQ(j["height"]["alpha_basis"]["b"][0], "1");
}

TEST(Cli, LatticeNotGeneratedIsExitTwo) {
    write_file("/tmp/toric_cli_c.json", kBadLattice);
    auto r = run("run /tmp/toric_cli_c.json");
    EXPECT_EQ(r.exitCode, 2);
    EXPECT_NE(r.out.find("index 2"), std::string::npos) << r.out;
}

TEST(Cli, MalformedInputIsExitTwo) {
    write_file("/tmp/toric_cli_d.json", "{\"d\": 1");
    EXPECT_EQ(run("run /tmp/toric_cli_d.json").exitCode, 2);
    write_file("/tmp/toric_cli_e.json",
               R"({"d":1,"n":2,"points":[[0],[1],[2]],"alpha":["1","0","1"]})");
    EXPECT_EQ(run("run /tmp/toric_cli_e.json").exitCode, 2);
}

TEST(Cli, ReportRoundTripByteIdentical) {
    write_file("/tmp/toric_cli_f.json", kConic211);
    auto r1 = run("run /tmp/toric_cli_f.json --report /tmp/toric_cli_f1.json --quiet");
    auto r2 = run("run /tmp/toric_cli_f.json --report /tmp/toric_cli_f2.json --quiet");
    EXPECT_EQ(r1.exitCode, 0);
    EXPECT_EQ(r2.exitCode, 0);
    EXPECT_EQ(strip_timestamp(slurp("/tmp/toric_cli_f1.json")),
              strip_timestamp(slurp("/tmp/toric_cli_f2.json")));
}

TEST(Cli, VerifyConicPasses) {
    write_file("/tmp/toric_cli_g.json", kConicOnes);
    auto r = run("verify /tmp/toric_cli_g.json --mc-samples 50000");
    EXPECT_EQ(r.exitCode, 0) << r.out;
    EXPECT_NE(r.out.find("PASS  zero-law"), std::string::npos);
    EXPECT_NE(r.out.find("all invariants hold"), std::string::npos);
}

TEST(Cli, VerifyRandomAlphaBattery) {
    write_file("/tmp/toric_cli_h.json",
               R"({"d":1,"n":3,"points":[[0],[1],[2],[3]],"alpha":["2","3","1","5"],"mc":{"samples":50000,"seed":7}})");
    auto r = run("verify /tmp/toric_cli_h.json");
    EXPECT_EQ(r.exitCode, 0) << r.out;
}

TEST(Cli, VerifyCorruptedConfigIsExitTwo) {
    write_file("/tmp/toric_cli_i.json", kBadLattice);
    EXPECT_EQ(run("verify /tmp/toric_cli_i.json").exitCode, 2);
}

TEST(Cli, RefinementBudgetEnvVar) {
    write_file("/tmp/toric_cli_k.json", kConic211);
    std::string cmd = "TORIC_HEIGHT_BITS=128 " + g_cli +
                      " run /tmp/toric_cli_k.json --quiet --checks '' 2>&1";
    std::array<char, 256> buf{};
    FILE* p = popen(cmd.c_str(), "r");
    ASSERT_NE(p, nullptr);
    while (fgets(buf.data(), buf.size(), p)) {
    }
    EXPECT_EQ(WEXITSTATUS(pclose(p)), 0);
}

TEST(Cli, FlagOverridesApply) {
    write_file("/tmp/toric_cli_l.json", kConicOnes);
    auto r = run("run /tmp/toric_cli_l.json --mc-samples 20000 --mc-seed 9 --checks mahler "
                 "--report /tmp/toric_cli_l_rep.json --quiet");
    EXPECT_EQ(r.exitCode, 0) << r.out;
    auto j = nlohmann::json::parse(slurp("/tmp/toric_cli_l_rep.json"));
    EXPECT_EQ(j["oracles"]["mahler"]["arch"]["samples"], 20000);
    EXPECT_EQ(j["oracles"]["mahler"]["arch"]["seed"], 9);
}

TEST(Cli, FloatMode) {
    write_file("/tmp/toric_cli_j.json",
               R"({"d":1,"n":2,"points":[[0],[1],[2]],"alpha":["1","1","1.4142135623730951"],"mode":"float"})");
    auto r = run("run /tmp/toric_cli_j.json --report /tmp/toric_cli_j_rep.json --quiet");
    EXPECT_EQ(r.exitCode, 0) << r.out;
    auto j = nlohmann::json::parse(slurp("/tmp/toric_cli_j_rep.json"));
    EXPECT_EQ(j["mode"], "float");
    EXPECT_TRUE(j["approximate"].get<bool>());
    EXPECT_NEAR(j["height"]["approx"].get<double>(), 0.5 * std::log(2.0), 1e-9);
}

int main(int argc, char** argv) {
    ::testing::InitGoogleTest(&argc, argv);
    if (argc < 2) {
        fprintf(stderr, "usage: test_cli <path-to-toric-height-binary>\n");
        return 2;
    }
    g_cli = argv[1];
    return RUN_ALL_TESTS();
}
