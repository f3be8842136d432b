#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "delaylab/delaylab.hpp"

using namespace delaylab;

namespace {

struct CliResult {
    int status;
    std::string out;
};

CliResult run(const std::string& args) {
    const std::string cmd = std::string(DELAYLAB_CLI) + " " + args + " 2>/dev/null";
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return {-1, ""};
    std::string out;
    char buf[4096];
    while (std::size_t k = std::fread(buf, 1, sizeof buf, p)) out.append(buf, k);
    const int st = ::pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("delaylab_cli_" + std::to_string(::getpid()) + "_" + name);
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::string> v;
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(run("--help").status, 0);
    EXPECT_EQ(run("").status, 2);
    EXPECT_EQ(run("spectrum --no-such-flag").status, 2);
    EXPECT_EQ(run("crrid --n 1").status, 2);
    EXPECT_EQ(run("control-mid --a 1,0 --m 1 --tau 1 --branch sideways").status, 2);
}

TEST(Cli, ExitCodeClasses) {
    EXPECT_EQ(run("crrid --n 1 --m 0 --tau 1 --roots -1,-1").status, 2);
    EXPECT_EQ(run("control-mid --a 1,0 --m 1 --tau 2").status, 3);
    EXPECT_EQ(run("admissibility --example oscillator --s0-min -4 --tau-max 2 --grid 3000x10").status, 2);
    EXPECT_EQ(run("control-mid --a 1,0 --m 1 --tau 1").status, 0);
}

TEST(Cli, ControlMidText) {
    const CliResult r = run("control-mid --a 1,0 --m 1 --tau 1");
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("s0 = -1"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("-0.735759"), std::string::npos) << r.out;
}

TEST(Cli, CrridJson) {
    const CliResult r = run("crrid --n 1 --m 0 --tau 1 --roots -1,-2 --json");
    ASSERT_EQ(r.status, 0);
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["qp"]["a"][0].get<double>(), 0.418023, 1e-6);
    EXPECT_NEAR(j["qp"]["b"][0].get<double>(), 0.214097, 1e-6);
}

TEST(Cli, JsonMatchesServicePayload) {
    const Limits lim{};
    struct Case {
        std::string args;
        json payload;
    };
    const json osc_qp{{"n", 2}, {"m", 1}, {"a", {1.0, 0.0}}, {"b", {-2.0 / M_E, 0.0}}, {"tau", 1.0}};
    const std::vector<Case> cases{
        {"generic-mid --n 2 --m 1 --tau 1 --s0 0 --json", api::generic_mid({{"n", 2}, {"m", 1}, {"tau", 1}, {"s0", 0}}, lim)},
        {"crrid --n 2 --m 0 --tau 0.5 --roots -1,-2,-3 --json",
         api::crrid({{"n", 2}, {"m", 0}, {"tau", 0.5}, {"roots", {-1, -2, -3}}}, lim)},
        {"control-mid --example pendulum --s0 -5 --json",
         api::control_mid({{"example", {{"id", "pendulum"}}}, {"s0", -5}}, lim)},
        {"spectrum --qp '" + osc_qp.dump() + "' --window -8,1,20 --json",
         api::spectrum({{"qp", osc_qp}, {"window", {{"x_min", -8}, {"x_max", 1}, {"y_max", 20}}}}, lim)},
        {"examples --json", api::examples()},
    };
    for (const auto& c : cases) {
        const CliResult r = run(c.args);
        ASSERT_EQ(r.status, 0) << c.args;
        EXPECT_EQ(json::parse(r.out), c.payload) << c.args;
    }
}

TEST(Cli, AdmissibilityCsv) {
    const auto path = temp_file("adm.csv");
    const CliResult r = run("admissibility --example oscillator --s0-min -4 --tau-max 2 --grid 200x200 --out " + path.string());
    ASSERT_EQ(r.status, 0);
    const auto lines = lines_of(path);
    std::filesystem::remove(path);
    ASSERT_EQ(lines.size(), 40001u);
    EXPECT_EQ(lines[0], "s0,tau,F");
    std::istringstream row(lines[1]);
    std::string s0;
    std::getline(row, s0, ',');
    EXPECT_DOUBLE_EQ(std::stod(s0), -4.0);
}

TEST(Cli, SimulateCsv) {
    const auto path = temp_file("sim.csv");
    const CliResult r = run("simulate --a 1,0 --b -0.7357588823428847,0 --tau 1 --history constant:0.1 --T 5 --step 0.05 --out " +
                      path.string());
    ASSERT_EQ(r.status, 0);
    const auto lines = lines_of(path);
    std::filesystem::remove(path);
    ASSERT_EQ(lines.size(), 102u);
    EXPECT_EQ(lines[0], "t,y");
}

TEST(Cli, ReportJsonIsDeterministic) {
    const std::string args = "report --example pendulum --s0 -5 --sections ControlMID --format json --timestamp T";
    const CliResult a = run(args), b = run(args);
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    const json doc = json::parse(a.out);
    EXPECT_EQ(doc["metadata"]["timestamp"], "T");
    EXPECT_EQ(doc["sections"].size(), 1u);
}
