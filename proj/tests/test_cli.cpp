#include <gtest/gtest.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dirac1d/cli.hpp"

using namespace dirac1d;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const std::string& command, nlohmann::json potential) {
    RunConfig c;
    c.command = command;
    c.potential = std::move(potential);
    c.k.count = 120;
    c.e_resolution = 600;
    c.theta_count = 51;
    return c;
}

nlohmann::json delta_well() { return {{"kind", "delta"}, {"params", {{"U0", 1.0}, {"sign", "well"}}}}; }

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("dirac1d_test_" + name);
    fs::remove_all(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + DIRAC1D_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Format, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-0.0), "0");
    EXPECT_EQ(format_double(1e-300), "1e-300");
    EXPECT_EQ(format_double(std::nan("")), "nan");
    EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(FormatProperty, ParsesBackExactly) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 20000; ++i) {
        const auto b = bits(rng);
        double x;
        std::memcpy(&x, &b, sizeof x);
        if (!std::isfinite(x)) continue;
        const auto s = format_double(x);
        double y = 0;
        std::from_chars(s.data(), s.data() + s.size(), y);
        EXPECT_EQ(y, x == 0.0 ? 0.0 : x) << s;
    }
}

TEST(Cli, ChannelListIsCanonical) {
    const auto c = parse_channel_list("odd-,even+,odd-");
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(to_string(c[0]), "even+");
    EXPECT_EQ(to_string(c[1]), "odd-");
    EXPECT_THROW(parse_channel_list("even+,sideways"), ValidationError);
}

TEST(Cli, ConfigJsonRoundTrip) {
    auto c = small_config("sweep", {{"kind", "square_well"}, {"params", {{"V0", 1.0}, {"a", 1.0}}}});
    c.channels = parse_channel_list("odd+");
    c.sweep = {"V0", 0.5, 2.5, 5};
    c.tol_levinson = 1e-7;
    c.k.spacing = "lin";
    const auto j = to_json(c);
    const auto back = config_from_json(j);
    EXPECT_EQ(to_json(back), j);
    // A manifest is accepted in place of a config.
    EXPECT_EQ(to_json(config_from_json({{"tool", "dirac1d"}, {"config", j}})), j);
}

TEST(Cli, Validation) {
    auto c = small_config("verify", delta_well());
    EXPECT_NO_THROW(c.validate());
    c.command = "dance";
    EXPECT_THROW(c.validate(), ValidationError);
    c = small_config("verify", nullptr);
    EXPECT_THROW(c.validate(), ValidationError);
    c = small_config("verify", delta_well());
    c.k.min = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = small_config("verify", delta_well());
    c.k.spacing = "cubic";
    EXPECT_THROW(c.validate(), ValidationError);
    c = small_config("sweep", delta_well());
    EXPECT_THROW(c.validate(), ValidationError);  // no parameter
    c = small_config("verify", delta_well());
    c.anchor = "guess";
    EXPECT_THROW(c.validate(), ValidationError);
    EXPECT_THROW(config_from_json({{"k", {{"count", "many"}}}}), ValidationError);
}

TEST(Cli, PhaseCurveFree) {
    const auto res = run_command(small_config("phase-curve", {{"kind", "free"}}));
    ASSERT_EQ(res.exit_code, 0);
    for (const char* name : {"phase_even_plus.csv", "phase_even_minus.csv", "phase_odd_plus.csv", "phase_odd_minus.csv"}) {
        ASSERT_TRUE(res.files.count(name)) << name;
        std::istringstream in(res.files.at(name));
        std::string line;
        std::getline(in, line);
        EXPECT_EQ(line, "k,E,eta,eta_mod_pi,R_re,R_im,T_re,T_im");
        int rows = 0;
        while (std::getline(in, line)) {
            std::vector<std::string> cells;
            std::stringstream ls(line);
            for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
            ASSERT_EQ(cells.size(), 8u);
            EXPECT_LT(std::abs(std::stod(cells[2])), 1e-12) << line;
            ++rows;
        }
        EXPECT_EQ(rows, 120);
    }
    EXPECT_TRUE(res.files.count("manifest.json"));
}

TEST(Cli, PhaseCurveOracleEmission) {
    auto c = small_config("phase-curve", {{"kind", "square_well"}, {"params", {{"V0", 2.0}, {"a", 1.0}}}});
    c.emit_oracle = true;
    c.channels = parse_channel_list("even+,odd-");
    const auto res = run_command(c);
    ASSERT_TRUE(res.files.count("oracle_even_plus.csv"));
    ASSERT_TRUE(res.files.count("oracle_odd_minus.csv"));
    EXPECT_FALSE(res.files.count("phase_odd_plus.csv"));
    std::istringstream in(res.files.at("oracle_even_plus.csv"));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto diff = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_LT(std::abs(diff), 1e-8) << line;
    }
    c.potential = {{"kind", "double_delta_well"}, {"params", {{"U0", 1.0}, {"a", 1.0}}}};
    EXPECT_THROW(run_command(c), ValidationError);
}

TEST(Cli, BoundReports) {
    const auto res = run_command(small_config("bound", delta_well()));
    EXPECT_EQ(res.files.at("spectrum.csv").substr(0, 24), "parity,index,E,lambda,no");
    EXPECT_NE(res.files.at("spectrum.csv").find("\neven,0,0.6"), std::string::npos);
    const auto free = run_command(small_config("bound", {{"kind", "free"}}));
    EXPECT_EQ(free.files.at("spectrum.csv"), "parity,index,E,lambda,nodes\n");
    const auto& hb = free.files.at("half_bound.txt");
    EXPECT_NE(hb.find("[even@+mu]\npresent: true"), std::string::npos);
    EXPECT_NE(hb.find("[odd@-mu]\npresent: true"), std::string::npos);
    EXPECT_NE(hb.find("[odd@+mu]\npresent: false"), std::string::npos);
}

TEST(Cli, VerifyPassesForDeltaBarrier) {
    const auto res =
        run_command(small_config("verify", {{"kind", "delta"}, {"params", {{"U0", 1.0}, {"sign", "barrier"}}}}));
    EXPECT_EQ(res.exit_code, 0);
    const auto& text = res.files.at("levinson_report.txt");
    EXPECT_NE(text.find("[even]\nstatus: pass\nn: 0"), std::string::npos);
    EXPECT_NE(text.find("[odd]\nstatus: pass\nn: 1"), std::string::npos);
}

TEST(Cli, SweepListsCriticalCouplings) {
    auto c = small_config("sweep", {{"kind", "square_well"}, {"params", {{"V0", 0.0}, {"a", 1.0}}}});
    c.sweep = {"V0", 2.0, 2.6, 3};
    const auto res = run_command(c);
    EXPECT_EQ(res.exit_code, 0);
    const auto m = nlohmann::json::parse(res.files.at("manifest.json"));
    ASSERT_EQ(m.at("critical_couplings").size(), 1u);
    EXPECT_NEAR(m["critical_couplings"][0]["param"].get<double>(), -1 + std::sqrt(1 + pi * pi), 1e-9);
    std::istringstream in(res.files.at("sweep.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "param,parity,n,eta_mu,eta_minus_mu,lhs,residual,half_bound_flags");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 6);
}

TEST(Cli, DeterministicAndManifestReproduces) {
    auto c = small_config("phase-curve", {{"kind", "square_well"}, {"params", {{"V0", 3.0}, {"a", 1.0}}}});
    const auto a = run_command(c);
    const auto b = run_command(c);
    EXPECT_EQ(a.files, b.files);
    const auto again = run_command(config_from_json(nlohmann::json::parse(a.files.at("manifest.json"))));
    EXPECT_EQ(again.files, a.files);
}

TEST(Cli, WritesFiles) {
    const auto dir = scratch("write");
    auto res = run_command(small_config("bound", delta_well()));
    write_outputs(dir.string(), res);
    EXPECT_EQ(slurp(dir / "spectrum.csv"), res.files.at("spectrum.csv"));
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
}

#ifdef DIRAC1D_CLI_PATH
TEST(CliBinary, ExitCodes) {
    const auto dir = scratch("exit");
    const std::string out = " --out \"" + dir.string() + "\"";
    const std::string quick = " --kcount 80 --eres 400 --theta-count 41";
    EXPECT_EQ(run_cli("verify --inline '{\"kind\":\"delta\",\"params\":{\"U0\":1}}'" + quick + out), 0);
    EXPECT_TRUE(fs::exists(dir / "levinson_report.txt"));
    // usage and validation
    EXPECT_EQ(run_cli("frobnicate"), 1);
    EXPECT_EQ(run_cli("verify --inline '{\"kind\":\"nope\"}'" + out), 1);
    EXPECT_EQ(run_cli("verify --inline '{\"kind\":\"free\"}' --kmin -1" + out), 1);
    EXPECT_EQ(run_cli("verify --potential /nonexistent.json" + out), 1);
    // A too-coarse E grid misses bound states: the identity fails.
    EXPECT_EQ(run_cli("verify --inline '{\"kind\":\"square_well\",\"params\":{\"V0\":4.1,\"a\":1}}' --eres 2"
                      " --kcount 80 --theta-count 41" +
                      out),
              2);
    // Three momenta cannot resolve a deep well's phase: numerical failure.
    EXPECT_EQ(run_cli("phase-curve --inline '{\"kind\":\"square_well\",\"params\":{\"V0\":8,\"a\":3}}' --kcount 3" +
                      out),
              3);
    fs::remove_all(dir);
}

TEST(CliBinary, ConfigFileAndFlagsOverride) {
    const auto dir = scratch("config");
    fs::create_directories(dir);
    auto c = small_config("bound", delta_well());
    c.out_dir = (dir / "first").string();
    {
        std::ofstream f(dir / "cfg.json");
        f << to_json(c).dump();
    }
    ASSERT_EQ(run_cli("bound --config \"" + (dir / "cfg.json").string() + "\""), 0);
    ASSERT_TRUE(fs::exists(dir / "first" / "spectrum.csv"));
    // Re-run from the emitted manifest into another directory with a different thread cap.
    const std::string rerun = "DIRAC1D_THREADS=1 \"" + std::string(DIRAC1D_CLI_PATH) + "\" bound --config \"" +
                              (dir / "first" / "manifest.json").string() + "\" --out \"" +
                              (dir / "second").string() + "\" > /dev/null 2>&1";
    ASSERT_EQ(std::system(rerun.c_str()), 0);
    EXPECT_EQ(slurp(dir / "first" / "spectrum.csv"), slurp(dir / "second" / "spectrum.csv"));
    EXPECT_EQ(slurp(dir / "first" / "half_bound.txt"), slurp(dir / "second" / "half_bound.txt"));
    fs::remove_all(dir);
}
#endif
