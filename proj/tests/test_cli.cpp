#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tailcv/cli.hpp"
#include "tailcv/experiment.hpp"
#include "tailcv/io.hpp"

using namespace tailcv;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "tailcv_test_cli";
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(run({"--help"}).code, 0);
    const auto none = run({});
    EXPECT_NE(none.code, 0);
    const auto unknown = run({"estimate", "--bogus", "1"});
    EXPECT_NE(unknown.code, 0);
    EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
    const auto missing = run({"simulate", "--config", "x.txt"});
    EXPECT_NE(missing.code, 0);
    EXPECT_NE(missing.err.find("--out"), std::string::npos);
    EXPECT_NE(run({"rvr-sweep", "--config", "c", "--vary", "tau", "--values", "1", "--out", "d"}).code,
              0);
}

TEST(Cli, EstimateOnThreeRows) {
    const auto dir = scratch();
    write(dir / "three.csv", "target,source\n1.0,2.0\n2.0,3.0\n4.0,5.0\n");
    const auto r = run({"estimate", "--data", (dir / "three.csv").string(), "--k", "1", "--methods",
                        "hill", "--out", (dir / "three.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto j = nlohmann::json::parse(slurp(dir / "three.json"));
    EXPECT_EQ(j.at("data").at("n"), 3);
    EXPECT_EQ(j.at("data").at("m"), 0);
    ASSERT_EQ(j.at("estimates").size(), 1u);
    EXPECT_EQ(j.at("estimates")[0].at("method"), "hill");
    EXPECT_NEAR(j.at("estimates")[0].at("value").get<double>(), std::log(2.0), 1e-15);
    EXPECT_TRUE(j.contains("dependence"));
}

TEST(Cli, EstimateTransferredOnGeneratedData) {
    const auto dir = scratch();
    ExperimentConfig cfg;
    io::write_semi_supervised_csv(dir / "gen.csv", generate_dataset(cfg, 0));
    const auto r = run({"estimate", "--data", (dir / "gen.csv").string(), "--k", "100", "--methods",
                        "hill,moment,transferred_hill,transferred_moment", "--out",
                        (dir / "gen.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "gen.json"));
    EXPECT_EQ(j.at("estimates").size(), 4u);
    EXPECT_EQ(j.at("data").at("m"), 5000);
    EXPECT_TRUE(j.at("dependence").at("lambda_hat").is_number());
}

TEST(Cli, ComputationErrorsSurface) {
    const auto dir = scratch();
    write(dir / "bad.csv", "target,source\n1,2\nNaN,3\n4,5\n6,7\n");
    const auto r = run({"estimate", "--data", (dir / "bad.csv").string(), "--k", "1", "--methods",
                        "hill", "--out", (dir / "bad.json").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error: "), std::string::npos);
    EXPECT_NE(r.err.find("line 3"), std::string::npos);

    write(dir / "ties.csv", "target,source\n1,1\n2,2\n3,3\n3,4\n3,5\n");
    const auto t = run({"estimate", "--data", (dir / "ties.csv").string(), "--k", "2", "--methods",
                        "hill", "--out", (dir / "ties.json").string()});
    EXPECT_EQ(t.code, 1);
    EXPECT_NE(t.err.find("no exceedances"), std::string::npos);
}

TEST(Cli, HillPlot) {
    const auto dir = scratch();
    write(dir / "five.csv", "target,source\n1,1\n2,2\n4,4\n8,8\n16,16\n");
    const auto r = run({"hill-plot", "--data", (dir / "five.csv").string(), "--k-min", "1",
                        "--k-max", "2", "--step", "1", "--out", (dir / "hp.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = io::read_csv_table(dir / "hp.csv");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][0], "1");
    EXPECT_EQ(t.rows[1][0], "2");
    EXPECT_NEAR(io::parse_double(t.rows[0][1]), std::log(2.0), 1e-15);
    EXPECT_NEAR(io::parse_double(t.rows[1][1]), 1.5 * std::log(2.0), 1e-15);
}

TEST(Cli, SimulateIsByteIdenticalAcrossThreads) {
    const auto dir = scratch();
    write(dir / "sim.txt", "theta = 5\nreplications = 40\nseed = 3\n");
    const auto a = run({"simulate", "--config", (dir / "sim.txt").string(), "--out",
                        (dir / "sim1").string(), "--threads", "1"});
    const auto b = run({"simulate", "--config", (dir / "sim.txt").string(), "--out",
                        (dir / "sim4").string(), "--threads", "4"});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(slurp(dir / "sim1" / "rvr_report.json"), slurp(dir / "sim4" / "rvr_report.json"));
    EXPECT_EQ(slurp(dir / "sim1" / "estimates.csv"), slurp(dir / "sim4" / "estimates.csv"));

    const auto report =
        io::rvr_report_from_json(nlohmann::json::parse(slurp(dir / "sim1" / "rvr_report.json")));
    EXPECT_EQ(report.config.seed, 3u);
    EXPECT_EQ(report.replications_completed, 40u);

    const auto c = run({"simulate", "--config", (dir / "sim.txt").string(), "--out",
                        (dir / "sim_seed").string(), "--seed", "4"});
    ASSERT_EQ(c.code, 0);
    EXPECT_NE(slurp(dir / "sim_seed" / "estimates.csv"), slurp(dir / "sim1" / "estimates.csv"));
}

TEST(Cli, RvrSweep) {
    const auto dir = scratch();
    write(dir / "sweep.txt", "replications = 30\n");
    const auto r = run({"rvr-sweep", "--config", (dir / "sweep.txt").string(), "--vary", "theta",
                        "--values", "2,10", "--out", (dir / "sweep").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = io::read_csv_table(dir / "sweep" / "sweep.csv");
    EXPECT_EQ(t.header, (std::vector<std::string>{"theta", "pair", "rvr", "var_base", "var_new",
                                                  "lambda_hat"}));
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(t.rows[0][0], "2");
    EXPECT_EQ(t.rows[0][1], "hill/transferred_hill");
    EXPECT_EQ(t.rows[3][0], "10");
    EXPECT_TRUE(fs::exists(dir / "sweep" / "rvr_report_0.json"));
    EXPECT_TRUE(fs::exists(dir / "sweep" / "rvr_report_1.json"));
}

TEST(Cli, ThresholdScanAndBootstrap) {
    const auto dir = scratch();
    write(dir / "scan.txt", "replications = 20\n");
    const auto s = run({"threshold-scan", "--config", (dir / "scan.txt").string(), "--l-min", "80",
                        "--l-max", "120", "--l-step", "10", "--out", (dir / "scan.csv").string()});
    ASSERT_EQ(s.code, 0) << s.err;
    const auto scan = io::read_csv_table(dir / "scan.csv");
    ASSERT_EQ(scan.rows.size(), 5u);
    EXPECT_EQ(scan.header[0], "l");
    EXPECT_EQ(scan.rows[4][0], "120");

    ExperimentConfig cfg;
    cfg.n = 3000;
    cfg.k = 300;
    cfg.m = 0;
    io::write_semi_supervised_csv(dir / "pool.csv", generate_dataset(cfg, 0));
    const auto b = run({"bootstrap", "--data", (dir / "pool.csv").string(), "--n-sub", "1000",
                        "--resamples", "15", "--k", "100", "--methods", "hill,transferred_hill",
                        "--out", (dir / "boot.csv").string()});
    ASSERT_EQ(b.code, 0) << b.err;
    const auto boot = io::read_csv_table(dir / "boot.csv");
    EXPECT_EQ(boot.header, (std::vector<std::string>{"method", "index", "value"}));
    EXPECT_EQ(boot.rows.size(), 30u);
}
