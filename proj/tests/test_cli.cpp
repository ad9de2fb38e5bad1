#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "srlda/srlda.hpp"

namespace fs = std::filesystem;
using namespace srlda;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

Run run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + SRLDA_CLI_PATH + std::string(" ") + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("srlda_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string small_sim_config() {
        const fs::path cfg = dir / "sim.cfg";
        spit(cfg, "[run]\nclassifiers = srlda,rlda\n[simulation]\np = 30\nn_values = 40,60\nhead_weights = 8\n"
                  "tail_weights =\nmean_scaling = per_sqrt_p\nrepetitions = 4\ntest_size = 100\n");
        return cfg.string();
    }

    std::string toy_csv(int p, bool separable) {
        std::ostringstream ss;
        ss << "id,diagnosis";
        for (int k = 0; k < p; ++k) ss << ",f" << k;
        ss << "\n";
        Rng rng(3);
        std::normal_distribution<double> z;
        for (int i = 0; i < 40; ++i) {
            const bool m = i % 2 == 0;
            ss << i << "," << (m ? "M" : "B");
            for (int k = 0; k < p; ++k) ss << "," << z(rng) + (k == 0 && separable ? (m ? 20 : -20) : 0);
            ss << "\n";
        }
        const fs::path f = dir / ("toy" + std::to_string(p) + ".csv");
        spit(f, ss.str());
        return f.string();
    }

    fs::path dir;
};

} // namespace

TEST_F(Cli, MissingConfigExitsTwoNamingPath) {
    const auto r = run_cli("simulate --config " + (dir / "nope.cfg").string() + " --out " + (dir / "o").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("nope.cfg"), std::string::npos);
}

TEST_F(Cli, UnknownKeyExitsTwo) {
    spit(dir / "bad.cfg", "[simulation]\nrepetitons = 5\n");
    const auto r = run_cli("simulate --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("repetitons"), std::string::npos);
}

TEST_F(Cli, UsageErrorExitsTwo) {
    EXPECT_EQ(run_cli("").code, 2);
    EXPECT_EQ(run_cli("simulate --bogus").code, 2);
    EXPECT_EQ(run_cli("simulate --classifiers qda --out " + (dir / "o").string()).code, 2);
}

TEST_F(Cli, SimulateSameSeedIdenticalFiles) {
    const std::string cfg = small_sim_config();
    const auto a = run_cli("simulate --config " + cfg + " --seed 7 --out " + (dir / "a").string());
    const auto b = run_cli("simulate --config " + cfg + " --seed 7 --threads 3 --out " + (dir / "b").string());
    ASSERT_EQ(a.code, 0) << a.output;
    ASSERT_EQ(b.code, 0) << b.output;
    for (const char* f : {"report.json", "report.csv", "table.csv"}) {
        EXPECT_FALSE(slurp(dir / "a" / f).empty());
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    const auto j = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
    EXPECT_EQ(j["config"]["run"]["seed"], 7);
    EXPECT_EQ(j["results"].size(), 4u);
    EXPECT_NE(slurp(dir / "a" / "table.csv").find("classifier,n=40,n=60"), std::string::npos);
}

TEST_F(Cli, EnvOutputDirOnlyWithoutFlag) {
    const std::string cfg = small_sim_config();
    const std::string env = "SRLDA_OUT_DIR=" + (dir / "env").string();
    ASSERT_EQ(run_cli("simulate --config " + cfg, env).code, 0);
    EXPECT_TRUE(fs::exists(dir / "env" / "report.csv"));
    ASSERT_EQ(run_cli("simulate --config " + cfg + " --out " + (dir / "flag").string(), env).code, 0);
    EXPECT_TRUE(fs::exists(dir / "flag" / "report.csv"));
}

TEST_F(Cli, UnwritableOutputExitsOne) {
    spit(dir / "file", "x");
    const auto r = run_cli("simulate --config " + small_sim_config() + " --out " + (dir / "file" / "sub").string());
    EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, BenchmarkBoundsExitTwo) {
    spit(dir / "b.cfg", "[benchmark]\nn_values = 600\nrepetitions = 2\n");
    const auto r = run_cli("benchmark --config " + (dir / "b.cfg").string() + " --data " + SRLDA_SOURCE_DIR +
                           "/data/wdbc.csv --out " + (dir / "o").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("600"), std::string::npos);
}

TEST_F(Cli, BenchmarkWritesTable) {
    spit(dir / "b.cfg", "[run]\nclassifiers = srlda,rlda\n[benchmark]\nn_values = 200\nrepetitions = 2\n");
    const auto r = run_cli("benchmark --config " + (dir / "b.cfg").string() + " --data " + SRLDA_SOURCE_DIR +
                           "/data/wdbc.csv --out " + (dir / "o").string());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(slurp(dir / "o" / "report.csv").find("srlda,200,"), std::string::npos);
}

TEST_F(Cli, FitPredictRoundTrip) {
    const std::string csv = toy_csv(3, true);
    const auto f = run_cli("fit --classifier srlda --data " + csv + " --out " + (dir / "m").string());
    ASSERT_EQ(f.code, 0) << f.output;
    EXPECT_NE(f.output.find("training error 0\n"), std::string::npos) << f.output;
    const auto p = run_cli("predict --model " + (dir / "m" / "model.json").string() + " --data " + csv + " --out " +
                           (dir / "m").string());
    ASSERT_EQ(p.code, 0) << p.output;
    EXPECT_NE(p.output.find("error 0 "), std::string::npos) << p.output;

    // scores equal the in-memory model bit for bit
    const Dataset d = load_labeled_csv(csv);
    const auto m = fit_srlda(d);
    const auto scores = predict(m, d.features).scores;
    std::istringstream rows(slurp(dir / "m" / "predictions.csv"));
    std::string line;
    std::getline(rows, line);
    for (double s : scores) {
        ASSERT_TRUE(std::getline(rows, line));
        const auto a = line.find(','), b = line.find(',', a + 1);
        EXPECT_EQ(std::stod(line.substr(a + 1, b - a - 1)), s);
    }
}

TEST_F(Cli, PredictDimensionMismatchExitsTwo) {
    ASSERT_EQ(run_cli("fit --classifier lda --data " + toy_csv(3, true) + " --out " + (dir / "m").string()).code, 0);
    const auto r = run_cli("predict --model " + (dir / "m" / "model.json").string() + " --data " + toy_csv(4, true) +
                           " --out " + (dir / "m").string());
    EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, PredictVersionMismatchExitsTwo) {
    ASSERT_EQ(run_cli("fit --classifier lda --data " + toy_csv(3, true) + " --out " + (dir / "m").string()).code, 0);
    auto j = nlohmann::json::parse(slurp(dir / "m" / "model.json"));
    j["version"] = 2;
    spit(dir / "m" / "model.json", j.dump());
    const auto r = run_cli("predict --model " + (dir / "m" / "model.json").string() + " --data " + toy_csv(3, true) +
                           " --out " + (dir / "m").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("version"), std::string::npos);
}

TEST_F(Cli, SurfaceArgminMatchesOptimizer) {
    const auto r = run_cli("surface --config " + std::string(SRLDA_SOURCE_DIR) + "/configs/surface_single_spike.cfg --out " +
                           (dir / "s").string());
    ASSERT_EQ(r.code, 0) << r.output;
    std::istringstream rows(slurp(dir / "s" / "surface.csv"));
    std::string line;
    std::getline(rows, line);
    EXPECT_EQ(line, "omega1,omega2,gamma1,gamma2,value,admissible,argmin");
    std::vector<double> values;
    double argmin_w = -1;
    int flagged = 0;
    while (std::getline(rows, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        values.push_back(std::stod(f[4]));
        if (f[6] == "1") {
            ++flagged;
            argmin_w = std::stod(f[0]);
        }
    }
    ASSERT_EQ(values.size(), 99u);
    EXPECT_EQ(flagged, 1);

    SurfaceParams sp;
    sp.spikes = {{20, angle_factor(20, 0.5), 0.8, SpikeGroup::positive}};
    sp.alpha = 0.25;
    sp.J0 = sp.J1 = 1;
    sp.pi0 = 0.5;
    EXPECT_EQ(argmin_w, optimize_omega(sp, GridSpec{}).omega.omega1);

    // unimodal: decreasing then increasing
    std::size_t k = 0;
    while (k + 1 < values.size() && values[k + 1] <= values[k]) ++k;
    while (k + 1 < values.size() && values[k + 1] >= values[k]) ++k;
    EXPECT_EQ(k + 1, values.size());
}

TEST_F(Cli, SurfaceFlatWhenMeanOrthogonal) {
    spit(dir / "flat.cfg", "[surface]\nalpha = 0.5\nspikes = 10:0\n");
    ASSERT_EQ(run_cli("surface --config " + (dir / "flat.cfg").string() + " --out " + (dir / "s").string()).code, 0);
    std::istringstream rows(slurp(dir / "s" / "surface.csv"));
    std::string line;
    std::getline(rows, line);
    std::set<std::string> values;
    while (std::getline(rows, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        values.insert(f[4]);
    }
    EXPECT_EQ(values.size(), 1u);
}
