#include <gtest/gtest.h>

#include <sstream>

#include "srlda/config.hpp"

using namespace srlda;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_run_config(in, "test.cfg");
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::config_error);
        return e.what();
    }
    ADD_FAILURE() << "no error for: " << text;
    return {};
}

} // namespace

TEST(Config, DefaultsMaterialised) {
    const RunConfig c = parse("");
    EXPECT_EQ(c.seed, 1u);
    EXPECT_EQ(c.simulation.p, 150);
    EXPECT_EQ(c.simulation.pi0, 0.2);
    EXPECT_TRUE(c.fit_pi0_auto);
    const auto j = c.resolved();
    EXPECT_EQ(j["fit"]["sigma2"], "auto");
    EXPECT_EQ(j["simulation"]["head_weights"].size(), 3u);
    EXPECT_FALSE(j["run"].contains("threads"));
}

TEST(Config, ParsesSections) {
    const RunConfig c = parse(R"(; comment
[run]
seed = 7
threads = 3
classifiers = lda, oi-srlda

[simulation]
p = 80
n_values = 100, 200
a = 2
mean_scaling = per_sqrt_p
head_weights = 9,3

[fit]
pi0 = 0.4
sigma2 = 1.5
r1 = 2
r2 = 0
grid_step = 0.02
refine = true

[benchmark]
n_values = 200,450
repetitions = 10
q0 = 0.5
)");
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.threads, 3u);
    ASSERT_EQ(c.classifiers.size(), 2u);
    EXPECT_EQ(c.classifiers[1], ClassifierKind::oi_srlda);
    EXPECT_EQ(c.simulation.p, 80);
    EXPECT_EQ(c.simulation_n, (std::vector<Index>{100, 200}));
    EXPECT_EQ(c.simulation.mean_scaling, MeanScaling::per_sqrt_p);
    EXPECT_EQ(c.simulation.head_weights, (std::vector<double>{9, 3}));
    EXPECT_EQ(*c.fit.pi0, 0.4);
    EXPECT_EQ(*c.fit.sigma2, 1.5);
    EXPECT_EQ(c.fit.spike_counts->r1, 2);
    EXPECT_EQ(c.fit.grid.step, 0.02);
    EXPECT_TRUE(c.fit.grid.refine);
    EXPECT_EQ(c.benchmark.repetitions, 10);
    EXPECT_EQ(*c.benchmark.q0, 0.5);
    EXPECT_EQ(c.benchmark.seed, 7u);
    EXPECT_EQ(c.simulation_split(101).first, 50);
}

TEST(Config, UnknownKeyNamed) {
    const auto msg = error_of("[simulation]\nrepetitons = 5\n");
    EXPECT_NE(msg.find("repetitons"), std::string::npos);
    EXPECT_NE(msg.find("[simulation]"), std::string::npos);
}

TEST(Config, UnknownSection) {
    EXPECT_NE(error_of("[simulaton]\np = 5\n").find("simulaton"), std::string::npos);
}

TEST(Config, BadValuesNamed) {
    EXPECT_NE(error_of("[simulation]\np = many\n").find("p"), std::string::npos);
    EXPECT_NE(error_of("[fit]\ngrid_step = 0.5\n").find("grid_step"), std::string::npos);
    EXPECT_NE(error_of("[run]\nclassifiers = lda,qda\n").find("classifiers"), std::string::npos);
    EXPECT_NE(error_of("[fit]\nr1 = 2\n").find("r1"), std::string::npos);
    EXPECT_NE(error_of("[simulation]\npi0 = 1.5\n").find("pi0"), std::string::npos);
    EXPECT_NE(error_of("[surface]\nspikes = 20\n").find("spikes"), std::string::npos);
}

TEST(Config, SurfaceSpikes) {
    const RunConfig c = parse("[surface]\nJ0 = 1\nJ1 = 1\nspikes = 20:0.5, -0.9:0.1:0.3\nobjective = oi\n");
    ASSERT_EQ(c.surface.spikes.size(), 2u);
    EXPECT_EQ(c.surface.spikes[0].group, SpikeGroup::positive);
    EXPECT_NEAR(c.surface.spikes[0].a, angle_factor(20, 0.5), 1e-15);
    EXPECT_EQ(c.surface.spikes[1].group, SpikeGroup::negative);
    EXPECT_EQ(c.surface.spikes[1].a, 0.3);
    EXPECT_EQ(c.surface.objective, Objective::optimal_intercept);
}

TEST(Config, MissingFileNamesPath) {
    try {
        load_run_config("/nonexistent/x.cfg");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::config_error);
        EXPECT_NE(std::string(e.what()).find("/nonexistent/x.cfg"), std::string::npos);
    }
}

TEST(Config, BundledConfigsParse) {
    for (const char* name : {"simulation_a1.cfg", "simulation_a2.cfg", "wdbc.cfg", "surface_single_spike.cfg"})
        EXPECT_NO_THROW(load_run_config(std::string(SRLDA_SOURCE_DIR) + "/configs/" + name)) << name;
}
