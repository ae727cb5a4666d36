#include <gtest/gtest.h>

#include <sstream>

#include "npqsim/scenario.hpp"

namespace npqsim {
namespace {

Scenario parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "test.cfg");
}

ConfigError config_error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "expected ConfigError";
    return ConfigError("", 0, "", "");
}

TEST(Scenario, Defaults) {
    const Scenario s;
    EXPECT_EQ(s.experiment, Experiment::Table1Sweep);
    EXPECT_EQ(s.table1.banks, (std::vector<unsigned>{1, 4, 8, 12, 16}));
    EXPECT_EQ(s.table5.loads, (std::vector<double>{1.6, 3.2, 4.0, 4.8, 6.14}));
    EXPECT_EQ(s.seeds.size(), 10u);
    EXPECT_TRUE(s.dram.interleave_penalty);
    EXPECT_NO_THROW(s.validate());
}

TEST(Scenario, ParsesDottedKeys) {
    const Scenario s = parse(
        "# comment\n"
        "experiment = table5\n"
        "\n"
        "dram.banks=16\n"
        "dram.interleave_penalty=off\n"
        "seeds=3,4\n"
        "table5.loads=1.6, 6.14\n"
        "pipeline.port_priorities=0,1,2,3\n"
        "pipeline.latency.Delete=9\n"
        "workload.mix=Enqueue:0.6,Dequeue:0.4\n"
        "cost.modes=dma\n");
    EXPECT_EQ(s.experiment, Experiment::Table5Sweep);
    EXPECT_EQ(s.dram.banks, 16u);
    EXPECT_FALSE(s.dram.interleave_penalty);
    EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{3, 4}));
    EXPECT_EQ(s.table5.loads, (std::vector<double>{1.6, 6.14}));
    EXPECT_EQ(s.pipeline.port_priorities, (std::vector<int>{0, 1, 2, 3}));
    EXPECT_EQ(s.pipeline.latencies.at(CommandKind::Delete), 9u);
    ASSERT_EQ(s.workload.mix.size(), 2u);
    EXPECT_EQ(s.workload.mix[0].first, CommandKind::Enqueue);
    EXPECT_DOUBLE_EQ(s.workload.mix[0].second, 0.6);
    EXPECT_EQ(s.cost.modes, (std::vector<cost::CopyMode>{cost::CopyMode::Dma}));
}

TEST(Scenario, ErrorsNameLineAndKey) {
    const ConfigError unknown = config_error_of("dram.banks=4\ndram.bnaks=4\n");
    EXPECT_EQ(unknown.line(), 2u);
    EXPECT_EQ(unknown.key(), "dram.bnaks");
    EXPECT_EQ(unknown.source(), "test.cfg");

    const ConfigError bad_value = config_error_of("\n\ndram.banks=eight\n");
    EXPECT_EQ(bad_value.line(), 3u);
    EXPECT_EQ(bad_value.key(), "dram.banks");

    EXPECT_EQ(config_error_of("just words\n").line(), 1u);
    EXPECT_EQ(config_error_of("table1.policies=naive,greedy\n").key(), "table1.policies");
    EXPECT_EQ(config_error_of("workload.mix=Enqueue\n").key(), "workload.mix");
    EXPECT_EQ(config_error_of("workload.mix=Bogus:1\n").key(), "workload.mix");
    EXPECT_EQ(config_error_of("seeds=\n").key(), "seeds");
    EXPECT_EQ(config_error_of("pipeline.latency.Read=0\n").key(), "pipeline.latency.Read");
}

TEST(Scenario, OverridesApplyAfterFile) {
    Scenario s = parse("dram.banks=4\n");
    apply_override(s, "dram.banks=12");
    EXPECT_EQ(s.dram.banks, 12u);
    EXPECT_THROW(apply_override(s, "dram.banks"), ConfigError);
    EXPECT_THROW(apply_override(s, "nope=1"), ConfigError);
}

TEST(Scenario, ValidateCatchesCrossFieldProblems) {
    Scenario s;
    s.dram.banks = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = Scenario{};
    s.seeds.clear();
    EXPECT_THROW(s.validate(), ConfigError);
    s = Scenario{};
    s.pipeline.ports = 2;
    EXPECT_THROW(s.validate(), ConfigError);
    s = Scenario{};
    s.workload.mix = {{CommandKind::Enqueue, 0.5}};
    EXPECT_THROW(s.validate(), ConfigError);
    s = Scenario{};
    s.table1.banks = {4, 0};
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Scenario, DescribeRoundTrips) {
    Scenario s = parse(
        "experiment=custom\nseeds=9\ndram.banks=12\nworkload.offered_gbps=2.5\n"
        "workload.mix=Enqueue:0.5,Move:0.25,Dequeue:0.25\ntable1.policies=optimized\n"
        "table1.penalty=on\npipeline.dram_policy=naive\ncost.clocks_mhz=133\n");
    std::ostringstream text;
    for (const auto& [k, v] : describe(s)) {
        text << k << '=' << v << '\n';
    }
    const Scenario back = parse(text.str());
    EXPECT_EQ(describe(back), describe(s));
}

TEST(Scenario, EffectiveConfigsShareSettings) {
    Scenario s;
    s.dram.banks = 4;
    s.pipeline.ports = 2;
    s.pipeline.port_priorities = {0, 0};
    EXPECT_EQ(s.effective_pipeline().dram.banks, 4u);
    const WorkloadSpec w = s.effective_workload(77, 3.2);
    EXPECT_EQ(w.seed, 77u);
    EXPECT_DOUBLE_EQ(w.offered_gbps, 3.2);
    EXPECT_EQ(w.ports, 2u);
}

TEST(Scenario, FormatDoubleIsShortestRoundTrip) {
    EXPECT_EQ(format_double(6.14), "6.14");
    EXPECT_EQ(format_double(4.0), "4");
    EXPECT_EQ(format_double(0.1 + 0.2), "0.30000000000000004");
}

}  // namespace
}  // namespace npqsim
