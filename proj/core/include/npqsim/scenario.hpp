#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "npqsim/costmodel.hpp"
#include "npqsim/dram.hpp"
#include "npqsim/pipeline.hpp"
#include "npqsim/sched.hpp"
#include "npqsim/traffic.hpp"

namespace npqsim {

enum class Experiment { Table1Sweep, Table5Sweep, CostReport, Custom };

const char* to_string(Experiment e);

struct Table1Options {
    std::vector<unsigned> banks = {1, 4, 8, 12, 16};
    std::vector<Policy> policies = {Policy::Naive, Policy::Optimized};
    std::vector<bool> penalties = {false, true};
    std::int64_t horizon = 1'000'000;
    BankPattern pattern = BankPattern::UniformRandom;
};

struct Table5Options {
    std::vector<double> loads = {1.6, 3.2, 4.0, 4.8, 6.14};
};

struct CostOptions {
    std::vector<cost::CopyMode> modes = {cost::CopyMode::WordTransactions, cost::CopyMode::LineTransactions,
                                         cost::CopyMode::Dma};
    std::vector<std::int64_t> clocks_mhz = {100, 200, 400};
};

/// Everything needed to reproduce one experiment. `dram` is shared by the
/// bank-loss sweep (banks and penalty are swept) and the pipeline.
struct Scenario {
    Experiment experiment = Experiment::Table1Sweep;
    DramConfig dram = PipelineConfig::default_dram();
    PipelineConfig pipeline{};
    WorkloadSpec workload{};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string output_path;
    Table1Options table1{};
    Table5Options table5{};
    CostOptions cost{};

    /// Pipeline config with the shared DRAM settings folded in.
    PipelineConfig effective_pipeline() const;
    /// Workload for one seed and load, matched to the pipeline's ports and clock.
    WorkloadSpec effective_workload(std::uint64_t seed, double offered_gbps) const;

    /// Cross-field checks; throws ConfigError.
    void validate() const;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, std::size_t line, std::string key, const std::string& message);

    const std::string& source() const { return source_; }
    std::size_t line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    std::string source_;
    std::size_t line_;
    std::string key_;
};

/// Sets one dotted key. `line` is 0 for command-line overrides.
void apply_setting(Scenario& s, std::string_view key, std::string_view value, std::string_view source = "--set",
                   std::size_t line = 0);

/// Parses `key=value` text; blank lines and lines starting with '#' are skipped.
Scenario parse_scenario(std::istream& in, std::string_view source, Scenario base = {});

/// `key=value` override as given on the command line.
void apply_override(Scenario& s, std::string_view assignment);

/// Canonical key/value listing; parsing it back yields the same scenario.
std::vector<std::pair<std::string, std::string>> describe(const Scenario& s);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace npqsim
