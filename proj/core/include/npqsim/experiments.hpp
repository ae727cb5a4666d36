#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "npqsim/scenario.hpp"

namespace npqsim {

/// Worker count from NPQSIM_THREADS, else hardware concurrency; at least 1.
unsigned worker_threads();

struct Table1Row {
    unsigned banks = 0;
    Policy policy = Policy::Naive;
    bool penalty = false;
    double loss = 0;
    std::optional<std::uint64_t> seed;  ///< empty for the mean row
    std::int64_t horizon = 0;
};

/// One row per (banks, policy, penalty, seed), each group followed by its
/// mean row. Order is the parameter tuple then seed, independent of threads.
std::vector<Table1Row> run_table1(const Scenario& s, unsigned threads = worker_threads());

struct Table5Row {
    double offered_gbps = 0;
    DelayBreakdown delays;
    double mops = 0;
    double gbps_served = 0;
};

/// Runs the workload at one load for one seed.
Table5Row run_load_point(const Scenario& s, double offered_gbps, std::uint64_t seed);

/// One row per load, averaged over seeds.
std::vector<Table5Row> run_table5(const Scenario& s, unsigned threads = worker_threads());

/// Single load point at workload.offered_gbps, averaged over seeds.
std::vector<Table5Row> run_custom(const Scenario& s, unsigned threads = worker_threads());

/// Runs one load point and writes the final queue-manager dump.
void dump_final_queues(std::ostream& out, const Scenario& s, double offered_gbps, std::uint64_t seed);

void write_header(std::ostream& out, const Scenario& s);
void write_table1_csv(std::ostream& out, const Scenario& s, const std::vector<Table1Row>& rows);
void write_table5_csv(std::ostream& out, const Scenario& s, const std::vector<Table5Row>& rows);
void write_cost_report(std::ostream& out, const Scenario& s);

/// Runs whatever `s.experiment` names and writes its output.
void run_experiment(std::ostream& out, const Scenario& s, unsigned threads = worker_threads());

}  // namespace npqsim
