#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "npqsim/experiments.hpp"
#include "npqsim/scenario.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfigError = 2, kSimulationError = 3, kIoError = 4 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::vector<std::string> seeds;
    std::string out;
    std::vector<std::string> sets;
    std::optional<std::int64_t> horizon;
    std::string dump_queues;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--seed", o.seeds, "Seed list, comma separated or repeated")->delimiter(',');
    cmd->add_option("--out", o.out, "Output file (default: stdout)");
    cmd->add_option("--set", o.sets, "Override a config key, key=value");
    cmd->add_option("--horizon", o.horizon,
                    "table1: access cycles per seed; pipeline experiments: workload duration in core cycles");
}

npqsim::Scenario load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scenario file '" + path + "'");
    }
    npqsim::Scenario s = npqsim::parse_scenario(in, path);
    if (in.bad()) {
        throw IoError("read failed on '" + path + "'");
    }
    return s;
}

void apply_common(npqsim::Scenario& s, const CommonOptions& o) {
    for (const auto& kv : o.sets) {
        npqsim::apply_override(s, kv);
    }
    if (!o.seeds.empty()) {
        std::string list;
        for (const auto& seed : o.seeds) {
            list += (list.empty() ? "" : ",") + seed;
        }
        npqsim::apply_setting(s, "seeds", list, "--seed");
    }
    if (o.horizon) {
        const std::string v = std::to_string(*o.horizon);
        if (s.experiment == npqsim::Experiment::Table1Sweep) {
            npqsim::apply_setting(s, "table1.horizon", v, "--horizon");
        } else {
            npqsim::apply_setting(s, "workload.duration_cycles", v, "--horizon");
        }
    }
    if (!o.out.empty()) {
        s.output_path = o.out;
    }
}

void emit(const npqsim::Scenario& s) {
    std::ostringstream buf;
    npqsim::run_experiment(buf, s);
    if (s.output_path.empty() || s.output_path == "-") {
        std::cout << buf.str() << std::flush;
        if (!std::cout) {
            throw IoError("write to stdout failed");
        }
        return;
    }
    std::ofstream file(s.output_path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open output file '" + s.output_path + "'");
    }
    file << buf.str();
    file.close();
    if (!file) {
        throw IoError("write failed on '" + s.output_path + "'");
    }
}

void emit_dump(const npqsim::Scenario& s, const std::string& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open dump file '" + path + "'");
    }
    const double load = s.experiment == npqsim::Experiment::Table5Sweep && !s.table5.loads.empty()
                            ? s.table5.loads.front()
                            : s.workload.offered_gbps;
    npqsim::dump_final_queues(file, s, load, s.seeds.front());
    file.close();
    if (!file) {
        throw IoError("write failed on '" + path + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Queue-manager and DRAM scheduling simulator"};
    app.require_subcommand(1);

    CommonOptions t1, t5, co, ru;
    std::string scenario_file;

    auto* table1 = app.add_subcommand("table1", "DRAM throughput loss sweep");
    add_common(table1, t1);
    auto* table5 = app.add_subcommand("table5", "Pipeline delay breakdown across offered loads");
    add_common(table5, t5);
    auto* cost = app.add_subcommand("cost", "Software cost model report");
    add_common(cost, co);
    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario_file, "key=value scenario file")->required();
    add_common(run, ru);
    run->add_option("--dump-queues", ru.dump_queues, "Write the final queue state of the first seed to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        npqsim::Scenario s;
        const CommonOptions* opts = nullptr;
        if (table1->parsed()) {
            s.experiment = npqsim::Experiment::Table1Sweep;
            opts = &t1;
        } else if (table5->parsed()) {
            s.experiment = npqsim::Experiment::Table5Sweep;
            opts = &t5;
        } else if (cost->parsed()) {
            s.experiment = npqsim::Experiment::CostReport;
            opts = &co;
        } else {
            s = load_file(scenario_file);
            opts = &ru;
        }
        apply_common(s, *opts);
        s.validate();
        emit(s);
        if (!opts->dump_queues.empty()) {
            emit_dump(s, opts->dump_queues);
        }
    } catch (const npqsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kSimulationError;
    }
    return kOk;
}
