#include "npqsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

namespace npqsim {

const char* to_string(Experiment e) {
    switch (e) {
        case Experiment::Table1Sweep: return "table1";
        case Experiment::Table5Sweep: return "table5";
        case Experiment::CostReport: return "cost";
        case Experiment::Custom: return "custom";
    }
    return "unknown";
}

ConfigError::ConfigError(std::string source, std::size_t line, std::string key, const std::string& message)
    : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) +
                         (key.empty() ? std::string() : ": " + key) + ": " + message),
      source_(std::move(source)),
      line_(line),
      key_(std::move(key)) {}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

PipelineConfig Scenario::effective_pipeline() const {
    PipelineConfig p = pipeline;
    p.dram = dram;
    return p;
}

WorkloadSpec Scenario::effective_workload(std::uint64_t seed, double offered_gbps) const {
    WorkloadSpec w = workload;
    w.seed = seed;
    w.offered_gbps = offered_gbps;
    w.ports = pipeline.ports;
    w.core_clock_mhz = pipeline.core_clock_mhz;
    return w;
}

namespace {

struct BadValue {
    std::string message;
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view v) {
    T out{};
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || v.empty()) {
        throw BadValue{"expected a number, got '" + std::string(v) + "'"};
    }
    return out;
}

std::uint64_t parse_u64(std::string_view v) { return parse_number<std::uint64_t>(v); }
std::int64_t parse_i64(std::string_view v) { return parse_number<std::int64_t>(v); }
unsigned parse_unsigned(std::string_view v) { return parse_number<unsigned>(v); }
double parse_double(std::string_view v) { return parse_number<double>(v); }

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw BadValue{"expected on/off, got '" + std::string(v) + "'"};
}

Policy parse_policy(std::string_view v) {
    if (v == "naive") return Policy::Naive;
    if (v == "optimized") return Policy::Optimized;
    throw BadValue{"expected naive or optimized, got '" + std::string(v) + "'"};
}

cost::CopyMode parse_copy_mode(std::string_view v) {
    if (v == "word") return cost::CopyMode::WordTransactions;
    if (v == "line") return cost::CopyMode::LineTransactions;
    if (v == "dma") return cost::CopyMode::Dma;
    throw BadValue{"expected word, line or dma, got '" + std::string(v) + "'"};
}

template <typename F>
auto parse_list(std::string_view v, F&& parse_one) {
    std::vector<decltype(parse_one(v))> out;
    if (trim(v).empty()) {
        throw BadValue{"empty list"};
    }
    for (auto item : split(v, ',')) {
        out.push_back(parse_one(item));
    }
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += fmt(xs[i]);
    }
    return out;
}

using Setter = std::function<void(Scenario&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        t["experiment"] = [](Scenario& s, std::string_view v) {
            if (v == "table1") s.experiment = Experiment::Table1Sweep;
            else if (v == "table5") s.experiment = Experiment::Table5Sweep;
            else if (v == "cost") s.experiment = Experiment::CostReport;
            else if (v == "custom") s.experiment = Experiment::Custom;
            else throw BadValue{"expected table1, table5, cost or custom"};
        };
        t["seeds"] = [](Scenario& s, std::string_view v) { s.seeds = parse_list(v, parse_u64); };
        t["output"] = [](Scenario& s, std::string_view v) { s.output_path = std::string(v); };

        t["dram.banks"] = [](Scenario& s, std::string_view v) { s.dram.banks = parse_unsigned(v); };
        t["dram.interleave_penalty"] = [](Scenario& s, std::string_view v) { s.dram.interleave_penalty = parse_bool(v); };
        t["dram.turnaround_clocks"] = [](Scenario& s, std::string_view v) { s.dram.turnaround_clocks = parse_unsigned(v); };
        t["dram.clock_ns"] = [](Scenario& s, std::string_view v) { s.dram.clock_ns = parse_unsigned(v); };
        t["dram.access_clocks"] = [](Scenario& s, std::string_view v) { s.dram.access_clocks = parse_unsigned(v); };
        t["dram.bank_busy_clocks"] = [](Scenario& s, std::string_view v) { s.dram.bank_busy_clocks = parse_unsigned(v); };
        t["dram.read_latency_ns"] = [](Scenario& s, std::string_view v) { s.dram.read_latency_ns = parse_unsigned(v); };
        t["dram.write_latency_ns"] = [](Scenario& s, std::string_view v) { s.dram.write_latency_ns = parse_unsigned(v); };

        t["table1.banks"] = [](Scenario& s, std::string_view v) { s.table1.banks = parse_list(v, parse_unsigned); };
        t["table1.policies"] = [](Scenario& s, std::string_view v) { s.table1.policies = parse_list(v, parse_policy); };
        t["table1.penalty"] = [](Scenario& s, std::string_view v) { s.table1.penalties = parse_list(v, parse_bool); };
        t["table1.horizon"] = [](Scenario& s, std::string_view v) { s.table1.horizon = parse_i64(v); };
        t["table1.pattern"] = [](Scenario& s, std::string_view v) {
            if (v == "uniform") s.table1.pattern = BankPattern::UniformRandom;
            else if (v == "sequential") s.table1.pattern = BankPattern::Sequential;
            else throw BadValue{"expected uniform or sequential"};
        };

        t["table5.loads"] = [](Scenario& s, std::string_view v) { s.table5.loads = parse_list(v, parse_double); };

        t["pipeline.core_clock_mhz"] = [](Scenario& s, std::string_view v) { s.pipeline.core_clock_mhz = parse_double(v); };
        t["pipeline.ports"] = [](Scenario& s, std::string_view v) { s.pipeline.ports = parse_unsigned(v); };
        t["pipeline.fifo_depth"] = [](Scenario& s, std::string_view v) { s.pipeline.fifo_depth = parse_u64(v); };
        t["pipeline.port_priorities"] = [](Scenario& s, std::string_view v) {
            s.pipeline.port_priorities = parse_list(v, [](std::string_view x) { return parse_number<int>(x); });
        };
        t["pipeline.fifo_floor_cycles"] = [](Scenario& s, std::string_view v) { s.pipeline.fifo_floor_cycles = parse_i64(v); };
        t["pipeline.data_path_cycles"] = [](Scenario& s, std::string_view v) { s.pipeline.data_path_cycles = parse_i64(v); };
        t["pipeline.dram_policy"] = [](Scenario& s, std::string_view v) { s.pipeline.dram_policy = parse_policy(v); };
        t["pipeline.segments"] = [](Scenario& s, std::string_view v) { s.pipeline.qmgr.segments = parse_u64(v); };
        t["pipeline.flows"] = [](Scenario& s, std::string_view v) { s.pipeline.qmgr.flows = parse_u64(v); };
        for (CommandKind k : kAllCommandKinds) {
            t[std::string("pipeline.latency.") + to_string(k)] = [k](Scenario& s, std::string_view v) {
                const unsigned c = parse_unsigned(v);
                if (c == 0) throw BadValue{"latency must be positive"};
                s.pipeline.latencies.set(k, c);
            };
        }

        t["workload.mix"] = [](Scenario& s, std::string_view v) {
            s.workload.mix = parse_list(v, [](std::string_view item) {
                const auto parts = split(item, ':');
                if (parts.size() != 2) throw BadValue{"mix entries look like Kind:weight"};
                const auto kind = parse_command_kind(parts[0]);
                if (!kind) throw BadValue{"unknown command kind '" + std::string(parts[0]) + "'"};
                return std::pair{*kind, parse_double(parts[1])};
            });
        };
        t["workload.offered_gbps"] = [](Scenario& s, std::string_view v) { s.workload.offered_gbps = parse_double(v); };
        t["workload.flows"] = [](Scenario& s, std::string_view v) { s.workload.flows = parse_unsigned(v); };
        t["workload.duration_cycles"] = [](Scenario& s, std::string_view v) { s.workload.duration_cycles = parse_i64(v); };

        t["cost.modes"] = [](Scenario& s, std::string_view v) { s.cost.modes = parse_list(v, parse_copy_mode); };
        t["cost.clocks_mhz"] = [](Scenario& s, std::string_view v) { s.cost.clocks_mhz = parse_list(v, parse_i64); };
        return t;
    }();
    return table;
}

}  // namespace

void apply_setting(Scenario& s, std::string_view key, std::string_view value, std::string_view source,
                   std::size_t line) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw ConfigError(std::string(source), line, std::string(key), "unknown key");
    }
    try {
        it->second(s, trim(value));
    } catch (const BadValue& e) {
        throw ConfigError(std::string(source), line, std::string(key), e.message);
    }
}

void apply_override(Scenario& s, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("--set", 0, std::string(assignment), "expected key=value");
    }
    apply_setting(s, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

Scenario parse_scenario(std::istream& in, std::string_view source, Scenario base) {
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(source), n, "", "expected key=value");
        }
        apply_setting(base, trim(t.substr(0, eq)), t.substr(eq + 1), source, n);
    }
    return base;
}

void Scenario::validate() const {
    auto check = [](auto&& fn, const char* key) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("scenario", 0, key, e.what());
        } catch (const TrafficError& e) {
            throw ConfigError("scenario", 0, key, e.what());
        }
    };
    check([&] { dram.validate(); }, "dram");
    check([&] { effective_pipeline().validate(); }, "pipeline");
    if (seeds.empty()) {
        throw ConfigError("scenario", 0, "seeds", "at least one seed required");
    }
    if (table1.horizon <= 0) {
        throw ConfigError("scenario", 0, "table1.horizon", "must be positive");
    }
    if (std::any_of(table1.banks.begin(), table1.banks.end(), [](unsigned b) { return b == 0; })) {
        throw ConfigError("scenario", 0, "table1.banks", "bank counts must be positive");
    }
    if (workload.flows > pipeline.qmgr.flows) {
        throw ConfigError("scenario", 0, "workload.flows", "exceeds pipeline.flows");
    }
    if (std::any_of(cost.clocks_mhz.begin(), cost.clocks_mhz.end(), [](std::int64_t c) { return c <= 0; })) {
        throw ConfigError("scenario", 0, "cost.clocks_mhz", "clocks must be positive");
    }
    for (double load : table5.loads) {
        check([&] { effective_workload(seeds.front(), load).validate(); }, "table5.loads");
    }
    check([&] { effective_workload(seeds.front(), workload.offered_gbps).validate(); }, "workload");
}

std::vector<std::pair<std::string, std::string>> describe(const Scenario& s) {
    auto u = [](auto x) { return std::to_string(x); };
    auto onoff = [](bool b) { return std::string(b ? "on" : "off"); };
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("experiment", to_string(s.experiment));
    out.emplace_back("seeds", join(s.seeds, u));
    out.emplace_back("dram.banks", u(s.dram.banks));
    out.emplace_back("dram.interleave_penalty", onoff(s.dram.interleave_penalty));
    out.emplace_back("dram.turnaround_clocks", u(s.dram.turnaround_clocks));
    out.emplace_back("dram.clock_ns", u(s.dram.clock_ns));
    out.emplace_back("dram.access_clocks", u(s.dram.access_clocks));
    out.emplace_back("dram.bank_busy_clocks", u(s.dram.bank_busy_clocks));
    out.emplace_back("dram.read_latency_ns", u(s.dram.read_latency_ns));
    out.emplace_back("dram.write_latency_ns", u(s.dram.write_latency_ns));
    out.emplace_back("table1.banks", join(s.table1.banks, u));
    out.emplace_back("table1.policies", join(s.table1.policies, [](Policy p) { return std::string(to_string(p)); }));
    out.emplace_back("table1.penalty", join(s.table1.penalties, onoff));
    out.emplace_back("table1.horizon", u(s.table1.horizon));
    out.emplace_back("table1.pattern", s.table1.pattern == BankPattern::UniformRandom ? "uniform" : "sequential");
    out.emplace_back("table5.loads", join(s.table5.loads, format_double));
    out.emplace_back("pipeline.core_clock_mhz", format_double(s.pipeline.core_clock_mhz));
    out.emplace_back("pipeline.ports", u(s.pipeline.ports));
    out.emplace_back("pipeline.fifo_depth", u(s.pipeline.fifo_depth));
    out.emplace_back("pipeline.port_priorities", join(s.pipeline.port_priorities, u));
    out.emplace_back("pipeline.fifo_floor_cycles", u(s.pipeline.fifo_floor_cycles));
    out.emplace_back("pipeline.data_path_cycles", u(s.pipeline.data_path_cycles));
    out.emplace_back("pipeline.dram_policy", to_string(s.pipeline.dram_policy));
    out.emplace_back("pipeline.segments", u(s.pipeline.qmgr.segments));
    out.emplace_back("pipeline.flows", u(s.pipeline.qmgr.flows));
    for (CommandKind k : kAllCommandKinds) {
        out.emplace_back(std::string("pipeline.latency.") + to_string(k), u(s.pipeline.latencies.at(k)));
    }
    out.emplace_back("workload.mix", join(s.workload.mix, [](const std::pair<CommandKind, double>& m) {
                         return std::string(to_string(m.first)) + ":" + format_double(m.second);
                     }));
    out.emplace_back("workload.offered_gbps", format_double(s.workload.offered_gbps));
    out.emplace_back("workload.flows", u(s.workload.flows));
    out.emplace_back("workload.duration_cycles", u(s.workload.duration_cycles));
    out.emplace_back("cost.modes", join(s.cost.modes, [](cost::CopyMode m) { return std::string(cost::to_string(m)); }));
    out.emplace_back("cost.clocks_mhz", join(s.cost.clocks_mhz, u));
    return out;
}

}  // namespace npqsim
