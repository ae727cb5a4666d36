#include "npqsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

namespace npqsim {

unsigned worker_threads() {
    if (const char* env = std::getenv("NPQSIM_THREADS")) {
        unsigned n = 0;
        const std::string_view v(env);
        const auto r = std::from_chars(v.data(), v.data() + v.size(), n);
        if (r.ec == std::errc{} && r.ptr == v.data() + v.size() && n > 0) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

/// Calls fn(i) for i in [0, n) on up to `threads` workers; rethrows the
/// first failure.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::string fixed(double v, int precision) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    return std::string(buf, r.ptr);
}

std::vector<Table5Row> average_loads(const Scenario& s, const std::vector<double>& loads, unsigned threads) {
    const std::size_t per_load = s.seeds.size();
    std::vector<Table5Row> runs(loads.size() * per_load);
    parallel_for(runs.size(), threads, [&](std::size_t i) {
        runs[i] = run_load_point(s, loads[i / per_load], s.seeds[i % per_load]);
    });
    std::vector<Table5Row> out;
    for (std::size_t l = 0; l < loads.size(); ++l) {
        Table5Row m;
        m.offered_gbps = loads[l];
        for (std::size_t k = 0; k < per_load; ++k) {
            const Table5Row& r = runs[l * per_load + k];
            m.delays.fifo_delay += r.delays.fifo_delay;
            m.delays.exec_delay += r.delays.exec_delay;
            m.delays.data_delay += r.delays.data_delay;
            m.delays.total += r.delays.total;
            m.mops += r.mops;
            m.gbps_served += r.gbps_served;
        }
        const double n = static_cast<double>(per_load);
        m.delays.fifo_delay /= n;
        m.delays.exec_delay /= n;
        m.delays.data_delay /= n;
        m.delays.total /= n;
        m.mops /= n;
        m.gbps_served /= n;
        out.push_back(m);
    }
    return out;
}

}  // namespace

std::vector<Table1Row> run_table1(const Scenario& s, unsigned threads) {
    struct Point {
        unsigned banks;
        Policy policy;
        bool penalty;
    };
    std::vector<Point> points;
    for (unsigned b : s.table1.banks) {
        for (Policy p : s.table1.policies) {
            for (bool pen : s.table1.penalties) {
                points.push_back({b, p, pen});
            }
        }
    }
    const std::size_t per_point = s.seeds.size();
    std::vector<double> losses(points.size() * per_point);
    parallel_for(losses.size(), threads, [&](std::size_t i) {
        const Point& pt = points[i / per_point];
        DramConfig cfg = s.dram;
        cfg.banks = pt.banks;
        cfg.interleave_penalty = pt.penalty;
        losses[i] = measure_throughput_loss(pt.policy, cfg, BacklogWorkload{s.table1.pattern}, s.table1.horizon,
                                            s.seeds[i % per_point]);
    });

    std::vector<Table1Row> rows;
    rows.reserve(points.size() * (per_point + 1));
    for (std::size_t p = 0; p < points.size(); ++p) {
        double sum = 0;
        for (std::size_t k = 0; k < per_point; ++k) {
            const double loss = losses[p * per_point + k];
            sum += loss;
            rows.push_back({points[p].banks, points[p].policy, points[p].penalty, loss, s.seeds[k], s.table1.horizon});
        }
        rows.push_back({points[p].banks, points[p].policy, points[p].penalty, sum / static_cast<double>(per_point),
                        std::nullopt, s.table1.horizon});
    }
    return rows;
}

Table5Row run_load_point(const Scenario& s, double offered_gbps, std::uint64_t seed) {
    const std::vector<Command> stream = generate(s.effective_workload(seed, offered_gbps));
    Pipeline pipeline(s.effective_pipeline());
    const PipelineStats st = run_stream(pipeline, stream);
    return Table5Row{offered_gbps, st.delays, st.mops, st.gbps};
}

void dump_final_queues(std::ostream& out, const Scenario& s, double offered_gbps, std::uint64_t seed) {
    const std::vector<Command> stream = generate(s.effective_workload(seed, offered_gbps));
    Pipeline pipeline(s.effective_pipeline());
    run_stream(pipeline, stream);
    pipeline.queues().dump(out);
}

std::vector<Table5Row> run_table5(const Scenario& s, unsigned threads) {
    return average_loads(s, s.table5.loads, threads);
}

std::vector<Table5Row> run_custom(const Scenario& s, unsigned threads) {
    return average_loads(s, {s.workload.offered_gbps}, threads);
}

void write_header(std::ostream& out, const Scenario& s) {
    out << "# npqsim " << to_string(s.experiment) << '\n';
    for (const auto& [k, v] : describe(s)) {
        out << "# " << k << '=' << v << '\n';
    }
}

void write_table1_csv(std::ostream& out, const Scenario& s, const std::vector<Table1Row>& rows) {
    write_header(out, s);
    out << "banks,policy,penalty,loss,seed,horizon\n";
    for (const Table1Row& r : rows) {
        out << r.banks << ',' << to_string(r.policy) << ',' << (r.penalty ? "on" : "off") << ',' << fixed(r.loss, 6)
            << ',' << (r.seed ? std::to_string(*r.seed) : std::string("mean")) << ',' << r.horizon << '\n';
    }
}

void write_table5_csv(std::ostream& out, const Scenario& s, const std::vector<Table5Row>& rows) {
    write_header(out, s);
    out << "offered_gbps,fifo_delay,exec_delay,data_delay,total_delay,mops,gbps_served\n";
    for (const Table5Row& r : rows) {
        out << format_double(r.offered_gbps) << ',' << fixed(r.delays.fifo_delay, 4) << ','
            << fixed(r.delays.exec_delay, 4) << ',' << fixed(r.delays.data_delay, 4) << ','
            << fixed(r.delays.total, 4) << ',' << fixed(r.mops, 4) << ',' << fixed(r.gbps_served, 4) << '\n';
    }
}

void write_cost_report(std::ostream& out, const Scenario& s) {
    write_header(out, s);
    out << "mode,enqueue_first,enqueue_rest,dequeue";
    for (std::int64_t mhz : s.cost.clocks_mhz) {
        out << ",dequeue_mbps_" << mhz << "mhz";
    }
    out << '\n';
    for (const cost::CostRow& r : cost::cost_report(s.cost.modes, s.cost.clocks_mhz)) {
        out << cost::to_string(r.mode) << ',' << r.enqueue_first << ',' << r.enqueue_rest << ',' << r.dequeue;
        for (double mbps : r.dequeue_mbps) {
            out << ',' << fixed(mbps, 3);
        }
        out << '\n';
    }
    out << "# IXP1200 measured service rates (packets/s)\n";
    out << "# queues,one_engine_pps,six_engines_pps\n";
    for (const auto& m : cost::kIxp1200Rates) {
        out << "# " << m.queues << ',' << m.one_engine_pps << ',' << m.six_engines_pps << '\n';
    }
}

void run_experiment(std::ostream& out, const Scenario& s, unsigned threads) {
    s.validate();
    switch (s.experiment) {
        case Experiment::Table1Sweep:
            write_table1_csv(out, s, run_table1(s, threads));
            break;
        case Experiment::Table5Sweep:
            write_table5_csv(out, s, run_table5(s, threads));
            break;
        case Experiment::Custom:
            write_table5_csv(out, s, run_custom(s, threads));
            break;
        case Experiment::CostReport:
            write_cost_report(out, s);
            break;
    }
}

}  // namespace npqsim
