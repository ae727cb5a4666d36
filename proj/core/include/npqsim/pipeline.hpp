#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "npqsim/command.hpp"
#include "npqsim/qmgr.hpp"
#include "npqsim/sched.hpp"

namespace npqsim {

struct PipelineConfig {
    double core_clock_mhz = 125.0;
    unsigned ports = 4;
    std::size_t fifo_depth = 64;
    /// Priority level per command port; lower is served first, equal levels
    /// share round robin.
    std::vector<int> port_priorities = {0, 0, 1, 1};
    /// Fixed input-path latency before a command can reach the engine.
    /// Calibration constant for the low-load FIFO delay.
    std::int64_t fifo_floor_cycles = 20;
    /// Segment transfer between the data memory controller and the port
    /// interface, added after the DRAM access completes. Calibration constant.
    std::int64_t data_path_cycles = 28;
    DramConfig dram = default_dram();
    Policy dram_policy = Policy::Optimized;
    ExecLatencyTable latencies = ExecLatencyTable::defaults();
    QueueManager::Config qmgr{};
    /// Keep per-command records (completion log) for inspection.
    bool keep_log = false;

    static DramConfig default_dram() {
        DramConfig d;
        d.interleave_penalty = true;
        return d;
    }

    /// Throws std::invalid_argument on an unusable configuration.
    void validate() const;
    std::int64_t core_period_ps() const;
};

/// Mean per-command latency components in core cycles.
struct DelayBreakdown {
    double fifo_delay = 0;
    double exec_delay = 0;
    double data_delay = 0;
    double total = 0;
};

struct PipelineStats {
    DelayBreakdown delays;
    std::uint64_t submitted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t completed = 0;
    std::uint64_t failed = 0;  ///< completed with a queue-manager error
    std::int64_t elapsed_cycles = 0;
    double mops = 0;
    double gbps = 0;
};

/// Per-command timing. Times are cycle boundaries: the engine works on the
/// command during [grant, exec_done), the command is finished at `complete`.
struct CompletedCommand {
    Command cmd;
    std::int64_t grant = 0;
    std::int64_t exec_done = 0;
    std::int64_t complete = 0;
    std::optional<QmgrErrc> error;

    std::int64_t fifo_delay() const { return grant - cmd.arrival_cycle; }
    std::int64_t exec_delay() const { return exec_done - grant; }
    std::int64_t data_delay() const { return complete - exec_done; }
    std::int64_t total_delay() const { return complete - cmd.arrival_cycle; }
};

class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RejectReason { None, FifoFull, BadPort, MissingPayload };

struct SubmitResult {
    bool accepted = false;
    RejectReason reason = RejectReason::None;
};

/**
 * Cycle-stepped model of the memory-management system.
 *
 * Commands wait in per-port FIFOs. Whenever the single execution engine is
 * idle, the internal scheduler grants the highest-priority port whose head
 * has cleared the input path. The engine holds the command for its fixed
 * latency and applies the queue-manager operation when it finishes. For
 * data-bearing kinds the DRAM access is handed to the data memory controller
 * one cycle after the grant and overlaps execution; whatever part of it
 * outlasts execution is the command's data delay.
 */
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config = {});

    /// Stamps arrival with the current cycle.
    SubmitResult submit(Command cmd);

    /// Advances one core cycle.
    void step();
    void run_until(std::int64_t cycle);
    /// Steps until every accepted command has completed.
    void drain();
    bool idle() const;

    std::int64_t now() const { return now_; }
    std::size_t fifo_occupancy(unsigned port) const { return fifos_.at(port).size(); }
    std::size_t in_fifo() const;
    std::size_t in_engine() const { return engine_ ? 1 : 0; }
    std::size_t awaiting_data() const { return awaiting_.size(); }

    /// Throws PipelineError("NoData") before the first completion.
    PipelineStats stats() const;
    std::uint64_t submitted() const { return submitted_; }
    std::uint64_t rejected() const { return rejected_; }
    std::uint64_t completed() const { return completed_; }

    const QueueManager& queues() const { return qm_; }
    const PipelineConfig& config() const { return config_; }
    const AccessScheduler& memory() const { return dmc_; }
    /// Completed commands in retirement order; filled when keep_log is set.
    /// Sorting by exec_done gives execution order.
    const std::vector<CompletedCommand>& log() const { return log_; }

private:
    struct InFlight {
        CompletedCommand rec;
        std::uint64_t tag = 0;
        bool has_data = false;
    };

    std::optional<unsigned> pick_port();
    void grant(unsigned port);
    void finish_execution();
    void retire(const InFlight& f, std::int64_t complete);
    bool try_retire(const InFlight& f);
    void advance_memory();
    Tick to_dram_tick_ceil(std::int64_t cycle) const;
    std::int64_t ns_to_cycle_ceil(std::int64_t ns) const;

    PipelineConfig config_;
    std::int64_t period_ps_;
    QueueManager qm_;
    AccessScheduler dmc_;
    std::vector<std::deque<Command>> fifos_;
    std::optional<InFlight> engine_;
    std::deque<InFlight> awaiting_;
    std::unordered_map<std::uint64_t, std::int64_t> data_done_;  ///< by tag, in core cycles
    std::uint64_t next_tag_ = 0;
    unsigned rr_ = 0;
    std::int64_t now_ = 0;

    std::uint64_t submitted_ = 0;
    std::uint64_t rejected_ = 0;
    std::uint64_t completed_ = 0;
    std::uint64_t failed_ = 0;
    std::optional<std::int64_t> first_arrival_;
    std::int64_t last_complete_ = 0;
    std::int64_t sum_fifo_ = 0;
    std::int64_t sum_exec_ = 0;
    std::int64_t sum_data_ = 0;
    std::vector<CompletedCommand> log_;
};

/// Feeds a stream ordered by arrival_cycle into a fresh pipeline, then
/// drains it.
PipelineStats run_stream(Pipeline& pipeline, std::span<const Command> stream);

}  // namespace npqsim
