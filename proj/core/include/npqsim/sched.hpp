#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

#include "npqsim/dram.hpp"

namespace npqsim {

/// Ports 0 and 1 carry reads, ports 2 and 3 carry writes.
inline constexpr unsigned kAccessPorts = 4;

constexpr AccessKind port_kind(unsigned port) { return port < 2 ? AccessKind::Read : AccessKind::Write; }

enum class Policy { Naive, Optimized };

const char* to_string(Policy policy);

struct PendingAccess {
    AccessRequest req;
    std::uint64_t tag = 0;
    Tick ready = 0;  ///< earliest clock the request is visible to the scheduler
};

class PortFifos {
public:
    void push(unsigned port, const PendingAccess& access);
    void pop(unsigned port);
    const PendingAccess& head(unsigned port) const { return fifos_[port].front(); }
    bool empty(unsigned port) const { return fifos_[port].empty(); }
    /// Port has a head request visible at `now`.
    bool ready(unsigned port, Tick now) const {
        return !fifos_[port].empty() && fifos_[port].front().ready <= now;
    }
    bool all_empty() const;
    std::size_t size(unsigned port) const { return fifos_[port].size(); }

private:
    std::array<std::deque<PendingAccess>, kAccessPorts> fifos_;
};

/// Banks touched by the last three accesses, most recent first. An entry
/// stops blocking its bank once the bank's busy window has elapsed.
class History {
public:
    static constexpr std::size_t kDepth = 3;

    void push(unsigned bank, Tick start);
    bool blocks(unsigned bank, Tick now, Tick busy_clocks) const;
    std::size_t size() const { return size_; }
    unsigned bank(std::size_t i) const { return entries_[i].bank; }

private:
    struct Entry {
        unsigned bank = 0;
        Tick start = 0;
    };
    std::array<Entry, kDepth> entries_{};
    std::size_t size_ = 0;
};

struct Decision {
    enum class Type { Issue, Stall, NoOp };
    Type type = Type::Stall;
    unsigned port = 0;

    static Decision issue(unsigned port) { return {Type::Issue, port}; }
    bool operator==(const Decision&) const = default;
};

/// Strict round robin: the first port with a visible request starting at
/// `rr` is served; a busy bank stalls the bus without moving `rr`.
Decision naive_next(const PortFifos& fifos, unsigned rr, const DramModel& dram, Tick now);

/// Round robin from `rr` over ports whose head bank is not in the history;
/// NoOp when none is eligible.
Decision optimized_next(const PortFifos& fifos, unsigned rr, const History& history, Tick now,
                        Tick busy_clocks);

struct IssuedAccess {
    unsigned port = 0;
    std::uint64_t tag = 0;
    AccessRequest req;
    IssueResult result;
};

struct SchedulerCounters {
    std::uint64_t issued = 0;
    std::uint64_t stalls = 0;  ///< naive stall or optimized no-op
    Tick penalty_clocks = 0;
};

/**
 * Drives one DramModel from four port FIFOs. Decisions are taken whenever
 * the bus is free and some request is visible; a stall or no-op burns one
 * access cycle. When nothing is visible the bus idles until the next
 * request becomes ready.
 */
class AccessScheduler {
public:
    AccessScheduler(Policy policy, DramConfig config);

    void submit(unsigned port, const PendingAccess& access);

    /// Clock of the next decision, or nullopt when all FIFOs are empty.
    std::optional<Tick> next_decision() const;

    /// Takes the next decision; returns the access if one was issued.
    /// Requires next_decision() to have a value.
    std::optional<IssuedAccess> step();

    template <typename OnIssue>
    void advance(Tick until, OnIssue&& on_issue) {
        for (auto t = next_decision(); t && *t <= until; t = next_decision()) {
            if (auto issued = step()) {
                on_issue(*issued);
            }
        }
    }

    Policy policy() const { return policy_; }
    const DramModel& dram() const { return dram_; }
    const PortFifos& fifos() const { return fifos_; }
    const History& history() const { return history_; }
    unsigned rr() const { return rr_; }
    Tick bus_free() const { return bus_free_; }
    const SchedulerCounters& counters() const { return counters_; }

private:
    Policy policy_;
    DramModel dram_;
    PortFifos fifos_;
    History history_;
    unsigned rr_ = 0;
    Tick bus_free_ = 0;
    SchedulerCounters counters_;
};

enum class BankPattern {
    UniformRandom,  ///< independent uniform bank per request
    Sequential,     ///< each port walks the banks in order, offset by port
};

struct BacklogWorkload {
    BankPattern pattern = BankPattern::UniformRandom;
};

inline constexpr std::int64_t kWarmupAccessCycles = 1000;

/// Saturation experiment: all four FIFOs stay backlogged; loss is
/// 1 - accesses started / horizon over `horizon_cycles` access cycles after
/// a 1000-cycle warm-up.
double measure_throughput_loss(Policy policy, const DramConfig& config, const BacklogWorkload& workload,
                               std::int64_t horizon_cycles, std::uint64_t seed);

}  // namespace npqsim
