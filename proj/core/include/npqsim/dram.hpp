#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace npqsim {

/// DRAM time in device clock ticks (10 ns at the default 100 MHz clock).
using Tick = std::int64_t;

enum class AccessKind { Read, Write };

const char* to_string(AccessKind kind);

/**
 * Block-level DDR-SDRAM timing. One request moves one 64-byte block and
 * holds the shared data bus for one access cycle; its bank stays busy for
 * bank_busy_clocks from the start of the access.
 *
 * With interleave_penalty set, a write that follows a read may not start
 * earlier than turnaround_clocks after the read released the bus. The
 * default turnaround is the gap between read and write access latency
 * (60 ns - 40 ns); set it to access_clocks for a full access-cycle delay.
 */
struct DramConfig {
    unsigned banks = 8;
    unsigned clock_ns = 10;
    unsigned access_clocks = 4;
    unsigned bank_busy_clocks = 16;
    unsigned read_latency_ns = 60;
    unsigned write_latency_ns = 40;
    bool interleave_penalty = false;
    unsigned turnaround_clocks = 2;

    unsigned access_cycle_ns() const { return clock_ns * access_clocks; }
    /// One 64-byte block per access cycle.
    double peak_gbps() const { return 64.0 * 8.0 / access_cycle_ns(); }

    /// Throws std::invalid_argument on an unusable configuration.
    void validate() const;
};

struct AccessRequest {
    unsigned bank = 0;
    AccessKind kind = AccessKind::Read;
    unsigned port = 0;
};

struct IssueResult {
    Tick start = 0;          ///< first clock of the bus transfer, penalty included
    Tick penalty_clocks = 0; ///< delay charged by the read-to-write turnaround
    std::int64_t completion_ns = 0;
};

class BankBusyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Per-bank busy windows plus the last bus transfer. Owned by one scheduler.
class DramModel {
public:
    explicit DramModel(DramConfig config = {});

    const DramConfig& config() const { return config_; }

    bool is_busy(unsigned bank, Tick now) const;
    Tick busy_until(unsigned bank) const;

    /// Start clock the request would get if issued at `now`.
    Tick earliest_start(AccessKind kind, Tick now) const;

    /// Issues a request whose bank must be free at `now`; throws BankBusyError
    /// otherwise.
    IssueResult issue(const AccessRequest& req, Tick now);

    std::uint64_t issued() const { return issued_; }
    bool has_previous() const { return has_prev_; }
    AccessKind previous_kind() const { return prev_kind_; }

private:
    void check_bank(unsigned bank) const;

    DramConfig config_;
    std::vector<Tick> busy_until_;
    bool has_prev_ = false;
    AccessKind prev_kind_ = AccessKind::Read;
    Tick prev_start_ = 0;
    std::uint64_t issued_ = 0;
};

}  // namespace npqsim
