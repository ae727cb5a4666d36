#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "npqsim/command.hpp"
#include "npqsim/qmgr.hpp"

namespace npqsim {

struct Packet {
    std::vector<std::uint8_t> bytes;
    FlowId flow = 0;

    bool operator==(const Packet&) const = default;
};

enum class TrafficErrc { EmptyPacket, MissingEop, InteriorShortSegment, EopBeforeEnd, BadSpec };

const char* to_string(TrafficErrc code);

class TrafficError : public std::runtime_error {
public:
    TrafficError(TrafficErrc code, const std::string& what);
    TrafficErrc code() const noexcept { return code_; }

private:
    TrafficErrc code_;
};

/// Splits a packet into 64-byte segments; only the last may be short and
/// only the last carries eop.
std::vector<Segment> segment_packet(const Packet& packet);

/// Inverse of segment_packet.
Packet reassemble(std::span<const Segment> segments, FlowId flow = 0);

/**
 * Synthetic command load for the MMS.
 *
 * Arrivals are Bernoulli per cycle on each of `ports` input slots, with the
 * per-slot probability set so the stream offers `offered_gbps` of 64-byte
 * segment operations. Command kinds follow the mix by smooth weighted round
 * robin, so a 50/50 mix alternates exactly. Each command is routed to port
 * `flow % ports`, which keeps per-flow order through the FIFOs.
 */
struct WorkloadSpec {
    double offered_gbps = 1.6;
    std::vector<std::pair<CommandKind, double>> mix = {{CommandKind::Enqueue, 0.5},
                                                       {CommandKind::Dequeue, 0.5}};
    unsigned flows = 1024;
    unsigned ports = 4;
    std::uint64_t seed = 1;
    std::int64_t duration_cycles = 1'000'000;
    double core_clock_mhz = 125.0;

    /// Throws TrafficError(BadSpec).
    void validate() const;
    double commands_per_cycle() const;
};

/// Deterministic for a given spec. Commands needing a non-empty flow target
/// one chosen uniformly among flows the stream has filled; when none exists
/// an Enqueue is emitted instead.
std::vector<Command> generate(const WorkloadSpec& spec);

/// Offered load of a stream over `duration_cycles`.
double measured_offered_gbps(std::span<const Command> stream, std::int64_t duration_cycles,
                             double core_clock_mhz);

}  // namespace npqsim
