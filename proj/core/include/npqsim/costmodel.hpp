#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace npqsim::cost {

using Rational = boost::rational<std::int64_t>;

/// Cycles of each software sub-operation on the reference embedded core
/// (PowerPC at 100 MHz, PLB bus, word transactions).
struct CycleTable {
    unsigned dequeue_free_list_enq = 34;
    unsigned dequeue_free_list_deq = 42;
    unsigned enqueue_segment_first = 46;
    unsigned enqueue_segment_rest = 68;
    unsigned enqueue_segment_deq = 52;
    unsigned copy_segment = 136;
};

enum class CopyMode { WordTransactions, LineTransactions, Dma };
enum class PacketOp { Enqueue, Dequeue };
enum class Duplex { Half, Full };

const char* to_string(CopyMode mode);

/// Line-transaction and DMA constants.
inline constexpr unsigned kLineReadCycles = 9;   // 9 double words from BRAM
inline constexpr unsigned kLineWriteCycles = 9;  // 9 double words to DRAM
inline constexpr unsigned kBusLatency = 3;
inline constexpr unsigned kDmaInitCycles = 16;   // four 4-cycle PLB register writes
inline constexpr unsigned kDmaCopyCycles = 34;

unsigned copy_cycles(CopyMode mode, const CycleTable& table = {});

unsigned packet_op_cycles(PacketOp op, bool first_segment, CopyMode mode, const CycleTable& table = {});

/// clock_hz / cycles_per_packet * packet_bits, exact.
Rational sustained_throughput(std::int64_t cycles_per_packet, std::int64_t clock_hz, std::int64_t packet_bits);

/// Cycles available per packet at line rate; full duplex halves the budget.
Rational cycle_budget(std::int64_t line_rate_bps, std::int64_t clock_hz, Duplex duplex,
                      std::int64_t packet_bits);

/// Time to receive one packet at line rate, in nanoseconds.
Rational packet_service_ns(std::int64_t line_rate_bps, std::int64_t packet_bits);

/// Measured IXP1200 service rates (packets per second), kept for comparison
/// in reports only.
struct IxpMeasurement {
    unsigned queues;
    std::int64_t one_engine_pps;
    std::int64_t six_engines_pps;
};

inline constexpr std::array<IxpMeasurement, 3> kIxp1200Rates = {{
    {16, 956'000, 5'600'000},
    {128, 390'000, 2'300'000},
    {1024, 60'000, 300'000},
}};

struct CostRow {
    CopyMode mode;
    unsigned enqueue_first;
    unsigned enqueue_rest;
    unsigned dequeue;
    /// Projected Mbps for 64-byte packets, one per clock in `clocks_mhz`,
    /// using the dequeue cycle count.
    std::vector<double> dequeue_mbps;
};

std::vector<CostRow> cost_report(const std::vector<CopyMode>& modes, const std::vector<std::int64_t>& clocks_mhz);

}  // namespace npqsim::cost
