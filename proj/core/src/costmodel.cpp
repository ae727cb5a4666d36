#include "npqsim/costmodel.hpp"

#include <boost/rational.hpp>
#include <stdexcept>

namespace npqsim::cost {

const char* to_string(CopyMode mode) {
    switch (mode) {
        case CopyMode::WordTransactions: return "word";
        case CopyMode::LineTransactions: return "line";
        case CopyMode::Dma: return "dma";
    }
    return "unknown";
}

unsigned copy_cycles(CopyMode mode, const CycleTable& table) {
    switch (mode) {
        case CopyMode::WordTransactions:
            return table.copy_segment;
        case CopyMode::LineTransactions:
            return (kLineReadCycles + kBusLatency) + (kLineWriteCycles + kBusLatency);
        case CopyMode::Dma:
            return kDmaInitCycles + kDmaCopyCycles;
    }
    throw std::invalid_argument("unknown copy mode");
}

unsigned packet_op_cycles(PacketOp op, bool first_segment, CopyMode mode, const CycleTable& table) {
    const unsigned copy = copy_cycles(mode, table);
    if (op == PacketOp::Enqueue) {
        const unsigned link = first_segment ? table.enqueue_segment_first : table.enqueue_segment_rest;
        return table.dequeue_free_list_enq + link + copy;
    }
    return table.dequeue_free_list_deq + table.enqueue_segment_deq + copy;
}

namespace {
void require_positive(std::int64_t v, const char* name) {
    if (v <= 0) {
        throw std::invalid_argument(std::string(name) + " must be positive");
    }
}
}  // namespace

Rational sustained_throughput(std::int64_t cycles_per_packet, std::int64_t clock_hz, std::int64_t packet_bits) {
    require_positive(cycles_per_packet, "cycles_per_packet");
    require_positive(clock_hz, "clock_hz");
    require_positive(packet_bits, "packet_bits");
    return Rational(clock_hz, cycles_per_packet) * packet_bits;
}

Rational cycle_budget(std::int64_t line_rate_bps, std::int64_t clock_hz, Duplex duplex, std::int64_t packet_bits) {
    require_positive(line_rate_bps, "line_rate_bps");
    require_positive(clock_hz, "clock_hz");
    require_positive(packet_bits, "packet_bits");
    Rational half = Rational(clock_hz, line_rate_bps) * packet_bits;
    return duplex == Duplex::Half ? half : half / 2;
}

Rational packet_service_ns(std::int64_t line_rate_bps, std::int64_t packet_bits) {
    require_positive(line_rate_bps, "line_rate_bps");
    require_positive(packet_bits, "packet_bits");
    return Rational(packet_bits, line_rate_bps) * 1'000'000'000;
}

std::vector<CostRow> cost_report(const std::vector<CopyMode>& modes, const std::vector<std::int64_t>& clocks_mhz) {
    std::vector<CostRow> rows;
    for (CopyMode m : modes) {
        CostRow r{m, packet_op_cycles(PacketOp::Enqueue, true, m), packet_op_cycles(PacketOp::Enqueue, false, m),
                  packet_op_cycles(PacketOp::Dequeue, false, m), {}};
        for (std::int64_t mhz : clocks_mhz) {
            const Rational bps = sustained_throughput(r.dequeue, mhz * 1'000'000, 512);
            r.dequeue_mbps.push_back(boost::rational_cast<double>(bps) / 1e6);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace npqsim::cost
