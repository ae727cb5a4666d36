#include "npqsim/sched.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace npqsim {

const char* to_string(Policy policy) { return policy == Policy::Naive ? "naive" : "optimized"; }

void PortFifos::push(unsigned port, const PendingAccess& access) {
    if (port >= kAccessPorts) {
        throw std::out_of_range("access port " + std::to_string(port));
    }
    fifos_[port].push_back(access);
}

void PortFifos::pop(unsigned port) { fifos_[port].pop_front(); }

bool PortFifos::all_empty() const {
    return std::all_of(fifos_.begin(), fifos_.end(), [](const auto& f) { return f.empty(); });
}

void History::push(unsigned bank, Tick start) {
    for (std::size_t i = kDepth - 1; i > 0; --i) {
        entries_[i] = entries_[i - 1];
    }
    entries_[0] = Entry{bank, start};
    size_ = std::min(size_ + 1, kDepth);
}

bool History::blocks(unsigned bank, Tick now, Tick busy_clocks) const {
    for (std::size_t i = 0; i < size_; ++i) {
        if (entries_[i].bank == bank && now < entries_[i].start + busy_clocks) {
            return true;
        }
    }
    return false;
}

Decision naive_next(const PortFifos& fifos, unsigned rr, const DramModel& dram, Tick now) {
    for (unsigned k = 0; k < kAccessPorts; ++k) {
        const unsigned port = (rr + k) % kAccessPorts;
        if (!fifos.ready(port, now)) {
            continue;
        }
        if (dram.is_busy(fifos.head(port).req.bank, now)) {
            return Decision{Decision::Type::Stall, port};
        }
        return Decision::issue(port);
    }
    return Decision{Decision::Type::Stall, rr};
}

Decision optimized_next(const PortFifos& fifos, unsigned rr, const History& history, Tick now,
                        Tick busy_clocks) {
    for (unsigned k = 0; k < kAccessPorts; ++k) {
        const unsigned port = (rr + k) % kAccessPorts;
        if (fifos.ready(port, now) && !history.blocks(fifos.head(port).req.bank, now, busy_clocks)) {
            return Decision::issue(port);
        }
    }
    return Decision{Decision::Type::NoOp, rr};
}

AccessScheduler::AccessScheduler(Policy policy, DramConfig config) : policy_(policy), dram_(config) {}

void AccessScheduler::submit(unsigned port, const PendingAccess& access) {
    if (access.req.bank >= dram_.config().banks) {
        throw std::out_of_range("bank " + std::to_string(access.req.bank) + " out of range");
    }
    fifos_.push(port, access);
}

std::optional<Tick> AccessScheduler::next_decision() const {
    std::optional<Tick> earliest;
    for (unsigned p = 0; p < kAccessPorts; ++p) {
        if (!fifos_.empty(p)) {
            const Tick t = fifos_.head(p).ready;
            earliest = earliest ? std::min(*earliest, t) : t;
        }
    }
    if (!earliest) {
        return std::nullopt;
    }
    return std::max(*earliest, bus_free_);
}

std::optional<IssuedAccess> AccessScheduler::step() {
    const auto when = next_decision();
    if (!when) {
        throw std::logic_error("scheduler step with no pending access");
    }
    const Tick now = *when;
    const DramConfig& cfg = dram_.config();
    const Decision d = policy_ == Policy::Naive
                           ? naive_next(fifos_, rr_, dram_, now)
                           : optimized_next(fifos_, rr_, history_, now, cfg.bank_busy_clocks);
    if (d.type != Decision::Type::Issue) {
        bus_free_ = now + cfg.access_clocks;
        ++counters_.stalls;
        return std::nullopt;
    }

    const PendingAccess head = fifos_.head(d.port);
    fifos_.pop(d.port);
    IssuedAccess out{d.port, head.tag, head.req, dram_.issue(head.req, now)};
    history_.push(head.req.bank, out.result.start);
    rr_ = (d.port + 1) % kAccessPorts;
    bus_free_ = out.result.start + cfg.access_clocks;
    ++counters_.issued;
    counters_.penalty_clocks += out.result.penalty_clocks;
    return out;
}

double measure_throughput_loss(Policy policy, const DramConfig& config, const BacklogWorkload& workload,
                               std::int64_t horizon_cycles, std::uint64_t seed) {
    if (horizon_cycles <= 0) {
        throw std::invalid_argument("horizon must be positive");
    }
    AccessScheduler sched(policy, config);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<unsigned> pick_bank(0, config.banks - 1);
    std::array<unsigned, kAccessPorts> next_seq{};
    for (unsigned p = 0; p < kAccessPorts; ++p) {
        next_seq[p] = p % config.banks;
    }

    auto refill = [&](unsigned port) {
        unsigned bank = 0;
        if (workload.pattern == BankPattern::UniformRandom) {
            bank = pick_bank(rng);
        } else {
            bank = next_seq[port];
            next_seq[port] = (next_seq[port] + 1) % config.banks;
        }
        sched.submit(port, PendingAccess{AccessRequest{bank, port_kind(port), port}, 0, 0});
    };
    for (unsigned p = 0; p < kAccessPorts; ++p) {
        refill(p);
    }

    const Tick warm = kWarmupAccessCycles * config.access_clocks;
    const Tick end = warm + horizon_cycles * config.access_clocks;
    std::int64_t counted = 0;
    while (*sched.next_decision() < end) {
        if (auto issued = sched.step()) {
            if (issued->result.start >= warm && issued->result.start < end) {
                ++counted;
            }
            refill(issued->port);
        }
    }
    return 1.0 - static_cast<double>(counted) / static_cast<double>(horizon_cycles);
}

}  // namespace npqsim
