#include "npqsim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace npqsim {

void PipelineConfig::validate() const {
    if (!(core_clock_mhz > 0) || !std::isfinite(core_clock_mhz)) {
        throw std::invalid_argument("pipeline.core_clock_mhz must be positive");
    }
    if (ports == 0) {
        throw std::invalid_argument("pipeline.ports must be positive");
    }
    if (fifo_depth == 0) {
        throw std::invalid_argument("pipeline.fifo_depth must be positive");
    }
    if (port_priorities.size() != ports) {
        throw std::invalid_argument("pipeline.port_priorities needs one entry per port");
    }
    if (fifo_floor_cycles < 0 || data_path_cycles < 0) {
        throw std::invalid_argument("pipeline latencies must be non-negative");
    }
    dram.validate();
}

std::int64_t PipelineConfig::core_period_ps() const {
    return static_cast<std::int64_t>(std::llround(1.0e6 / core_clock_mhz));
}

Pipeline::Pipeline(PipelineConfig config)
    : config_(std::move(config)),
      period_ps_((config_.validate(), config_.core_period_ps())),
      qm_(config_.qmgr),
      dmc_(config_.dram_policy, config_.dram),
      fifos_(config_.ports) {}

Tick Pipeline::to_dram_tick_ceil(std::int64_t cycle) const {
    const std::int64_t ps = cycle * period_ps_;
    const std::int64_t tick_ps = static_cast<std::int64_t>(config_.dram.clock_ns) * 1000;
    return (ps + tick_ps - 1) / tick_ps;
}

std::int64_t Pipeline::ns_to_cycle_ceil(std::int64_t ns) const {
    const std::int64_t ps = ns * 1000;
    return (ps + period_ps_ - 1) / period_ps_;
}

SubmitResult Pipeline::submit(Command cmd) {
    ++submitted_;
    RejectReason reason = RejectReason::None;
    if (cmd.port >= config_.ports) {
        reason = RejectReason::BadPort;
    } else if (needs_payload(cmd.kind) && !cmd.payload) {
        reason = RejectReason::MissingPayload;
    } else if (fifos_[cmd.port].size() >= config_.fifo_depth) {
        reason = RejectReason::FifoFull;
    }
    if (reason != RejectReason::None) {
        ++rejected_;
        return SubmitResult{false, reason};
    }
    cmd.arrival_cycle = now_;
    if (!first_arrival_) {
        first_arrival_ = now_;
    }
    fifos_[cmd.port].push_back(std::move(cmd));
    return SubmitResult{true, RejectReason::None};
}

std::optional<unsigned> Pipeline::pick_port() {
    const std::int64_t visible_before = now_ - config_.fifo_floor_cycles;
    int best = std::numeric_limits<int>::max();
    for (unsigned p = 0; p < config_.ports; ++p) {
        if (!fifos_[p].empty() && fifos_[p].front().arrival_cycle <= visible_before) {
            best = std::min(best, config_.port_priorities[p]);
        }
    }
    if (best == std::numeric_limits<int>::max()) {
        return std::nullopt;
    }
    for (unsigned k = 0; k < config_.ports; ++k) {
        const unsigned p = (rr_ + k) % config_.ports;
        if (!fifos_[p].empty() && fifos_[p].front().arrival_cycle <= visible_before &&
            config_.port_priorities[p] == best) {
            rr_ = (p + 1) % config_.ports;
            return p;
        }
    }
    return std::nullopt;
}

void Pipeline::grant(unsigned port) {
    InFlight f;
    f.rec.cmd = std::move(fifos_[port].front());
    fifos_[port].pop_front();
    f.rec.grant = now_;
    f.rec.exec_done = now_ + config_.latencies.at(f.rec.cmd.kind);

    // The first pointer-memory access yields the data address: the free-list
    // head for allocating kinds, the flow head otherwise.
    const Command& cmd = f.rec.cmd;
    std::optional<SegmentIndex> target;
    if (const auto access = data_access(cmd.kind); access && cmd.flow < qm_.flow_count()) {
        const bool flow_empty = qm_.flow(cmd.flow).empty();
        switch (cmd.kind) {
            case CommandKind::Enqueue:
                if (qm_.free_count() > 0) target = qm_.free_list().head;
                break;
            case CommandKind::AppendHead:
            case CommandKind::AppendTail:
                if (qm_.free_count() > 0 && !flow_empty) target = qm_.free_list().head;
                break;
            default:
                if (!flow_empty) target = qm_.flow(cmd.flow).head;
                break;
        }
        if (target) {
            const AccessKind kind = *access;
            const unsigned dport = (kind == AccessKind::Read ? 0u : 2u) + cmd.port % 2;
            const unsigned bank = target->value() % config_.dram.banks;
            f.has_data = true;
            f.tag = next_tag_++;
            dmc_.submit(dport, PendingAccess{AccessRequest{bank, kind, dport}, f.tag,
                                             to_dram_tick_ceil(now_ + 1)});
        }
    }
    engine_ = std::move(f);
}

void Pipeline::advance_memory() {
    const std::int64_t tick_ps = static_cast<std::int64_t>(config_.dram.clock_ns) * 1000;
    const Tick until = now_ * period_ps_ / tick_ps;
    dmc_.advance(until, [this](const IssuedAccess& a) {
        data_done_[a.tag] = ns_to_cycle_ceil(a.result.completion_ns) + config_.data_path_cycles;
    });
}

void Pipeline::retire(const InFlight& f, std::int64_t complete) {
    CompletedCommand rec = f.rec;
    rec.complete = complete;
    ++completed_;
    if (rec.error) {
        ++failed_;
    }
    sum_fifo_ += rec.fifo_delay();
    sum_exec_ += rec.exec_delay();
    sum_data_ += rec.data_delay();
    last_complete_ = std::max(last_complete_, complete);
    if (config_.keep_log) {
        log_.push_back(std::move(rec));
    }
}

bool Pipeline::try_retire(const InFlight& f) {
    std::int64_t complete = f.rec.exec_done;
    if (f.has_data) {
        const auto it = data_done_.find(f.tag);
        if (it == data_done_.end() || it->second > now_) {
            return false;
        }
        complete = std::max(complete, it->second);
        data_done_.erase(it);
    }
    retire(f, complete);
    return true;
}

void Pipeline::finish_execution() {
    InFlight f = std::move(*engine_);
    engine_.reset();
    try {
        apply(qm_, f.rec.cmd);
    } catch (const QmgrError& e) {
        f.rec.error = e.code();
    }
    if (!try_retire(f)) {
        awaiting_.push_back(std::move(f));
    }
}

void Pipeline::step() {
    advance_memory();
    if (engine_ && engine_->rec.exec_done == now_) {
        finish_execution();
    }
    std::erase_if(awaiting_, [this](const InFlight& f) { return try_retire(f); });
    if (!engine_) {
        if (const auto port = pick_port()) {
            grant(*port);
        }
    }
    ++now_;
}

void Pipeline::run_until(std::int64_t cycle) {
    while (now_ < cycle) {
        step();
    }
}

bool Pipeline::idle() const { return !engine_ && awaiting_.empty() && in_fifo() == 0; }

void Pipeline::drain() {
    while (!idle()) {
        step();
    }
}

std::size_t Pipeline::in_fifo() const {
    std::size_t n = 0;
    for (const auto& f : fifos_) {
        n += f.size();
    }
    return n;
}

PipelineStats Pipeline::stats() const {
    if (completed_ == 0) {
        throw PipelineError("NoData: no completed commands");
    }
    PipelineStats s;
    const double n = static_cast<double>(completed_);
    s.delays.fifo_delay = static_cast<double>(sum_fifo_) / n;
    s.delays.exec_delay = static_cast<double>(sum_exec_) / n;
    s.delays.data_delay = static_cast<double>(sum_data_) / n;
    s.delays.total = static_cast<double>(sum_fifo_ + sum_exec_ + sum_data_) / n;
    s.submitted = submitted_;
    s.rejected = rejected_;
    s.completed = completed_;
    s.failed = failed_;
    s.elapsed_cycles = last_complete_ - first_arrival_.value_or(0);
    const double seconds = static_cast<double>(s.elapsed_cycles) * static_cast<double>(period_ps_) * 1e-12;
    if (seconds > 0) {
        const double ops = static_cast<double>(completed_ - failed_);
        s.mops = ops / seconds / 1e6;
        s.gbps = ops * static_cast<double>(kSegmentBytes * 8) / seconds / 1e9;
    }
    return s;
}

PipelineStats run_stream(Pipeline& pipeline, std::span<const Command> stream) {
    for (const Command& cmd : stream) {
        if (cmd.arrival_cycle < pipeline.now()) {
            throw PipelineError("command stream not ordered by arrival");
        }
        pipeline.run_until(cmd.arrival_cycle);
        pipeline.submit(cmd);
    }
    pipeline.drain();
    return pipeline.stats();
}

}  // namespace npqsim
