#include "npqsim/dram.hpp"

#include <algorithm>

namespace npqsim {

const char* to_string(AccessKind kind) { return kind == AccessKind::Read ? "read" : "write"; }

void DramConfig::validate() const {
    if (banks == 0) {
        throw std::invalid_argument("dram.banks must be positive");
    }
    if (clock_ns == 0 || access_clocks == 0) {
        throw std::invalid_argument("dram clock and access cycle must be positive");
    }
    if (bank_busy_clocks < access_clocks || bank_busy_clocks % access_clocks != 0) {
        throw std::invalid_argument("dram bank busy window must be a multiple of the access cycle");
    }
}

DramModel::DramModel(DramConfig config) : config_(config), busy_until_(config.banks, 0) {
    config_.validate();
}

void DramModel::check_bank(unsigned bank) const {
    if (bank >= busy_until_.size()) {
        throw std::out_of_range("bank " + std::to_string(bank) + " out of range");
    }
}

bool DramModel::is_busy(unsigned bank, Tick now) const {
    check_bank(bank);
    return now < busy_until_[bank];
}

Tick DramModel::busy_until(unsigned bank) const {
    check_bank(bank);
    return busy_until_[bank];
}

Tick DramModel::earliest_start(AccessKind kind, Tick now) const {
    if (config_.interleave_penalty && has_prev_ && prev_kind_ == AccessKind::Read &&
        kind == AccessKind::Write) {
        return std::max<Tick>(now, prev_start_ + config_.access_clocks + config_.turnaround_clocks);
    }
    return now;
}

IssueResult DramModel::issue(const AccessRequest& req, Tick now) {
    if (is_busy(req.bank, now)) {
        throw BankBusyError("bank " + std::to_string(req.bank) + " busy until " +
                            std::to_string(busy_until_[req.bank]) + ", issue at " + std::to_string(now));
    }
    IssueResult r;
    r.start = earliest_start(req.kind, now);
    r.penalty_clocks = r.start - now;
    const unsigned latency = req.kind == AccessKind::Read ? config_.read_latency_ns : config_.write_latency_ns;
    r.completion_ns = r.start * config_.clock_ns + latency;

    busy_until_[req.bank] = r.start + config_.bank_busy_clocks;
    has_prev_ = true;
    prev_kind_ = req.kind;
    prev_start_ = r.start;
    ++issued_;
    return r;
}

}  // namespace npqsim
