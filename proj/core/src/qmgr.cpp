#include "npqsim/qmgr.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace npqsim {

std::ostream& operator<<(std::ostream& os, SegmentIndex idx) {
    if (idx.is_nil()) {
        return os << "nil";
    }
    return os << idx.value();
}

const char* to_string(QmgrErrc code) {
    switch (code) {
        case QmgrErrc::PoolExhausted: return "PoolExhausted";
        case QmgrErrc::DoubleFree: return "DoubleFree";
        case QmgrErrc::SegmentInUse: return "SegmentInUse";
        case QmgrErrc::BadSegment: return "BadSegment";
        case QmgrErrc::BadFlow: return "BadFlow";
        case QmgrErrc::BadLength: return "BadLength";
        case QmgrErrc::EmptyFlow: return "EmptyFlow";
        case QmgrErrc::EmptySrc: return "EmptySrc";
        case QmgrErrc::IncompletePacket: return "IncompletePacket";
    }
    return "Unknown";
}

QmgrError::QmgrError(QmgrErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

QueueManager::QueueManager() : QueueManager(Config{}) {}

QueueManager::QueueManager(Config config)
    : control_(config.segments),
      data_(config.segments),
      state_(config.segments, SlotState::Free),
      flows_(config.flows) {
    if (config.segments == 0 || config.segments >= SegmentIndex::kNilValue) {
        throw std::invalid_argument("segment pool size out of range");
    }
    if (config.flows == 0) {
        throw std::invalid_argument("flow count must be positive");
    }
    for (std::size_t i = 0; i + 1 < config.segments; ++i) {
        control_[i].next = SegmentIndex(static_cast<std::uint32_t>(i + 1));
    }
    free_.head = SegmentIndex(0);
    free_.tail = SegmentIndex(static_cast<std::uint32_t>(config.segments - 1));
    free_.count = config.segments;
}

void QueueManager::check_flow(FlowId flow) const {
    if (flow >= flows_.size()) {
        throw QmgrError(QmgrErrc::BadFlow, "flow " + std::to_string(flow) + " out of range");
    }
}

void QueueManager::check_length(std::size_t len) {
    if (len < 1 || len > kSegmentBytes) {
        throw QmgrError(QmgrErrc::BadLength, "segment length " + std::to_string(len));
    }
}

const FlowQueue& QueueManager::nonempty_flow(FlowId flow) const {
    check_flow(flow);
    const FlowQueue& q = flows_[flow];
    if (q.empty()) {
        throw QmgrError(QmgrErrc::EmptyFlow, "flow " + std::to_string(flow) + " is empty");
    }
    return q;
}

SegmentIndex QueueManager::take_free() {
    if (free_.count == 0) {
        throw QmgrError(QmgrErrc::PoolExhausted, "no free segments");
    }
    const SegmentIndex idx = free_.head;
    ControlEntry& c = control_[idx.value()];
    free_.head = c.next;
    if (free_.head.is_nil()) {
        free_.tail = SegmentIndex::nil();
    }
    --free_.count;
    c = ControlEntry{};
    state_[idx.value()] = SlotState::Detached;
    return idx;
}

void QueueManager::put_free(SegmentIndex idx) {
    control_[idx.value()] = ControlEntry{};
    state_[idx.value()] = SlotState::Free;
    if (free_.tail.is_nil()) {
        free_.head = idx;
    } else {
        control_[free_.tail.value()].next = idx;
    }
    free_.tail = idx;
    ++free_.count;
}

SegmentIndex QueueManager::alloc_segment() { return take_free(); }

void QueueManager::release_segment(SegmentIndex idx) {
    if (idx.is_nil() || idx.value() >= control_.size()) {
        throw QmgrError(QmgrErrc::BadSegment, "segment index out of range");
    }
    switch (state_[idx.value()]) {
        case SlotState::Free:
            throw QmgrError(QmgrErrc::DoubleFree,
                            "segment " + std::to_string(idx.value()) + " already free");
        case SlotState::Linked:
            throw QmgrError(QmgrErrc::SegmentInUse,
                            "segment " + std::to_string(idx.value()) + " is linked in a flow");
        case SlotState::Detached:
            break;
    }
    put_free(idx);
}

SegmentIndex QueueManager::enqueue_segment(FlowId flow, const SegmentData& data, std::size_t seg_len,
                                           bool eop) {
    check_flow(flow);
    check_length(seg_len);
    const SegmentIndex idx = take_free();
    const auto i = idx.value();
    control_[i] = ControlEntry{SegmentIndex::nil(), static_cast<std::uint8_t>(seg_len), eop};
    data_[i] = data;
    state_[i] = SlotState::Linked;

    FlowQueue& q = flows_[flow];
    if (q.empty()) {
        q.head = idx;
    } else {
        control_[q.tail.value()].next = idx;
    }
    q.tail = idx;
    ++q.seg_count;
    if (eop) {
        ++q.pkt_count;
    }
    return idx;
}

void QueueManager::unlink_head(FlowQueue& q) {
    const SegmentIndex idx = q.head;
    const ControlEntry& c = control_[idx.value()];
    q.head = c.next;
    if (q.head.is_nil()) {
        q.tail = SegmentIndex::nil();
    }
    --q.seg_count;
    if (c.eop) {
        --q.pkt_count;
    }
    state_[idx.value()] = SlotState::Detached;
}

Segment QueueManager::dequeue_segment(FlowId flow) {
    nonempty_flow(flow);
    FlowQueue& q = flows_[flow];
    const SegmentIndex idx = q.head;
    Segment out{data_[idx.value()], control_[idx.value()].seg_len, control_[idx.value()].eop};
    unlink_head(q);
    put_free(idx);
    return out;
}

Segment QueueManager::read_segment(FlowId flow) const {
    const FlowQueue& q = nonempty_flow(flow);
    const auto i = q.head.value();
    return Segment{data_[i], control_[i].seg_len, control_[i].eop};
}

SegmentIndex QueueManager::head_packet_eop(const FlowQueue& q) const {
    SegmentIndex cur = q.head;
    while (!cur.is_nil()) {
        if (control_[cur.value()].eop) {
            return cur;
        }
        cur = control_[cur.value()].next;
    }
    return SegmentIndex::nil();
}

std::size_t QueueManager::delete_head(FlowId flow, DeleteScope scope) {
    nonempty_flow(flow);
    FlowQueue& q = flows_[flow];
    if (scope == DeleteScope::Segment) {
        const SegmentIndex idx = q.head;
        unlink_head(q);
        put_free(idx);
        return 1;
    }
    if (head_packet_eop(q).is_nil()) {
        throw QmgrError(QmgrErrc::IncompletePacket,
                        "flow " + std::to_string(flow) + " head packet has no eop");
    }
    std::size_t released = 0;
    for (;;) {
        const SegmentIndex idx = q.head;
        const bool last = control_[idx.value()].eop;
        unlink_head(q);
        put_free(idx);
        ++released;
        if (last) {
            break;
        }
    }
    return released;
}

void QueueManager::overwrite_segment(FlowId flow, const SegmentData& data) {
    const FlowQueue& q = nonempty_flow(flow);
    data_[q.head.value()] = data;
}

void QueueManager::overwrite_length(FlowId flow, std::size_t new_len) {
    const FlowQueue& q = nonempty_flow(flow);
    check_length(new_len);
    control_[q.head.value()].seg_len = static_cast<std::uint8_t>(new_len);
}

SegmentIndex QueueManager::append_segment(FlowId flow, AppendPosition position, const SegmentData& data,
                                          std::size_t seg_len) {
    nonempty_flow(flow);
    check_length(seg_len);
    FlowQueue& q = flows_[flow];
    SegmentIndex eop;
    if (position == AppendPosition::TailOfPacket) {
        eop = head_packet_eop(q);
        if (eop.is_nil()) {
            throw QmgrError(QmgrErrc::IncompletePacket,
                            "flow " + std::to_string(flow) + " head packet has no eop");
        }
    }
    const SegmentIndex idx = take_free();
    const auto i = idx.value();
    data_[i] = data;
    state_[i] = SlotState::Linked;
    control_[i].seg_len = static_cast<std::uint8_t>(seg_len);

    if (position == AppendPosition::HeadOfPacket) {
        control_[i].next = q.head;
        control_[i].eop = false;
        q.head = idx;
    } else {
        ControlEntry& old_eop = control_[eop.value()];
        control_[i].next = old_eop.next;
        control_[i].eop = true;
        old_eop.next = idx;
        old_eop.eop = false;
        if (q.tail == eop) {
            q.tail = idx;
        }
    }
    ++q.seg_count;
    return idx;
}

void QueueManager::move_unchecked(FlowId src, FlowId dst, SegmentIndex eop) {
    if (src == dst) {
        return;
    }
    FlowQueue& s = flows_[src];
    FlowQueue& d = flows_[dst];
    const SegmentIndex first = s.head;
    std::size_t n = 1;
    for (SegmentIndex cur = first; cur != eop; cur = control_[cur.value()].next) {
        ++n;
    }

    s.head = control_[eop.value()].next;
    if (s.head.is_nil()) {
        s.tail = SegmentIndex::nil();
    }
    s.seg_count -= n;
    --s.pkt_count;

    control_[eop.value()].next = SegmentIndex::nil();
    if (d.empty()) {
        d.head = first;
    } else {
        control_[d.tail.value()].next = first;
    }
    d.tail = eop;
    d.seg_count += n;
    ++d.pkt_count;
}

void QueueManager::move_packet(FlowId src, FlowId dst) {
    check_flow(src);
    check_flow(dst);
    const FlowQueue& s = flows_[src];
    if (s.empty()) {
        throw QmgrError(QmgrErrc::EmptySrc, "flow " + std::to_string(src) + " is empty");
    }
    const SegmentIndex eop = head_packet_eop(s);
    if (eop.is_nil()) {
        throw QmgrError(QmgrErrc::IncompletePacket,
                        "flow " + std::to_string(src) + " head packet has no eop");
    }
    move_unchecked(src, dst, eop);
}

void QueueManager::overwrite_length_and_move(FlowId flow, std::size_t new_len, FlowId dst) {
    const FlowQueue& q = nonempty_flow(flow);
    check_length(new_len);
    check_flow(dst);
    const SegmentIndex eop = head_packet_eop(q);
    if (eop.is_nil()) {
        throw QmgrError(QmgrErrc::IncompletePacket,
                        "flow " + std::to_string(flow) + " head packet has no eop");
    }
    control_[q.head.value()].seg_len = static_cast<std::uint8_t>(new_len);
    move_unchecked(flow, dst, eop);
}

void QueueManager::overwrite_and_move(FlowId flow, const SegmentData& data, FlowId dst) {
    const FlowQueue& q = nonempty_flow(flow);
    check_flow(dst);
    const SegmentIndex eop = head_packet_eop(q);
    if (eop.is_nil()) {
        throw QmgrError(QmgrErrc::IncompletePacket,
                        "flow " + std::to_string(flow) + " head packet has no eop");
    }
    data_[q.head.value()] = data;
    move_unchecked(flow, dst, eop);
}

const FlowQueue& QueueManager::flow(FlowId flow) const {
    check_flow(flow);
    return flows_[flow];
}

const ControlEntry& QueueManager::control(SegmentIndex idx) const {
    if (idx.is_nil() || idx.value() >= control_.size()) {
        throw QmgrError(QmgrErrc::BadSegment, "segment index out of range");
    }
    return control_[idx.value()];
}

const SegmentData& QueueManager::data(SegmentIndex idx) const {
    if (idx.is_nil() || idx.value() >= data_.size()) {
        throw QmgrError(QmgrErrc::BadSegment, "segment index out of range");
    }
    return data_[idx.value()];
}

std::vector<SegmentIndex> QueueManager::flow_indices(FlowId flow) const {
    check_flow(flow);
    std::vector<SegmentIndex> out;
    for (SegmentIndex cur = flows_[flow].head; !cur.is_nil() && out.size() <= control_.size();
         cur = control_[cur.value()].next) {
        out.push_back(cur);
    }
    return out;
}

std::vector<Segment> QueueManager::flow_contents(FlowId flow) const {
    std::vector<Segment> out;
    for (SegmentIndex idx : flow_indices(flow)) {
        const auto i = idx.value();
        out.push_back(Segment{data_[i], control_[i].seg_len, control_[i].eop});
    }
    return out;
}

std::vector<SegmentIndex> QueueManager::free_indices() const {
    std::vector<SegmentIndex> out;
    for (SegmentIndex cur = free_.head; !cur.is_nil() && out.size() <= control_.size();
         cur = control_[cur.value()].next) {
        out.push_back(cur);
    }
    return out;
}

void QueueManager::check_invariants() const {
    const std::size_t n = control_.size();
    std::vector<std::uint32_t> owner(n, 0);  // 0 = unseen, 1 = free list, 2 + f = flow f
    auto fail = [](const std::string& msg) { throw std::logic_error(msg); };

    auto walk = [&](SegmentIndex head, SegmentIndex tail, std::uint32_t tag, const std::string& name,
                    std::size_t& segs, std::size_t& pkts) {
        segs = 0;
        pkts = 0;
        SegmentIndex last;
        for (SegmentIndex cur = head; !cur.is_nil(); cur = control_[cur.value()].next) {
            if (cur.value() >= n) {
                fail(name + ": link out of range");
            }
            if (owner[cur.value()] != 0) {
                fail(name + ": segment " + std::to_string(cur.value()) + " shared or cyclic");
            }
            owner[cur.value()] = tag;
            if (control_[cur.value()].eop) {
                ++pkts;
            }
            last = cur;
            ++segs;
        }
        if (last != tail) {
            fail(name + ": tail does not match traversal");
        }
    };

    std::size_t free_segs = 0;
    std::size_t free_pkts = 0;
    walk(free_.head, free_.tail, 1, "free list", free_segs, free_pkts);
    if (free_segs != free_.count) {
        fail("free list: count mismatch");
    }
    std::size_t total = free_segs;
    for (std::size_t f = 0; f < flows_.size(); ++f) {
        const FlowQueue& q = flows_[f];
        const std::string name = "flow " + std::to_string(f);
        if (q.head.is_nil() != q.tail.is_nil() || q.head.is_nil() != (q.seg_count == 0) ||
            (q.seg_count == 0 && q.pkt_count != 0)) {
            fail(name + ": empty-state fields disagree");
        }
        std::size_t segs = 0;
        std::size_t pkts = 0;
        walk(q.head, q.tail, static_cast<std::uint32_t>(2 + f), name, segs, pkts);
        if (segs != q.seg_count || pkts != q.pkt_count) {
            fail(name + ": stored counts disagree with traversal");
        }
        total += segs;
    }
    std::size_t detached = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const SlotState expected =
            owner[i] == 0 ? SlotState::Detached : (owner[i] == 1 ? SlotState::Free : SlotState::Linked);
        if (state_[i] != expected) {
            fail("segment " + std::to_string(i) + ": allocation state disagrees with lists");
        }
        if (expected == SlotState::Detached) {
            ++detached;
        }
    }
    // Detached slots come only from alloc_segment() without a matching release.
    if (total + detached != n) {
        fail("conservation: " + std::to_string(total) + " reachable of " + std::to_string(n));
    }
}

void QueueManager::dump(std::ostream& os) const {
    for (std::size_t f = 0; f < flows_.size(); ++f) {
        const FlowQueue& q = flows_[f];
        if (q.empty()) {
            continue;
        }
        os << f << ',' << q.seg_count << ',' << q.pkt_count << ',' << q.head << ',' << q.tail << '\n';
    }
    os << "free," << free_.count << ',' << free_.head << ',' << free_.tail << '\n';
}

}  // namespace npqsim
