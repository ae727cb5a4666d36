#include "npqsim/command.hpp"

#include <algorithm>
#include <stdexcept>

namespace npqsim {

const char* to_string(CommandKind kind) {
    switch (kind) {
        case CommandKind::Enqueue: return "Enqueue";
        case CommandKind::Read: return "Read";
        case CommandKind::Overwrite: return "Overwrite";
        case CommandKind::Move: return "Move";
        case CommandKind::Delete: return "Delete";
        case CommandKind::OverwriteLen: return "OverwriteLen";
        case CommandKind::Dequeue: return "Dequeue";
        case CommandKind::OverwriteLenAndMove: return "OverwriteLenAndMove";
        case CommandKind::OverwriteAndMove: return "OverwriteAndMove";
        case CommandKind::AppendHead: return "AppendHead";
        case CommandKind::AppendTail: return "AppendTail";
    }
    return "Unknown";
}

std::optional<CommandKind> parse_command_kind(std::string_view name) {
    for (CommandKind k : kAllCommandKinds) {
        if (name == to_string(k)) {
            return k;
        }
    }
    return std::nullopt;
}

bool needs_payload(CommandKind kind) {
    switch (kind) {
        case CommandKind::Enqueue:
        case CommandKind::Overwrite:
        case CommandKind::OverwriteAndMove:
        case CommandKind::AppendHead:
        case CommandKind::AppendTail:
            return true;
        default:
            return false;
    }
}

std::optional<AccessKind> data_access(CommandKind kind) {
    switch (kind) {
        case CommandKind::Read:
        case CommandKind::Dequeue:
            return AccessKind::Read;
        case CommandKind::Enqueue:
        case CommandKind::Overwrite:
        case CommandKind::OverwriteAndMove:
        case CommandKind::AppendHead:
        case CommandKind::AppendTail:
            return AccessKind::Write;
        default:
            return std::nullopt;
    }
}

ExecLatencyTable ExecLatencyTable::defaults() {
    ExecLatencyTable t;
    t.set(CommandKind::Enqueue, 10);
    t.set(CommandKind::Read, 10);
    t.set(CommandKind::Overwrite, 10);
    t.set(CommandKind::Move, 11);
    t.set(CommandKind::Delete, 7);
    t.set(CommandKind::OverwriteLen, 7);
    t.set(CommandKind::Dequeue, 11);
    t.set(CommandKind::OverwriteLenAndMove, 12);
    t.set(CommandKind::OverwriteAndMove, 12);
    t.set(CommandKind::AppendHead, 10);
    t.set(CommandKind::AppendTail, 10);
    return t;
}

void ExecLatencyTable::set(CommandKind kind, unsigned cycles) {
    if (cycles == 0) {
        throw std::invalid_argument(std::string("latency of ") + to_string(kind) + " must be positive");
    }
    cycles_[static_cast<std::size_t>(kind)] = cycles;
}

unsigned ExecLatencyTable::min() const { return *std::min_element(cycles_.begin(), cycles_.end()); }

void apply(QueueManager& qm, const Command& cmd) {
    static const SegmentData kZero{};
    const SegmentData& payload = cmd.payload ? *cmd.payload : kZero;
    switch (cmd.kind) {
        case CommandKind::Enqueue:
            qm.enqueue_segment(cmd.flow, payload, cmd.seg_len, cmd.eop);
            break;
        case CommandKind::Read:
            qm.read_segment(cmd.flow);
            break;
        case CommandKind::Overwrite:
            qm.overwrite_segment(cmd.flow, payload);
            break;
        case CommandKind::Move:
            qm.move_packet(cmd.flow, cmd.dst);
            break;
        case CommandKind::Delete:
            qm.delete_head(cmd.flow, cmd.scope);
            break;
        case CommandKind::OverwriteLen:
            qm.overwrite_length(cmd.flow, cmd.seg_len);
            break;
        case CommandKind::Dequeue:
            qm.dequeue_segment(cmd.flow);
            break;
        case CommandKind::OverwriteLenAndMove:
            qm.overwrite_length_and_move(cmd.flow, cmd.seg_len, cmd.dst);
            break;
        case CommandKind::OverwriteAndMove:
            qm.overwrite_and_move(cmd.flow, payload, cmd.dst);
            break;
        case CommandKind::AppendHead:
            qm.append_segment(cmd.flow, AppendPosition::HeadOfPacket, payload, cmd.seg_len);
            break;
        case CommandKind::AppendTail:
            qm.append_segment(cmd.flow, AppendPosition::TailOfPacket, payload, cmd.seg_len);
            break;
    }
}

}  // namespace npqsim
