#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "npqsim/dram.hpp"
#include "npqsim/qmgr.hpp"

namespace npqsim {

enum class CommandKind {
    Enqueue,
    Read,
    Overwrite,
    Move,
    Delete,
    OverwriteLen,
    Dequeue,
    OverwriteLenAndMove,
    OverwriteAndMove,
    AppendHead,
    AppendTail,
};

inline constexpr std::size_t kCommandKinds = 11;

inline constexpr std::array<CommandKind, kCommandKinds> kAllCommandKinds = {
    CommandKind::Enqueue,      CommandKind::Read,       CommandKind::Overwrite,
    CommandKind::Move,         CommandKind::Delete,     CommandKind::OverwriteLen,
    CommandKind::Dequeue,      CommandKind::OverwriteLenAndMove, CommandKind::OverwriteAndMove,
    CommandKind::AppendHead,   CommandKind::AppendTail,
};

const char* to_string(CommandKind kind);
std::optional<CommandKind> parse_command_kind(std::string_view name);

/// Kinds that carry a segment payload.
bool needs_payload(CommandKind kind);

/// DRAM access a command performs, if any.
std::optional<AccessKind> data_access(CommandKind kind);

/// A request to the memory-management system. Fields beyond `kind`, `flow`
/// and `port` are read only by the kinds that use them.
struct Command {
    CommandKind kind = CommandKind::Enqueue;
    FlowId flow = 0;
    FlowId dst = 0;  ///< Move and the compound kinds
    unsigned port = 0;
    std::optional<SegmentData> payload;
    std::uint8_t seg_len = kSegmentBytes;  ///< Enqueue, OverwriteLen*, Append*
    bool eop = true;                       ///< Enqueue
    DeleteScope scope = DeleteScope::Packet;
    std::int64_t arrival_cycle = 0;
    std::uint64_t id = 0;

    bool operator==(const Command&) const = default;
};

/// Execution latency in core cycles per command kind.
class ExecLatencyTable {
public:
    /// Measured MMS latencies; append kinds reuse the Enqueue figure.
    static ExecLatencyTable defaults();

    unsigned at(CommandKind kind) const { return cycles_[static_cast<std::size_t>(kind)]; }
    void set(CommandKind kind, unsigned cycles);
    unsigned min() const;

private:
    std::array<unsigned, kCommandKinds> cycles_{};
};

/// Applies a command to the queue manager without timing. Throws QmgrError;
/// a missing payload is treated as an all-zero segment.
void apply(QueueManager& qm, const Command& cmd);

}  // namespace npqsim
