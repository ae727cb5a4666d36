#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace npqsim {

inline constexpr std::size_t kSegmentBytes = 64;
inline constexpr std::size_t kDefaultFlows = 32768;
inline constexpr std::size_t kDefaultSegments = 65536;

using FlowId = std::uint32_t;
using SegmentData = std::array<std::uint8_t, kSegmentBytes>;

/// Identity of one 64-byte slot in the buffer pool. A default-constructed
/// index is NIL.
class SegmentIndex {
public:
    static constexpr std::uint32_t kNilValue = std::numeric_limits<std::uint32_t>::max();

    constexpr SegmentIndex() = default;
    constexpr explicit SegmentIndex(std::uint32_t v) : value_(v) {}

    static constexpr SegmentIndex nil() { return SegmentIndex{}; }

    constexpr bool is_nil() const { return value_ == kNilValue; }
    constexpr std::uint32_t value() const { return value_; }

    constexpr auto operator<=>(const SegmentIndex&) const = default;

private:
    std::uint32_t value_ = kNilValue;
};

std::ostream& operator<<(std::ostream& os, SegmentIndex idx);

/// Per-segment control word kept in pointer memory.
struct ControlEntry {
    SegmentIndex next;
    std::uint8_t seg_len = 0;
    bool eop = false;

    bool operator==(const ControlEntry&) const = default;
};

/// Segment contents as seen by a reader: payload, valid length, packet boundary.
struct Segment {
    SegmentData data{};
    std::uint8_t seg_len = 0;
    bool eop = false;

    bool operator==(const Segment&) const = default;
};

struct FlowQueue {
    SegmentIndex head;
    SegmentIndex tail;
    std::size_t seg_count = 0;
    std::size_t pkt_count = 0;

    bool empty() const { return head.is_nil(); }
    bool operator==(const FlowQueue&) const = default;
};

struct FreeList {
    SegmentIndex head;
    SegmentIndex tail;
    std::size_t count = 0;

    bool operator==(const FreeList&) const = default;
};

enum class QmgrErrc {
    PoolExhausted,
    DoubleFree,
    SegmentInUse,
    BadSegment,
    BadFlow,
    BadLength,
    EmptyFlow,
    EmptySrc,
    IncompletePacket,
};

const char* to_string(QmgrErrc code);

class QmgrError : public std::runtime_error {
public:
    QmgrError(QmgrErrc code, const std::string& what);
    QmgrErrc code() const noexcept { return code_; }

private:
    QmgrErrc code_;
};

enum class DeleteScope { Segment, Packet };
enum class AppendPosition { HeadOfPacket, TailOfPacket };

/**
 * Per-flow queue manager over a fixed pool of 64-byte segments.
 *
 * Each flow is a singly linked list of segments with explicit head and tail.
 * Unused segments sit on a free list, initialized in ascending index order;
 * allocation takes the free-list head and release appends at its tail.
 * Packets are delimited by the eop flag of their last segment.
 *
 * Every operation either completes or throws QmgrError with the state left
 * untouched. Not thread-safe; one owner mutates an instance at a time.
 */
class QueueManager {
public:
    struct Config {
        std::size_t segments = kDefaultSegments;
        std::size_t flows = kDefaultFlows;
    };

    QueueManager();
    explicit QueueManager(Config config);

    SegmentIndex alloc_segment();
    void release_segment(SegmentIndex idx);

    SegmentIndex enqueue_segment(FlowId flow, const SegmentData& data, std::size_t seg_len, bool eop);
    Segment dequeue_segment(FlowId flow);
    Segment read_segment(FlowId flow) const;

    /// Returns the number of segments released.
    std::size_t delete_head(FlowId flow, DeleteScope scope);

    void overwrite_segment(FlowId flow, const SegmentData& data);
    void overwrite_length(FlowId flow, std::size_t new_len);
    SegmentIndex append_segment(FlowId flow, AppendPosition position, const SegmentData& data,
                                std::size_t seg_len);

    /// Moves the head packet of src to the tail of dst. src == dst validates
    /// and leaves the state unchanged.
    void move_packet(FlowId src, FlowId dst);

    void overwrite_length_and_move(FlowId flow, std::size_t new_len, FlowId dst);
    void overwrite_and_move(FlowId flow, const SegmentData& data, FlowId dst);

    std::size_t capacity() const { return control_.size(); }
    std::size_t flow_count() const { return flows_.size(); }
    std::size_t free_count() const { return free_.count; }
    const FreeList& free_list() const { return free_; }
    const FlowQueue& flow(FlowId flow) const;
    const ControlEntry& control(SegmentIndex idx) const;
    const SegmentData& data(SegmentIndex idx) const;

    /// Walks the flow from head to NIL.
    std::vector<Segment> flow_contents(FlowId flow) const;
    std::vector<SegmentIndex> flow_indices(FlowId flow) const;
    std::vector<SegmentIndex> free_indices() const;

    /// Full structural audit: conservation, disjointness, acyclicity and
    /// count coherence. Throws std::logic_error describing the first violation.
    void check_invariants() const;

    /// One line per non-empty flow `flow_id,seg_count,pkt_count,head,tail`,
    /// then `free,count,head,tail`.
    void dump(std::ostream& os) const;

    bool operator==(const QueueManager&) const = default;

private:
    enum class SlotState : std::uint8_t { Free, Detached, Linked };

    void check_flow(FlowId flow) const;
    static void check_length(std::size_t len);
    const FlowQueue& nonempty_flow(FlowId flow) const;
    SegmentIndex take_free();
    void put_free(SegmentIndex idx);
    SegmentIndex head_packet_eop(const FlowQueue& q) const;
    void unlink_head(FlowQueue& q);
    void move_unchecked(FlowId src, FlowId dst, SegmentIndex eop);

    std::vector<ControlEntry> control_;
    std::vector<SegmentData> data_;
    std::vector<SlotState> state_;
    std::vector<FlowQueue> flows_;
    FreeList free_;
};

}  // namespace npqsim
