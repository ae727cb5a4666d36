#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "../support/qmgr_oracle.hpp"
#include "npqsim/qmgr.hpp"

namespace npqsim {
namespace {

using testing::QmgrOracle;

SegmentData filled(std::uint8_t v) {
    SegmentData d;
    d.fill(v);
    return d;
}

QueueManager small(std::size_t segments = 8, std::size_t flows = 4) {
    return QueueManager(QueueManager::Config{segments, flows});
}

template <typename F>
QmgrErrc error_of(F&& f) {
    try {
        f();
    } catch (const QmgrError& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected QmgrError";
    return QmgrErrc::BadSegment;
}

TEST(Qmgr, DefaultSizes) {
    QueueManager qm;
    EXPECT_EQ(qm.capacity(), 65536u);
    EXPECT_EQ(qm.flow_count(), 32768u);
    EXPECT_EQ(qm.free_count(), 65536u);
}

TEST(Qmgr, FirstAllocIsZero) {
    auto qm = small();
    EXPECT_EQ(qm.alloc_segment(), SegmentIndex(0));
    EXPECT_EQ(qm.alloc_segment(), SegmentIndex(1));
}

TEST(Qmgr, AllocOnEmptyPoolFails) {
    auto qm = small(2);
    qm.alloc_segment();
    qm.alloc_segment();
    EXPECT_EQ(error_of([&] { qm.alloc_segment(); }), QmgrErrc::PoolExhausted);
    EXPECT_EQ(qm.free_count(), 0u);
}

TEST(Qmgr, ReleasedIndexComesBackLast) {
    auto qm = small(8);
    std::deque<std::uint32_t> model = {0, 1, 2, 3, 4, 5, 6, 7};
    const SegmentIndex i = qm.alloc_segment();
    ASSERT_EQ(i.value(), model.front());
    model.pop_front();
    qm.release_segment(i);
    model.push_back(i.value());
    std::vector<std::uint32_t> got;
    while (qm.free_count() > 0) {
        got.push_back(qm.alloc_segment().value());
    }
    EXPECT_EQ(got, std::vector<std::uint32_t>(model.begin(), model.end()));
    EXPECT_EQ(got.back(), i.value());
}

TEST(Qmgr, ReleaseIntoEmptyFreeList) {
    auto qm = small(1);
    const SegmentIndex i = qm.alloc_segment();
    qm.release_segment(i);
    EXPECT_EQ(qm.free_list().head, i);
    EXPECT_EQ(qm.free_list().tail, i);
    EXPECT_EQ(qm.free_count(), 1u);
}

TEST(Qmgr, DoubleFreeDetected) {
    auto qm = small();
    const SegmentIndex i = qm.alloc_segment();
    qm.release_segment(i);
    const QueueManager before = qm;
    EXPECT_EQ(error_of([&] { qm.release_segment(i); }), QmgrErrc::DoubleFree);
    EXPECT_EQ(qm, before);
}

TEST(Qmgr, ReleaseLinkedSegmentRejected) {
    auto qm = small();
    const SegmentIndex i = qm.enqueue_segment(0, filled(1), 64, true);
    EXPECT_EQ(error_of([&] { qm.release_segment(i); }), QmgrErrc::SegmentInUse);
    EXPECT_EQ(error_of([&] { qm.release_segment(SegmentIndex(99)); }), QmgrErrc::BadSegment);
    EXPECT_EQ(error_of([&] { qm.release_segment(SegmentIndex::nil()); }), QmgrErrc::BadSegment);
}

TEST(Qmgr, AllocReleaseConservesCount) {
    auto qm = small(64);
    std::mt19937_64 rng(7);
    std::vector<SegmentIndex> held;
    for (int op = 0; op < 10000; ++op) {
        if (!held.empty() && (qm.free_count() == 0 || rng() % 2)) {
            std::uniform_int_distribution<std::size_t> d(0, held.size() - 1);
            const std::size_t k = d(rng);
            qm.release_segment(held[k]);
            held.erase(held.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
            held.push_back(qm.alloc_segment());
        }
        ASSERT_EQ(qm.free_count() + held.size(), 64u);
        qm.check_invariants();
    }
}

TEST(Qmgr, EnqueueOnEmptyFlow) {
    auto qm = small();
    const SegmentIndex i = qm.enqueue_segment(2, filled(9), 64, true);
    EXPECT_EQ(qm.flow(2).head, i);
    EXPECT_EQ(qm.flow(2).tail, i);
    EXPECT_EQ(qm.flow(2).seg_count, 1u);
    EXPECT_EQ(qm.flow(2).pkt_count, 1u);
}

TEST(Qmgr, EopCountsPackets) {
    auto qm = small();
    qm.enqueue_segment(0, filled(1), 64, false);
    qm.enqueue_segment(0, filled(2), 64, false);
    qm.enqueue_segment(0, filled(3), 10, true);
    EXPECT_EQ(qm.flow(0).seg_count, 3u);
    EXPECT_EQ(qm.flow(0).pkt_count, 1u);
    qm.check_invariants();
}

TEST(Qmgr, EnqueueErrorsLeaveStateUnchanged) {
    auto qm = small(1, 2);
    const QueueManager fresh = qm;
    EXPECT_EQ(error_of([&] { qm.enqueue_segment(2, filled(0), 64, true); }), QmgrErrc::BadFlow);
    EXPECT_EQ(error_of([&] { qm.enqueue_segment(0, filled(0), 0, true); }), QmgrErrc::BadLength);
    EXPECT_EQ(error_of([&] { qm.enqueue_segment(0, filled(0), 65, true); }), QmgrErrc::BadLength);
    EXPECT_EQ(qm, fresh);
    qm.enqueue_segment(0, filled(0), 64, true);
    const QueueManager full = qm;
    EXPECT_EQ(error_of([&] { qm.enqueue_segment(1, filled(0), 64, true); }), QmgrErrc::PoolExhausted);
    EXPECT_EQ(qm, full);
}

TEST(Qmgr, PerFlowFifoOrderAgainstSequences) {
    auto qm = QueueManager({20000, 16});
    std::mt19937_64 rng(11);
    std::vector<std::vector<Segment>> model(16);
    for (int n = 0; n < 10000; ++n) {
        const FlowId f = static_cast<FlowId>(rng() % 16);
        const Segment s{filled(static_cast<std::uint8_t>(rng())), static_cast<std::uint8_t>(1 + rng() % 64),
                        rng() % 3 == 0};
        qm.enqueue_segment(f, s.data, s.seg_len, s.eop);
        model[f].push_back(s);
    }
    for (FlowId f = 0; f < 16; ++f) {
        std::vector<Segment> got;
        while (!qm.flow(f).empty()) {
            got.push_back(qm.dequeue_segment(f));
        }
        EXPECT_EQ(got, model[f]) << "flow " << f;
    }
    EXPECT_EQ(qm.free_count(), 20000u);
}

TEST(Qmgr, DequeueRoundTrip) {
    auto qm = small();
    qm.enqueue_segment(1, filled(0xab), 33, true);
    const Segment s = qm.dequeue_segment(1);
    EXPECT_EQ(s.data, filled(0xab));
    EXPECT_EQ(s.seg_len, 33);
    EXPECT_TRUE(s.eop);
    EXPECT_TRUE(qm.flow(1).empty());
    EXPECT_EQ(qm.free_count(), 8u);
}

TEST(Qmgr, EmptyFlowErrors) {
    auto qm = small();
    const QueueManager fresh = qm;
    EXPECT_EQ(error_of([&] { qm.dequeue_segment(0); }), QmgrErrc::EmptyFlow);
    EXPECT_EQ(error_of([&] { qm.read_segment(0); }), QmgrErrc::EmptyFlow);
    EXPECT_EQ(error_of([&] { qm.delete_head(0, DeleteScope::Segment); }), QmgrErrc::EmptyFlow);
    EXPECT_EQ(error_of([&] { qm.overwrite_segment(0, filled(1)); }), QmgrErrc::EmptyFlow);
    EXPECT_EQ(error_of([&] { qm.overwrite_length(0, 5); }), QmgrErrc::EmptyFlow);
    EXPECT_EQ(error_of([&] { qm.append_segment(0, AppendPosition::HeadOfPacket, filled(1), 64); }),
              QmgrErrc::EmptyFlow);
    EXPECT_EQ(error_of([&] { qm.move_packet(0, 1); }), QmgrErrc::EmptySrc);
    EXPECT_EQ(qm, fresh);
}

TEST(Qmgr, ReadDoesNotMutate) {
    auto qm = small();
    qm.enqueue_segment(0, filled(5), 64, true);
    const QueueManager before = qm;
    const Segment a = qm.read_segment(0);
    const Segment b = qm.read_segment(0);
    EXPECT_EQ(a, b);
    EXPECT_EQ(qm, before);
    EXPECT_EQ(qm.dequeue_segment(0), a);
}

TEST(Qmgr, DeletePacketAndSegment) {
    auto qm = small();
    for (int i = 0; i < 3; ++i) {
        qm.enqueue_segment(0, filled(static_cast<std::uint8_t>(i)), 64, i == 2);
    }
    auto copy = qm;
    EXPECT_EQ(copy.delete_head(0, DeleteScope::Segment), 1u);
    EXPECT_EQ(copy.flow(0).seg_count, 2u);
    EXPECT_EQ(qm.delete_head(0, DeleteScope::Packet), 3u);
    EXPECT_TRUE(qm.flow(0).empty());
    EXPECT_EQ(qm.free_count(), 8u);
}

TEST(Qmgr, DeletePartialPacketRejected) {
    auto qm = small();
    qm.enqueue_segment(0, filled(1), 64, false);
    const QueueManager before = qm;
    EXPECT_EQ(error_of([&] { qm.delete_head(0, DeleteScope::Packet); }), QmgrErrc::IncompletePacket);
    EXPECT_EQ(qm, before);
}

TEST(Qmgr, OverwriteKeepsCounts) {
    auto qm = small();
    qm.enqueue_segment(0, filled(1), 64, false);
    qm.enqueue_segment(0, filled(2), 64, true);
    qm.overwrite_segment(0, filled(7));
    EXPECT_EQ(qm.read_segment(0).data, filled(7));
    EXPECT_EQ(qm.flow(0).seg_count, 2u);
    EXPECT_EQ(qm.flow(0).pkt_count, 1u);
}

TEST(Qmgr, OverwriteLength) {
    auto qm = small();
    SegmentData d;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<std::uint8_t>(i);
    qm.enqueue_segment(0, d, 64, true);
    const QueueManager before = qm;
    qm.overwrite_length(0, 64);
    EXPECT_EQ(qm, before);
    EXPECT_EQ(error_of([&] { qm.overwrite_length(0, 65); }), QmgrErrc::BadLength);
    qm.overwrite_length(0, 20);
    const Segment s = qm.read_segment(0);
    EXPECT_EQ(s.seg_len, 20);
    EXPECT_TRUE(std::equal(d.begin(), d.begin() + 20, s.data.begin()));
}

TEST(Qmgr, AppendHeadPrepends) {
    auto qm = small();
    qm.enqueue_segment(0, filled(1), 64, true);
    qm.append_segment(0, AppendPosition::HeadOfPacket, filled(2), 14);
    EXPECT_EQ(qm.flow(0).pkt_count, 1u);
    const Segment first = qm.dequeue_segment(0);
    const Segment second = qm.dequeue_segment(0);
    EXPECT_EQ(first.data, filled(2));
    EXPECT_FALSE(first.eop);
    EXPECT_EQ(second.data, filled(1));
    EXPECT_TRUE(second.eop);
}

TEST(Qmgr, AppendTailMovesEop) {
    auto qm = small();
    qm.enqueue_segment(0, filled(1), 64, false);
    qm.enqueue_segment(0, filled(2), 64, true);
    qm.enqueue_segment(0, filled(3), 64, true);
    const SegmentIndex n = qm.append_segment(0, AppendPosition::TailOfPacket, filled(9), 5);
    EXPECT_EQ(qm.flow(0).pkt_count, 2u);
    EXPECT_EQ(qm.flow(0).seg_count, 4u);
    EXPECT_TRUE(qm.control(n).eop);
    const auto segs = qm.flow_contents(0);
    EXPECT_FALSE(segs[1].eop);
    EXPECT_EQ(segs[2].data, filled(9));
    EXPECT_TRUE(segs[2].eop);
    EXPECT_EQ(segs[3].data, filled(3));
    qm.check_invariants();
}

TEST(Qmgr, AppendTailOnSinglePacketUpdatesTail) {
    auto qm = small();
    qm.enqueue_segment(0, filled(1), 64, true);
    const SegmentIndex n = qm.append_segment(0, AppendPosition::TailOfPacket, filled(2), 64);
    EXPECT_EQ(qm.flow(0).tail, n);
    qm.check_invariants();
}

TEST(Qmgr, EncapsulationRoundTrip) {
    auto qm = small();
    QmgrOracle oracle(8, 4);
    Command e{.kind = CommandKind::Enqueue, .flow = 0, .payload = filled(1)};
    oracle.apply(e);
    npqsim::apply(qm, e);
    const auto before = oracle.flow(0);
    qm.append_segment(0, AppendPosition::HeadOfPacket, filled(2), 64);
    qm.delete_head(0, DeleteScope::Segment);
    ASSERT_EQ(qm.flow_contents(0).size(), before.size());
    EXPECT_EQ(qm.flow_contents(0)[0], before[0].seg);
}

TEST(Qmgr, MoveOnlyPacket) {
    auto qm = small();
    qm.enqueue_segment(0, filled(1), 64, false);
    qm.enqueue_segment(0, filled(2), 30, true);
    qm.enqueue_segment(1, filled(3), 64, true);
    const auto free_before = qm.free_count();
    qm.move_packet(0, 1);
    EXPECT_TRUE(qm.flow(0).empty());
    EXPECT_EQ(qm.flow(1).pkt_count, 2u);
    EXPECT_EQ(qm.flow(1).seg_count, 3u);
    EXPECT_EQ(qm.free_count(), free_before);
    EXPECT_EQ(qm.dequeue_segment(1).data, filled(3));
    EXPECT_EQ(qm.dequeue_segment(1).data, filled(1));
    EXPECT_EQ(qm.dequeue_segment(1).seg_len, 30);
    qm.check_invariants();
}

TEST(Qmgr, MoveToSelfIsNoOp) {
    auto qm = small();
    qm.enqueue_segment(0, filled(1), 64, true);
    qm.enqueue_segment(0, filled(2), 64, true);
    const QueueManager before = qm;
    qm.move_packet(0, 0);
    EXPECT_EQ(qm, before);
    EXPECT_EQ(error_of([&] { qm.move_packet(0, 4); }), QmgrErrc::BadFlow);
    EXPECT_EQ(error_of([&] { qm.move_packet(1, 1); }), QmgrErrc::EmptySrc);
}

TEST(Qmgr, MoveIncompletePacketRejected) {
    auto qm = small();
    qm.enqueue_segment(0, filled(1), 64, false);
    const QueueManager before = qm;
    EXPECT_EQ(error_of([&] { qm.move_packet(0, 1); }), QmgrErrc::IncompletePacket);
    EXPECT_EQ(qm, before);
}

TEST(Qmgr, RandomMovesConserveSegmentsAndPacketOrder) {
    auto qm = QueueManager({4096, 8});
    std::mt19937_64 rng(3);
    std::map<std::uint8_t, std::vector<std::uint8_t>> packets;  // first byte -> packet bytes
    std::uint8_t tag = 0;
    for (int p = 0; p < 200; ++p) {
        const FlowId f = static_cast<FlowId>(rng() % 8);
        const int n = 1 + static_cast<int>(rng() % 4);
        for (int s = 0; s < n; ++s) {
            SegmentData d = filled(tag);
            d[1] = static_cast<std::uint8_t>(s);
            qm.enqueue_segment(f, d, 64, s == n - 1);
        }
        ++tag;
    }
    const std::size_t total = 4096 - qm.free_count();
    for (int m = 0; m < 1000; ++m) {
        const FlowId src = static_cast<FlowId>(rng() % 8);
        const FlowId dst = static_cast<FlowId>(rng() % 8);
        if (qm.flow(src).empty()) continue;
        qm.move_packet(src, dst);
        ASSERT_EQ(4096 - qm.free_count(), total);
    }
    qm.check_invariants();
    std::size_t seen = 0;
    for (FlowId f = 0; f < 8; ++f) {
        const auto segs = qm.flow_contents(f);
        int expect_seq = 0;
        for (const Segment& s : segs) {
            EXPECT_EQ(s.data[1], expect_seq) << "packet segments out of order";
            expect_seq = s.eop ? 0 : expect_seq + 1;
            ++seen;
        }
    }
    EXPECT_EQ(seen, total);
}

TEST(Qmgr, CompoundEqualsSequential) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10000; ++trial) {
        auto a = QueueManager({32, 4});
        for (int i = 0; i < 6; ++i) {
            a.enqueue_segment(static_cast<FlowId>(rng() % 4), filled(static_cast<std::uint8_t>(i)), 64,
                              rng() % 2 == 0);
        }
        auto b = a;
        const FlowId src = static_cast<FlowId>(rng() % 4);
        const FlowId dst = static_cast<FlowId>(rng() % 4);
        const std::size_t len = 1 + rng() % 64;
        const bool len_variant = rng() % 2;
        std::optional<QmgrErrc> ea, eb;
        try {
            if (len_variant) {
                a.overwrite_length_and_move(src, len, dst);
            } else {
                a.overwrite_and_move(src, filled(0xee), dst);
            }
        } catch (const QmgrError& e) {
            ea = e.code();
        }
        auto b_before = b;
        try {
            if (len_variant) {
                b.overwrite_length(src, len);
            } else {
                b.overwrite_segment(src, filled(0xee));
            }
            b.move_packet(src, dst);
        } catch (const QmgrError& e) {
            eb = e.code();
            b = b_before;
        }
        ASSERT_EQ(ea.has_value(), eb.has_value());
        ASSERT_EQ(a, b);
    }
}

TEST(Qmgr, OracleFuzzSmallPool) {
    constexpr std::size_t kSegments = 64;
    constexpr std::uint32_t kFlows = 8;
    QueueManager qm({kSegments, kFlows});
    QmgrOracle oracle(kSegments, kFlows);
    std::mt19937_64 rng(99);
    std::map<QmgrErrc, int> errors;
    for (int n = 0; n < 20000; ++n) {
        const Command c = testing::random_command(rng, kFlows);
        const auto want = oracle.apply(c);
        const auto got = testing::try_apply(qm, c);
        ASSERT_EQ(got, want) << "op " << n << " " << to_string(c.kind);
        if (got) ++errors[*got];
        const std::string d = oracle.diff(qm);
        ASSERT_TRUE(d.empty()) << "op " << n << ": " << d;
        qm.check_invariants();
    }
    EXPECT_GT(errors[QmgrErrc::PoolExhausted], 0);
    EXPECT_GT(errors[QmgrErrc::IncompletePacket], 0);
    EXPECT_GT(errors[QmgrErrc::BadLength], 0);
}

TEST(Qmgr, DetachedSegmentPassesAudit) {
    auto qm = small();
    qm.alloc_segment();
    EXPECT_NO_THROW(qm.check_invariants());
}

TEST(Qmgr, DumpFormat) {
    auto qm = small();
    qm.enqueue_segment(3, filled(1), 64, false);
    qm.enqueue_segment(3, filled(1), 64, true);
    std::ostringstream os;
    qm.dump(os);
    EXPECT_EQ(os.str(), "3,2,1,0,1\nfree,6,2,7\n");
}

TEST(Qmgr, DumpEmptyFreeList) {
    auto qm = small(1, 1);
    qm.alloc_segment();
    std::ostringstream os;
    qm.dump(os);
    EXPECT_EQ(os.str().rfind("free,0,", 0), 0u);
}

}  // namespace
}  // namespace npqsim
