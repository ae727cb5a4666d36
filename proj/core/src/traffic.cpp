#include "npqsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <random>
#include <unordered_map>

namespace npqsim {

const char* to_string(TrafficErrc code) {
    switch (code) {
        case TrafficErrc::EmptyPacket: return "EmptyPacket";
        case TrafficErrc::MissingEop: return "MissingEop";
        case TrafficErrc::InteriorShortSegment: return "InteriorShortSegment";
        case TrafficErrc::EopBeforeEnd: return "EopBeforeEnd";
        case TrafficErrc::BadSpec: return "BadSpec";
    }
    return "Unknown";
}

TrafficError::TrafficError(TrafficErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

std::vector<Segment> segment_packet(const Packet& packet) {
    if (packet.bytes.empty()) {
        throw TrafficError(TrafficErrc::EmptyPacket, "packet has no bytes");
    }
    const std::size_t len = packet.bytes.size();
    std::vector<Segment> out;
    out.reserve((len + kSegmentBytes - 1) / kSegmentBytes);
    for (std::size_t off = 0; off < len; off += kSegmentBytes) {
        const std::size_t n = std::min(kSegmentBytes, len - off);
        Segment s;
        std::copy_n(packet.bytes.begin() + static_cast<std::ptrdiff_t>(off), n, s.data.begin());
        s.seg_len = static_cast<std::uint8_t>(n);
        s.eop = off + n == len;
        out.push_back(s);
    }
    return out;
}

Packet reassemble(std::span<const Segment> segments, FlowId flow) {
    if (segments.empty() || !segments.back().eop) {
        throw TrafficError(TrafficErrc::MissingEop, "segment sequence does not end in eop");
    }
    Packet p;
    p.flow = flow;
    p.bytes.reserve(segments.size() * kSegmentBytes);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        const bool last = i + 1 == segments.size();
        if (!last && s.eop) {
            throw TrafficError(TrafficErrc::EopBeforeEnd, "eop on segment " + std::to_string(i));
        }
        if (!last && s.seg_len != kSegmentBytes) {
            throw TrafficError(TrafficErrc::InteriorShortSegment,
                               "segment " + std::to_string(i) + " has length " + std::to_string(s.seg_len));
        }
        if (s.seg_len < 1 || s.seg_len > kSegmentBytes) {
            throw TrafficError(TrafficErrc::InteriorShortSegment,
                               "segment " + std::to_string(i) + " has invalid length");
        }
        p.bytes.insert(p.bytes.end(), s.data.begin(), s.data.begin() + s.seg_len);
    }
    return p;
}

void WorkloadSpec::validate() const {
    auto bad = [](const std::string& msg) { throw TrafficError(TrafficErrc::BadSpec, msg); };
    if (!(offered_gbps >= 0) || !std::isfinite(offered_gbps)) {
        bad("offered_gbps must be non-negative");
    }
    if (flows == 0 || flows > kDefaultFlows) {
        bad("flows must be in [1, 32768]");
    }
    if (ports == 0 || ports > flows) {
        bad("ports must be in [1, flows]");
    }
    if (duration_cycles < 0) {
        bad("duration must be non-negative");
    }
    if (!(core_clock_mhz > 0)) {
        bad("core clock must be positive");
    }
    if (mix.empty()) {
        bad("mix is empty");
    }
    double sum = 0;
    for (const auto& [kind, w] : mix) {
        if (!(w >= 0)) {
            bad(std::string("negative weight for ") + to_string(kind));
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        bad("mix weights must sum to 1");
    }
    if (commands_per_cycle() > ports) {
        bad("offered load exceeds one command per port per cycle");
    }
}

double WorkloadSpec::commands_per_cycle() const {
    const double segments_per_second = offered_gbps * 1e9 / static_cast<double>(kSegmentBytes * 8);
    return segments_per_second / (core_clock_mhz * 1e6);
}

namespace {

/// Packet structure of each flow as the stream leaves it.
class ShadowQueues {
public:
    bool any() const { return !nonempty_.empty(); }

    FlowId pick(std::mt19937_64& rng) const {
        std::uniform_int_distribution<std::size_t> d(0, nonempty_.size() - 1);
        return nonempty_[d(rng)];
    }

    void push_packet(FlowId f, std::uint32_t segs) {
        auto& q = packets_[f];
        if (q.empty()) {
            pos_[f] = nonempty_.size();
            nonempty_.push_back(f);
        }
        q.push_back(segs);
    }

    std::uint32_t pop_packet(FlowId f) {
        auto& q = packets_.at(f);
        const std::uint32_t n = q.front();
        q.pop_front();
        if (q.empty()) {
            erase(f);
        }
        return n;
    }

    void pop_segment(FlowId f) {
        auto& q = packets_.at(f);
        if (--q.front() == 0) {
            q.pop_front();
        }
        if (q.empty()) {
            erase(f);
        }
    }

    void grow_head(FlowId f) { ++packets_.at(f).front(); }

private:
    void erase(FlowId f) {
        const std::size_t i = pos_.at(f);
        const FlowId last = nonempty_.back();
        nonempty_[i] = last;
        pos_[last] = i;
        nonempty_.pop_back();
        pos_.erase(f);
        packets_.erase(f);
    }

    std::unordered_map<FlowId, std::deque<std::uint32_t>> packets_;
    std::unordered_map<FlowId, std::size_t> pos_;
    std::vector<FlowId> nonempty_;
};

SegmentData random_payload(std::mt19937_64& rng) {
    SegmentData d;
    for (std::size_t i = 0; i < d.size(); i += 8) {
        std::uint64_t v = rng();
        for (std::size_t b = 0; b < 8; ++b) {
            d[i + b] = static_cast<std::uint8_t>(v >> (8 * b));
        }
    }
    return d;
}

}  // namespace

std::vector<Command> generate(const WorkloadSpec& spec) {
    spec.validate();
    std::vector<Command> out;
    const double p = spec.commands_per_cycle() / spec.ports;
    if (spec.duration_cycles == 0 || p <= 0) {
        return out;
    }
    out.reserve(static_cast<std::size_t>(spec.commands_per_cycle() * spec.duration_cycles * 1.01) + 16);

    std::mt19937_64 rng(spec.seed);
    std::optional<std::geometric_distribution<std::int64_t>> gap;
    if (p < 1.0) {
        gap.emplace(p);
    }
    auto next_gap = [&] { return gap ? (*gap)(rng) : std::int64_t{0}; };

    std::vector<std::int64_t> next(spec.ports);
    for (auto& t : next) {
        t = next_gap();
    }

    std::vector<double> credit(spec.mix.size(), 0.0);
    auto next_kind = [&] {
        std::size_t best = 0;
        for (std::size_t i = 0; i < spec.mix.size(); ++i) {
            credit[i] += spec.mix[i].second;
            if (credit[i] > credit[best] + 1e-12) {
                best = i;
            }
        }
        credit[best] -= 1.0;
        return spec.mix[best].first;
    };

    std::uniform_int_distribution<FlowId> any_flow(0, spec.flows - 1);
    std::uniform_int_distribution<unsigned> any_len(1, kSegmentBytes);
    ShadowQueues shadow;

    for (;;) {
        const auto slot = static_cast<std::size_t>(std::min_element(next.begin(), next.end()) - next.begin());
        const std::int64_t t = next[slot];
        if (t >= spec.duration_cycles) {
            break;
        }
        next[slot] = t + 1 + next_gap();

        Command c;
        c.kind = next_kind();
        c.arrival_cycle = t;
        c.id = out.size();
        if (c.kind != CommandKind::Enqueue && !shadow.any()) {
            c.kind = CommandKind::Enqueue;
        }
        c.flow = c.kind == CommandKind::Enqueue ? any_flow(rng) : shadow.pick(rng);
        c.port = c.flow % spec.ports;

        switch (c.kind) {
            case CommandKind::Enqueue:
                c.seg_len = kSegmentBytes;
                c.eop = true;
                shadow.push_packet(c.flow, 1);
                break;
            case CommandKind::Dequeue:
                shadow.pop_segment(c.flow);
                break;
            case CommandKind::Delete:
                c.scope = DeleteScope::Packet;
                shadow.pop_packet(c.flow);
                break;
            case CommandKind::OverwriteLen:
                c.seg_len = static_cast<std::uint8_t>(any_len(rng));
                break;
            case CommandKind::AppendHead:
            case CommandKind::AppendTail:
                c.seg_len = static_cast<std::uint8_t>(any_len(rng));
                shadow.grow_head(c.flow);
                break;
            case CommandKind::Move:
            case CommandKind::OverwriteLenAndMove:
            case CommandKind::OverwriteAndMove: {
                const unsigned per_port = (spec.flows - 1 - c.port) / spec.ports;
                std::uniform_int_distribution<unsigned> k(0, per_port);
                c.dst = c.port + spec.ports * k(rng);
                if (c.kind == CommandKind::OverwriteLenAndMove) {
                    c.seg_len = static_cast<std::uint8_t>(any_len(rng));
                }
                if (c.dst != c.flow) {
                    shadow.push_packet(c.dst, shadow.pop_packet(c.flow));
                }
                break;
            }
            default:
                break;
        }
        if (needs_payload(c.kind)) {
            c.payload = random_payload(rng);
        }
        out.push_back(std::move(c));
    }
    return out;
}

double measured_offered_gbps(std::span<const Command> stream, std::int64_t duration_cycles,
                             double core_clock_mhz) {
    if (duration_cycles <= 0) {
        return 0.0;
    }
    const double seconds = static_cast<double>(duration_cycles) / (core_clock_mhz * 1e6);
    return static_cast<double>(stream.size()) * static_cast<double>(kSegmentBytes * 8) / seconds / 1e9;
}

}  // namespace npqsim
