#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "wsn/packet.hpp"
#include "wsn/types.hpp"

namespace wsn {

enum class EventKind : std::uint8_t {
    PacketDelivery,
    ElectionTick,
    AttackerFire,
    MetricsSample,
    RoundStart,
    DeathCheck,
    NodeArrival,
    DiscoveryDecision,
};

struct DeliveryPayload {
    Packet packet;
    NodeId from = kNoNode;
    NodeId to = kNoNode;
};

struct AttackerFirePayload {
    std::size_t plan_index = 0;
};

struct DeathCheckPayload {
    NodeId node = kNoNode;
    std::uint64_t generation = 0;  // stale checks are ignored
};

struct NodeArrivalPayload {
    NodeId node = kNoNode;
};

struct EmptyPayload {};

using EventPayload = std::variant<EmptyPayload, DeliveryPayload, AttackerFirePayload,
                                  DeathCheckPayload, NodeArrivalPayload>;

struct Event {
    SimTime at = 0;
    std::uint64_t seq = 0;  // insertion counter, breaks same-tick ties
    EventKind kind = EventKind::PacketDelivery;
    EventPayload payload;
};

// Deterministic event queue: total dispatch order is (at, seq).
// Scheduling into the past signals a logic bug and throws.
class EventQueue {
public:
    std::uint64_t schedule(SimTime now, SimTime at, EventKind kind, EventPayload payload = EmptyPayload{}) {
        if (at < now) {
            throw std::logic_error("event scheduled before current clock");
        }
        Event ev;
        ev.at = at;
        const std::uint64_t seq = next_seq_++;
        ev.seq = seq;
        ev.kind = kind;
        ev.payload = std::move(payload);
        queue_.push(std::move(ev));
        return seq;
    }

    bool empty() const { return queue_.empty(); }
    const Event& peek() const { return queue_.top(); }

    Event pop() {
        Event ev = queue_.top();
        queue_.pop();
        return ev;
    }

    std::uint64_t scheduled_count() const { return next_seq_; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t next_seq_ = 0;
};

// splitmix64: sub-seed derivation so every module stream hangs off the one
// config seed.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream_name);

// Tiny deterministic generator. std::uniform_real_distribution is
// implementation defined, so uniform() builds doubles from raw bits instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    double uniform();  // [0, 1)

private:
    std::uint64_t state_;
};

}  // namespace wsn
