#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wsn/energy.hpp"
#include "wsn/packet.hpp"
#include "wsn/types.hpp"

namespace wsn {

// Per-origin arrival history over a sliding window of W ticks. A packet at
// tick t counts arrivals with tick in (t - W, t], itself included.
class SlidingCounter {
public:
    explicit SlidingCounter(SimTime window) : window_(window) {}

    // Records an arrival and returns the count now inside the window.
    std::uint32_t record(SimTime tick);
    // Count without recording.
    std::uint32_t count_at(SimTime tick) const;
    SimTime window() const { return window_; }

private:
    void evict(SimTime tick);

    SimTime window_;
    mutable std::deque<SimTime> ticks_;
};

struct DetectionParams {
    std::uint32_t rate_threshold = 10;  // max packets per window before flag
    SimTime window = 20;
    std::uint32_t energy_margin_ppm = 800000;  // Th_RE = margin x expected
    std::uint32_t corroboration = 3;           // cluster-wide invalids for rule C
};

struct Phase1Verdict {
    Tag tag = Tag::Valid;
    Phase1Reason reason = Phase1Reason::None;
    bool suspected = false;
};

// Monitor-side classification. `window_count` already includes this packet.
// Sleep violation wins over rate when both hold.
Phase1Verdict phase1_classify(const Packet& pkt, std::uint32_t window_count,
                              const SleepSchedule& sender_schedule, const DetectionParams& params);

// Suspicion applies to invalid packets only: sender residual strictly below
// the expected-residual threshold for its class at creation time.
bool phase1_suspect(const Packet& pkt, const BaselineClass& baseline, const CostTable& costs,
                    const DetectionParams& params);

struct Phase2Verdict {
    Phase2Decision decision = Phase2Decision::Forward;
    bool confirmed = false;
    std::uint32_t cluster_invalids = 0;
};

// Cluster-head decision over a tagged packet. `cluster_invalids` counts
// invalid arrivals across the whole cluster inside the window, this packet
// included. Confirmation needs phase-1 suspicion plus corroboration, except
// a sleep violation confirms on its own.
Phase2Verdict phase2_decide(const Packet& pkt, std::uint32_t cluster_invalids,
                            const DetectionParams& params);

// Gateway-held set of confirmed attackers. Isolated nodes stop originating
// and everything from or to them is dropped.
class IsolationList {
public:
    // Returns false if already present.
    bool add(NodeId id, SimTime tick);
    bool contains(NodeId id) const;
    std::size_t size() const { return added_at_.size(); }
    const std::unordered_map<NodeId, SimTime>& entries() const { return added_at_; }

private:
    std::unordered_map<NodeId, SimTime> added_at_;
};

}  // namespace wsn
