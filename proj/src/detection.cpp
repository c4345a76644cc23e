#include "wsn/detection.hpp"

namespace wsn {

void SlidingCounter::evict(SimTime tick) {
    if (tick < window_) return;  // window floor below zero, everything counts
    const SimTime cutoff = tick - window_;
    // keep ticks strictly greater than cutoff: (t - W, t]
    while (!ticks_.empty() && ticks_.front() <= cutoff) {
        ticks_.pop_front();
    }
}

std::uint32_t SlidingCounter::record(SimTime tick) {
    evict(tick);
    ticks_.push_back(tick);
    return static_cast<std::uint32_t>(ticks_.size());
}

std::uint32_t SlidingCounter::count_at(SimTime tick) const {
    std::uint32_t n = 0;
    for (SimTime t : ticks_) {
        if (tick < window_ || t > tick - window_) ++n;
    }
    return n;
}

Phase1Verdict phase1_classify(const Packet& pkt, std::uint32_t window_count,
                              const SleepSchedule& sender_schedule, const DetectionParams& params) {
    Phase1Verdict v;
    const bool slept_through = !sender_schedule.awake_at(pkt.created_at);
    const bool too_fast = window_count > params.rate_threshold;
    if (slept_through) {
        v.tag = Tag::Invalid;
        v.reason = Phase1Reason::SleepViolation;
    } else if (too_fast) {
        v.tag = Tag::Invalid;
        v.reason = Phase1Reason::RateExceeded;
    }
    return v;
}

bool phase1_suspect(const Packet& pkt, const BaselineClass& baseline, const CostTable& costs,
                    const DetectionParams& params) {
    if (pkt.tag != Tag::Invalid) return false;
    const Micro bar = threshold_re(baseline, costs, params.energy_margin_ppm, pkt.created_at);
    return pkt.sender_residual < bar;
}

Phase2Verdict phase2_decide(const Packet& pkt, std::uint32_t cluster_invalids,
                            const DetectionParams& params) {
    Phase2Verdict v;
    v.cluster_invalids = cluster_invalids;
    if (pkt.tag != Tag::Invalid) return v;
    const bool corroborated = cluster_invalids >= params.corroboration;
    if (pkt.suspected && (corroborated || pkt.reason == Phase1Reason::SleepViolation)) {
        v.confirmed = true;
        v.decision = Phase2Decision::Drop;
    }
    return v;
}

bool IsolationList::add(NodeId id, SimTime tick) {
    return added_at_.emplace(id, tick).second;
}

bool IsolationList::contains(NodeId id) const {
    return added_at_.find(id) != added_at_.end();
}

}  // namespace wsn
