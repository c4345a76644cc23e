#pragma once

#include <array>
#include <cstdint>

#include "wsn/types.hpp"

namespace wsn {

// Periodic duty cycle: node is awake at tick t iff (t mod period) falls in
// [wake_offset, wake_offset + wake_len). Windows do not wrap:
// wake_offset + wake_len <= period is a config invariant.
struct SleepSchedule {
    SimTime period = 1;
    SimTime wake_offset = 0;
    SimTime wake_len = 1;

    bool awake_at(SimTime t) const {
        const SimTime phase = t % period;
        return phase >= wake_offset && phase < wake_offset + wake_len;
    }
    bool always_awake() const { return wake_len == period; }
    bool operator==(const SleepSchedule&) const = default;
};

// Number of awake ticks in [0, x); closed form, exact.
SimTime awake_ticks_before(const SleepSchedule& s, SimTime x);
// Number of awake ticks in [a, b).
SimTime awake_ticks_in(const SleepSchedule& s, SimTime a, SimTime b);

struct CostTable {
    Micro transmit = 0;     // per packet sent
    Micro receive = 0;      // per packet received
    Micro sense = 0;        // per data sample produced
    Micro idle_listen = 0;  // per awake tick
    Micro sleep = 0;        // per asleep tick
    Micro detect = 0;       // per packet processed by SM/CIC detection
};

enum class EnergyAction : std::uint8_t { Transmit, Receive, Sense, IdleListen, Sleep, Detect };
inline constexpr std::size_t kEnergyActionCount = 6;
const char* energy_action_name(EnergyAction a);

// Residual = initial - sum(consumed); clamps at zero on death. Residual never
// increases and the per-action breakdown keeps conservation exact.
struct EnergyState {
    Micro initial = 0;
    Micro residual = 0;
    std::array<Micro, kEnergyActionCount> consumed{};

    Micro total_consumed() const {
        Micro t = 0;
        for (Micro c : consumed) t += c;
        return t;
    }

    // Returns true when this charge drove residual to zero (node death).
    // On death only the affordable remainder is booked, so
    // initial - residual == total_consumed() stays exact.
    bool charge(EnergyAction a, Micro amount);
};

// Expected-energy curve of a node class assuming it only follows its duty
// cycle: expected(t) = nominal_initial - floor(t * per_period_cost / period).
struct BaselineClass {
    Micro nominal_initial = 0;
    SleepSchedule schedule;
};

Micro expected_residual(const BaselineClass& b, const CostTable& costs, SimTime t);

// Suspicion threshold Th_RE(t) = margin * expected(t), margin in ppm.
Micro threshold_re(const BaselineClass& b, const CostTable& costs, std::int64_t margin_ppm, SimTime t);

// Duty-cycle cost over [a, b) for a node on schedule `s`; nodes without a
// schedule idle-listen every tick, administratively sleeping nodes pay the
// sleep rate every tick.
Micro duty_cost(const SleepSchedule& s, const CostTable& costs, SimTime a, SimTime b);

}  // namespace wsn
