#include "wsn/energy.hpp"

#include <algorithm>
#include <cassert>

namespace wsn {

const char* energy_action_name(EnergyAction a) {
    switch (a) {
        case EnergyAction::Transmit: return "tx";
        case EnergyAction::Receive: return "rx";
        case EnergyAction::Sense: return "sense";
        case EnergyAction::IdleListen: return "idle";
        case EnergyAction::Sleep: return "sleep";
        case EnergyAction::Detect: return "detect";
    }
    return "?";
}

SimTime awake_ticks_before(const SleepSchedule& s, SimTime x) {
    const SimTime full = x / s.period;
    const SimTime rem = x % s.period;
    SimTime partial = 0;
    if (rem > s.wake_offset) {
        partial = std::min(rem - s.wake_offset, s.wake_len);
    }
    return full * s.wake_len + partial;
}

SimTime awake_ticks_in(const SleepSchedule& s, SimTime a, SimTime b) {
    assert(b >= a);
    return awake_ticks_before(s, b) - awake_ticks_before(s, a);
}

bool EnergyState::charge(EnergyAction a, Micro amount) {
    assert(amount >= 0);
    const auto idx = static_cast<std::size_t>(a);
    if (amount >= residual) {
        consumed[idx] += residual;
        residual = 0;
        return true;
    }
    consumed[idx] += amount;
    residual -= amount;
    return false;
}

Micro expected_residual(const BaselineClass& b, const CostTable& costs, SimTime t) {
    const SleepSchedule& s = b.schedule;
    const Micro per_period = static_cast<Micro>(s.wake_len) * costs.idle_listen +
                             static_cast<Micro>(s.period - s.wake_len) * costs.sleep;
    const Micro drained = static_cast<Micro>(static_cast<__int128>(t) * per_period / s.period);
    const Micro expected = b.nominal_initial - drained;
    return expected > 0 ? expected : 0;
}

Micro threshold_re(const BaselineClass& b, const CostTable& costs, std::int64_t margin_ppm, SimTime t) {
    const Micro expected = expected_residual(b, costs, t);
    return static_cast<Micro>(static_cast<__int128>(expected) * margin_ppm / 1'000'000);
}

Micro duty_cost(const SleepSchedule& s, const CostTable& costs, SimTime a, SimTime b) {
    const SimTime awake = awake_ticks_in(s, a, b);
    const SimTime asleep = (b - a) - awake;
    return static_cast<Micro>(awake) * costs.idle_listen + static_cast<Micro>(asleep) * costs.sleep;
}

}  // namespace wsn
