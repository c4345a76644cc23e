#pragma once

#include <string>

#include "wsn/types.hpp"

namespace wsn {

enum class AttackMode : std::uint8_t {
    SleepTargeted,  // fire only when the victim will be asleep at delivery
    Blind,          // fire every period regardless of victim state
};

const char* attack_mode_name(AttackMode m);
AttackMode attack_mode_from_name(const std::string& name);

// One fake-request campaign. `target_spec` is a numeric node id or the token
// "@sectored_leaf" (lowest-id layer-1 node inside a monitored sector), which
// gets resolved to `target` after the first discovery round.
struct AttackPlan {
    NodeId attacker = kNoNode;
    std::string target_spec;
    NodeId target = kNoNode;
    AttackMode mode = AttackMode::SleepTargeted;
    SimTime start = 0;
    SimTime period = 1;
    std::uint32_t shots = 0;  // 0 = keep firing until the horizon
    std::uint32_t fired = 0;

    bool exhausted() const { return shots != 0 && fired >= shots; }
};

}  // namespace wsn
