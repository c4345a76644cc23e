#include "wsn/attacker.hpp"

#include <stdexcept>

namespace wsn {

const char* attack_mode_name(AttackMode m) {
    switch (m) {
        case AttackMode::SleepTargeted: return "SLEEP_TARGETED";
        case AttackMode::Blind: return "BLIND";
    }
    return "?";
}

AttackMode attack_mode_from_name(const std::string& name) {
    if (name == "SLEEP_TARGETED") return AttackMode::SleepTargeted;
    if (name == "BLIND") return AttackMode::Blind;
    throw std::invalid_argument("unknown attack mode: " + name);
}

}  // namespace wsn
