#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsn/trace.hpp"

namespace wsn {

// Replays a finished trace and re-derives every auditable decision from the
// logged inputs alone: phase-1 verdicts from arrival history plus issued
// profiles, election winners from the logged candidate keys, link use from
// node positions, and isolation containment. The simulator is never
// consulted, so a bug there cannot vouch for itself.
struct OracleReport {
    std::uint64_t phase1_checked = 0;
    std::uint64_t elections_checked = 0;
    std::uint64_t sends_checked = 0;
    std::uint64_t isolation_events = 0;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

OracleReport verify_trace(const TraceLog& trace);

}  // namespace wsn
