#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wsn/topology.hpp"
#include "wsn/types.hpp"

namespace wsn {

struct Candidate {
    NodeId id = kNoNode;
    Micro energy = 0;
    std::uint32_t degree = 0;
};

// One held election. `candidates` is the full eligible list the winner was
// picked from, in ascending id order, so the choice can be audited later
// straight from the trace.
struct ElectionRecord {
    SimTime tick = 0;
    Role role = Role::LeafNode;
    NodeId winner = kNoNode;
    NodeId context = kNoNode;  // SG for CIC, CIC for SIC and SM elections
    std::vector<Candidate> candidates;
};

// CIC rule: lexicographic max of (residual energy, degree), lowest id on a
// full tie. Returns kNoNode on an empty candidate list (network-halt).
NodeId pick_cic_winner(std::span<const Candidate> candidates);

// SIC rule: max residual energy, lowest id on ties.
NodeId pick_sic_winner(std::span<const Candidate> candidates);

struct SmCandidate {
    NodeId id = kNoNode;
    double dist2_to_cic = 0.0;
};

// SM rule: sector member adjacent to the CIC minimizing distance to it,
// lowest id on ties.
NodeId pick_sm_winner(std::span<const SmCandidate> candidates);

struct Sector {
    NodeId sic = kNoNode;
    NodeId sm = kNoNode;               // kNoNode => degraded sector, no monitor
    std::vector<NodeId> members;       // excludes the SIC itself, sorted
};

// Greedy sector formation: each SIC, in election order, claims the still
// unclaimed nodes of `claimable` inside its neighborhood.
std::vector<Sector> form_sectors(const NeighborGraph& graph, std::span<const NodeId> sics_in_order,
                                 std::span<const NodeId> claimable);

enum class RotationTrigger : std::uint8_t {
    None,
    LowEnergy,   // holder residual < 0.5 x cluster mean
    Dominated,   // an eligible candidate now beats the holder under the rule
    HolderLost,  // holder dead or isolated
};

const char* rotation_trigger_name(RotationTrigger t);

}  // namespace wsn
