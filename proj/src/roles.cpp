#include "wsn/roles.hpp"

#include <algorithm>

namespace wsn {

NodeId pick_cic_winner(std::span<const Candidate> candidates) {
    NodeId best = kNoNode;
    Micro best_energy = 0;
    std::uint32_t best_degree = 0;
    for (const Candidate& c : candidates) {
        bool better = false;
        if (best == kNoNode) {
            better = true;
        } else if (c.energy != best_energy) {
            better = c.energy > best_energy;
        } else if (c.degree != best_degree) {
            better = c.degree > best_degree;
        } else {
            better = c.id < best;
        }
        if (better) {
            best = c.id;
            best_energy = c.energy;
            best_degree = c.degree;
        }
    }
    return best;
}

NodeId pick_sic_winner(std::span<const Candidate> candidates) {
    NodeId best = kNoNode;
    Micro best_energy = 0;
    for (const Candidate& c : candidates) {
        bool better = false;
        if (best == kNoNode) {
            better = true;
        } else if (c.energy != best_energy) {
            better = c.energy > best_energy;
        } else {
            better = c.id < best;
        }
        if (better) {
            best = c.id;
            best_energy = c.energy;
        }
    }
    return best;
}

NodeId pick_sm_winner(std::span<const SmCandidate> candidates) {
    NodeId best = kNoNode;
    double best_d2 = 0.0;
    for (const SmCandidate& c : candidates) {
        bool better = false;
        if (best == kNoNode) {
            better = true;
        } else if (c.dist2_to_cic != best_d2) {
            better = c.dist2_to_cic < best_d2;
        } else {
            better = c.id < best;
        }
        if (better) {
            best = c.id;
            best_d2 = c.dist2_to_cic;
        }
    }
    return best;
}

std::vector<Sector> form_sectors(const NeighborGraph& graph, std::span<const NodeId> sics_in_order,
                                 std::span<const NodeId> claimable) {
    std::vector<NodeId> pool(claimable.begin(), claimable.end());
    std::sort(pool.begin(), pool.end());
    std::vector<Sector> sectors;
    sectors.reserve(sics_in_order.size());
    for (NodeId sic : sics_in_order) {
        Sector s;
        s.sic = sic;
        for (NodeId n : graph.neighbors(sic)) {
            auto it = std::lower_bound(pool.begin(), pool.end(), n);
            if (it != pool.end() && *it == n) {
                s.members.push_back(n);
                pool.erase(it);
            }
        }
        sectors.push_back(std::move(s));
    }
    return sectors;
}

const char* rotation_trigger_name(RotationTrigger t) {
    switch (t) {
        case RotationTrigger::None: return "none";
        case RotationTrigger::LowEnergy: return "low_energy";
        case RotationTrigger::Dominated: return "dominated";
        case RotationTrigger::HolderLost: return "holder_lost";
    }
    return "?";
}

}  // namespace wsn
