#pragma once

#include <cstdint>

#include "wsn/types.hpp"

namespace wsn {

// A logical packet. The same packet object is carried hop by hop toward the
// sink; per-hop addressing lives in the delivery events, `origin` stays fixed.
// `sender_residual` is stamped once, when the origin transmits.
struct Packet {
    std::uint64_t id = 0;
    PacketKind kind = PacketKind::Data;
    NodeId origin = kNoNode;    // first sender, fixed for the packet's lifetime
    NodeId final_dst = kNoNode;  // kNoNode = broadcast
    SimTime created_at = 0;
    Micro sender_residual = 0;
    Tag tag = Tag::Untagged;
    std::uint32_t size = 1;    // abstract payload units
    Phase1Reason reason = Phase1Reason::None;  // set with the tag
    bool suspected = false;                    // phase-1 suspicion, travels to CIC
    // Intrusion report piggybacked on a CIC -> SG status response.
    NodeId report_target = kNoNode;
};

}  // namespace wsn
