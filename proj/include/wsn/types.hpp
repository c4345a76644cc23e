#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace wsn {

// Node handle: index into the simulation's node table. Human-readable names
// live in the config / trace layer.
using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Simulation time in integer ticks (1 tick = 1 abstract time unit).
using SimTime = std::uint64_t;

// Energy in integer micro-units. All internal accounting is integral so
// conservation checks are exact; configs accept decimal units.
using Micro = std::int64_t;
inline constexpr Micro kMicroPerUnit = 1'000'000;

Micro to_micro(double units);
double to_units(Micro m);

// Network roles, lowest layer first.
enum class Role : std::uint8_t {
    LeafNode,         // layer 1, senses only, detection power null
    SectorMonitor,    // layer 2, phase-1 anomaly detector
    SectorInCharge,   // layer 2, collects sensing data for its sector
    ClusterInCharge,  // layer 3, final intrusion decision
    SinkGateway,      // layer 4, gateway + isolation list owner
};

int role_layer(Role r);
const char* role_name(Role r);
bool role_from_name(std::string_view s, Role& out);

enum class PacketKind : std::uint8_t {
    Query,
    StatusResponse,
    StatusProfile,
    DataRequest,
    Data,
    SleepSignal,
    FakeRequest,
};

const char* packet_kind_name(PacketKind k);
bool packet_kind_from_name(std::string_view s, PacketKind& out);

// Phase-1 tag. Set exactly once per packet: by the sector monitor, or
// conservatively at the CIC when the packet never passed one.
enum class Tag : std::uint8_t { Untagged, Valid, Invalid };

const char* tag_name(Tag t);
bool tag_from_name(std::string_view s, Tag& out);

enum class Phase1Reason : std::uint8_t { None, RateExceeded, SleepViolation };

const char* phase1_reason_name(Phase1Reason r);
bool phase1_reason_from_name(std::string_view s, Phase1Reason& out);

enum class Phase2Decision : std::uint8_t { Forward, Drop };

const char* phase2_decision_name(Phase2Decision d);

}  // namespace wsn
