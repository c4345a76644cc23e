#include "wsn/types.hpp"

#include <cmath>

namespace wsn {

Micro to_micro(double units) {
    return static_cast<Micro>(std::llround(units * static_cast<double>(kMicroPerUnit)));
}

double to_units(Micro m) {
    return static_cast<double>(m) / static_cast<double>(kMicroPerUnit);
}

int role_layer(Role r) {
    switch (r) {
        case Role::LeafNode: return 1;
        case Role::SectorMonitor:
        case Role::SectorInCharge: return 2;
        case Role::ClusterInCharge: return 3;
        case Role::SinkGateway: return 4;
    }
    return 0;
}

const char* role_name(Role r) {
    switch (r) {
        case Role::LeafNode: return "LN";
        case Role::SectorMonitor: return "SM";
        case Role::SectorInCharge: return "SIC";
        case Role::ClusterInCharge: return "CIC";
        case Role::SinkGateway: return "SG";
    }
    return "?";
}

bool role_from_name(std::string_view s, Role& out) {
    if (s == "LN") { out = Role::LeafNode; return true; }
    if (s == "SM") { out = Role::SectorMonitor; return true; }
    if (s == "SIC") { out = Role::SectorInCharge; return true; }
    if (s == "CIC") { out = Role::ClusterInCharge; return true; }
    if (s == "SG") { out = Role::SinkGateway; return true; }
    return false;
}

const char* packet_kind_name(PacketKind k) {
    switch (k) {
        case PacketKind::Query: return "QUERY";
        case PacketKind::StatusResponse: return "STATUS_RESPONSE";
        case PacketKind::StatusProfile: return "STATUS_PROFILE";
        case PacketKind::DataRequest: return "DATA_REQUEST";
        case PacketKind::Data: return "DATA";
        case PacketKind::SleepSignal: return "SLEEP_SIGNAL";
        case PacketKind::FakeRequest: return "FAKE_REQUEST";
    }
    return "?";
}

bool packet_kind_from_name(std::string_view s, PacketKind& out) {
    if (s == "QUERY") { out = PacketKind::Query; return true; }
    if (s == "STATUS_RESPONSE") { out = PacketKind::StatusResponse; return true; }
    if (s == "STATUS_PROFILE") { out = PacketKind::StatusProfile; return true; }
    if (s == "DATA_REQUEST") { out = PacketKind::DataRequest; return true; }
    if (s == "DATA") { out = PacketKind::Data; return true; }
    if (s == "SLEEP_SIGNAL") { out = PacketKind::SleepSignal; return true; }
    if (s == "FAKE_REQUEST") { out = PacketKind::FakeRequest; return true; }
    return false;
}

const char* tag_name(Tag t) {
    switch (t) {
        case Tag::Untagged: return "UNTAGGED";
        case Tag::Valid: return "VALID";
        case Tag::Invalid: return "INVALID";
    }
    return "?";
}

bool tag_from_name(std::string_view s, Tag& out) {
    if (s == "UNTAGGED") { out = Tag::Untagged; return true; }
    if (s == "VALID") { out = Tag::Valid; return true; }
    if (s == "INVALID") { out = Tag::Invalid; return true; }
    return false;
}

const char* phase1_reason_name(Phase1Reason r) {
    switch (r) {
        case Phase1Reason::None: return "NONE";
        case Phase1Reason::RateExceeded: return "RATE_EXCEEDED";
        case Phase1Reason::SleepViolation: return "SLEEP_VIOLATION";
    }
    return "?";
}

bool phase1_reason_from_name(std::string_view s, Phase1Reason& out) {
    if (s == "NONE") { out = Phase1Reason::None; return true; }
    if (s == "RATE_EXCEEDED") { out = Phase1Reason::RateExceeded; return true; }
    if (s == "SLEEP_VIOLATION") { out = Phase1Reason::SleepViolation; return true; }
    return false;
}

const char* phase2_decision_name(Phase2Decision d) {
    return d == Phase2Decision::Forward ? "FORWARD" : "DROP";
}

}  // namespace wsn
