#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "wsn/energy.hpp"
#include "wsn/trace.hpp"
#include "wsn/types.hpp"

namespace wsn {

struct NodeEnergyBreakdown {
    Micro initial = 0;
    Micro residual = 0;
    std::array<Micro, kEnergyActionCount> consumed{};

    Micro total() const {
        Micro t = 0;
        for (Micro c : consumed) t += c;
        return t;
    }
};

// Everything below is derived from a finished trace; nothing reaches into the
// simulator. "Protocol nodes" excludes the gateway and attacker nodes, so
// lifetime numbers describe the sensing population the network exists for.
struct RunMetrics {
    std::string scenario;
    std::uint64_t seed = 0;
    bool detection = true;
    std::uint64_t config_hash = 0;
    SimTime end_tick = 0;
    std::string end_reason;

    std::uint32_t protocol_nodes = 0;
    std::uint32_t deaths = 0;                 // protocol-node deaths
    std::optional<SimTime> first_death;       // unset = censored at end_tick
    std::optional<SimTime> half_dead;         // first tick with 2*deaths >= population

    std::uint64_t packets_sent = 0;
    std::uint64_t deliveries_ok = 0;
    std::uint64_t deliveries_failed = 0;      // dead / asleep / isolated endpoints
    std::uint64_t drops_no_route = 0;
    std::uint64_t data_to_gateway = 0;        // DATA packets landing on the sink

    std::uint32_t phase1_invalid = 0;
    std::uint32_t phase2_confirmed = 0;

    // Ground truth: resolved attack victims (plan targets). Picker specs that
    // never resolved have no victim and are excluded.
    std::map<NodeId, SimTime> victim_first_fire;  // victim -> first fire tick
    std::map<NodeId, SimTime> isolated;           // node -> isolation tick
    std::uint32_t true_positives = 0;   // isolated and a victim
    std::uint32_t false_positives = 0;  // isolated, never a victim
    std::uint32_t false_negatives = 0;  // victim, never isolated
    // Per true positive: isolation tick minus first fire at that victim.
    std::map<NodeId, SimTime> detection_latency;

    std::map<NodeId, NodeEnergyBreakdown> node_energy;
    std::array<Micro, kEnergyActionCount> consumed_by_action{};
    Micro consumed_total = 0;
    std::map<std::string, Micro> consumed_by_class;

    // First protocol death, censored at the end tick when nobody died.
    SimTime lifetime() const { return first_death.value_or(end_tick); }
    std::optional<double> mean_detection_latency() const;

    // Throws std::runtime_error on a truncated trace (no END line).
    static RunMetrics from_trace(const TraceLog& trace);

    std::string to_kv() const;  // one key=value per line, stable order

    static std::string csv_header();
    std::string csv_row() const;
};

// Detection-on vs detection-off view of the same scenario and seed. Throws
// when the two runs disagree on the config hash.
struct PairComparison {
    SimTime lifetime_on = 0;
    SimTime lifetime_off = 0;
    std::int64_t lifetime_gain = 0;  // on - off, positive = detection helped
    std::uint32_t true_positives = 0;
    std::uint32_t false_positives = 0;
    std::uint32_t false_negatives = 0;
    std::optional<double> mean_detection_latency;
};

PairComparison compare_runs(const RunMetrics& on, const RunMetrics& off);

}  // namespace wsn
