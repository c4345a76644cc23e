#include "wsn/metrics.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace wsn {

std::optional<double> RunMetrics::mean_detection_latency() const {
    if (detection_latency.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& [node, lat] : detection_latency) sum += static_cast<double>(lat);
    return sum / static_cast<double>(detection_latency.size());
}

RunMetrics RunMetrics::from_trace(const TraceLog& trace) {
    const auto& events = trace.events();
    if (events.empty() || events.back().kind != TraceKind::End) {
        throw std::runtime_error("trace truncated: no END record");
    }

    RunMetrics m;
    m.scenario = trace.meta.scenario;
    m.seed = trace.meta.seed;
    m.detection = trace.meta.detection;
    m.config_hash = trace.meta.config_hash;
    m.end_tick = events.back().tick;
    m.end_reason = events.back().get("reason");

    std::set<NodeId> protocol;
    std::map<NodeId, std::string> node_class;
    for (const NodeMeta& n : trace.meta.nodes) {
        node_class[n.id] = n.cls;
        if (n.id != trace.meta.gateway && !n.attacker) protocol.insert(n.id);
    }
    m.protocol_nodes = static_cast<std::uint32_t>(protocol.size());

    for (const TraceEvent& ev : events) {
        switch (ev.kind) {
            case TraceKind::Send:
                ++m.packets_sent;
                break;
            case TraceKind::Deliver: {
                if (ev.get("status") == deliver_status_name(DeliverStatus::Ok)) {
                    ++m.deliveries_ok;
                    if (ev.actor == trace.meta.gateway &&
                        ev.get("kind") == packet_kind_name(PacketKind::Data)) {
                        ++m.data_to_gateway;
                    }
                } else {
                    ++m.deliveries_failed;
                }
                break;
            }
            case TraceKind::Drop:
                ++m.drops_no_route;
                break;
            case TraceKind::Phase1:
                if (ev.get("tag") == tag_name(Tag::Invalid)) ++m.phase1_invalid;
                break;
            case TraceKind::Phase2:
                if (ev.get("confirmed") == "1") ++m.phase2_confirmed;
                break;
            case TraceKind::AttackFire: {
                const NodeId target = static_cast<NodeId>(ev.get_u64("target"));
                m.victim_first_fire.try_emplace(target, ev.tick);
                break;
            }
            case TraceKind::Isolate: {
                const NodeId node = static_cast<NodeId>(ev.get_u64("node"));
                m.isolated.try_emplace(node, ev.tick);
                break;
            }
            case TraceKind::Death: {
                if (!protocol.contains(ev.actor)) break;
                ++m.deaths;
                if (!m.first_death) m.first_death = ev.tick;
                if (!m.half_dead && 2 * m.deaths >= m.protocol_nodes) m.half_dead = ev.tick;
                break;
            }
            case TraceKind::Energy: {
                NodeEnergyBreakdown e;
                e.initial = ev.get_i64("initial");
                e.residual = ev.get_i64("res");
                for (std::size_t i = 0; i < kEnergyActionCount; ++i) {
                    e.consumed[i] = ev.get_i64(energy_action_name(static_cast<EnergyAction>(i)));
                    m.consumed_by_action[i] += e.consumed[i];
                }
                m.consumed_total += e.total();
                m.consumed_by_class[node_class[ev.actor]] += e.total();
                m.node_energy.emplace(ev.actor, e);
                break;
            }
            default:
                break;
        }
    }

    for (const auto& [node, tick] : m.isolated) {
        const auto hit = m.victim_first_fire.find(node);
        if (hit == m.victim_first_fire.end()) {
            ++m.false_positives;
        } else {
            ++m.true_positives;
            m.detection_latency[node] = tick >= hit->second ? tick - hit->second : 0;
        }
    }
    for (const auto& [node, tick] : m.victim_first_fire) {
        if (!m.isolated.contains(node)) ++m.false_negatives;
    }
    return m;
}

std::string RunMetrics::to_kv() const {
    std::ostringstream out;
    auto opt_tick = [](const std::optional<SimTime>& t) {
        return t ? std::to_string(*t) : std::string("-");
    };
    out << "scenario=" << scenario << '\n';
    out << "seed=" << seed << '\n';
    out << "detection=" << (detection ? 1 : 0) << '\n';
    out << "end_tick=" << end_tick << '\n';
    out << "end_reason=" << end_reason << '\n';
    out << "protocol_nodes=" << protocol_nodes << '\n';
    out << "deaths=" << deaths << '\n';
    out << "first_death=" << opt_tick(first_death) << '\n';
    out << "half_dead=" << opt_tick(half_dead) << '\n';
    out << "lifetime=" << lifetime() << '\n';
    out << "packets_sent=" << packets_sent << '\n';
    out << "deliveries_ok=" << deliveries_ok << '\n';
    out << "deliveries_failed=" << deliveries_failed << '\n';
    out << "drops_no_route=" << drops_no_route << '\n';
    out << "data_to_gateway=" << data_to_gateway << '\n';
    out << "phase1_invalid=" << phase1_invalid << '\n';
    out << "phase2_confirmed=" << phase2_confirmed << '\n';
    out << "victims=" << victim_first_fire.size() << '\n';
    out << "isolated=" << isolated.size() << '\n';
    out << "tp=" << true_positives << '\n';
    out << "fp=" << false_positives << '\n';
    out << "fn=" << false_negatives << '\n';
    const auto lat = mean_detection_latency();
    out << "mean_detection_latency=" << (lat ? format_double(*lat) : "-") << '\n';
    for (const auto& [node, l] : detection_latency) {
        out << "latency_node_" << node << '=' << l << '\n';
    }
    out << "consumed_total=" << consumed_total << '\n';
    for (std::size_t i = 0; i < kEnergyActionCount; ++i) {
        out << "consumed_" << energy_action_name(static_cast<EnergyAction>(i)) << '='
            << consumed_by_action[i] << '\n';
    }
    for (const auto& [cls, total] : consumed_by_class) {
        out << "consumed_class_" << cls << '=' << total << '\n';
    }
    return out.str();
}

std::string RunMetrics::csv_header() {
    return "scenario,seed,detection,end_tick,lifetime,first_death,half_dead,deaths,"
           "packets_sent,deliveries_ok,deliveries_failed,drops_no_route,data_to_gateway,"
           "phase1_invalid,phase2_confirmed,victims,isolated,tp,fp,fn,"
           "mean_detection_latency,consumed_total";
}

std::string RunMetrics::csv_row() const {
    std::ostringstream out;
    auto opt_tick = [](const std::optional<SimTime>& t) {
        return t ? std::to_string(*t) : std::string();
    };
    const auto lat = mean_detection_latency();
    out << scenario << ',' << seed << ',' << (detection ? 1 : 0) << ',' << end_tick << ','
        << lifetime() << ',' << opt_tick(first_death) << ',' << opt_tick(half_dead) << ','
        << deaths << ',' << packets_sent << ',' << deliveries_ok << ',' << deliveries_failed
        << ',' << drops_no_route << ',' << data_to_gateway << ',' << phase1_invalid << ','
        << phase2_confirmed << ',' << victim_first_fire.size() << ',' << isolated.size() << ','
        << true_positives << ',' << false_positives << ',' << false_negatives << ','
        << (lat ? format_double(*lat) : "") << ',' << consumed_total;
    return out.str();
}

PairComparison compare_runs(const RunMetrics& on, const RunMetrics& off) {
    if (on.config_hash != off.config_hash) {
        throw std::runtime_error("paired runs describe different scenarios (hash mismatch)");
    }
    if (!on.detection || off.detection) {
        throw std::runtime_error("paired comparison wants one detection-on and one -off run");
    }
    PairComparison c;
    c.lifetime_on = on.lifetime();
    c.lifetime_off = off.lifetime();
    c.lifetime_gain = static_cast<std::int64_t>(c.lifetime_on) -
                      static_cast<std::int64_t>(c.lifetime_off);
    c.true_positives = on.true_positives;
    c.false_positives = on.false_positives;
    c.false_negatives = on.false_negatives;
    c.mean_detection_latency = on.mean_detection_latency();
    return c;
}

}  // namespace wsn
