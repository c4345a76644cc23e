#include "wsn/replay_oracle.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include "wsn/detection.hpp"
#include "wsn/energy.hpp"
#include "wsn/topology.hpp"
#include "wsn/types.hpp"

namespace wsn {

namespace {

struct DeliverRec {
    NodeId actor = kNoNode;
    SimTime tick = 0;
    NodeId origin = kNoNode;
    SimTime created = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t end = s.find(sep, start);
        if (end == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

struct Walker {
    const TraceLog& trace;
    OracleReport report;

    std::map<std::string, const ClassMeta*> classes;
    std::map<NodeId, const NodeMeta*> nodes;

    // running state rebuilt from the lines themselves
    std::map<std::pair<NodeId, NodeId>, std::vector<SimTime>> history;  // (node, origin)
    std::map<std::uint64_t, DeliverRec> last_delivery;
    std::map<std::uint64_t, Micro> stamped_res;  // pkt -> res on its first SEND
    std::map<NodeId, std::vector<std::pair<SimTime, SleepSchedule>>> profiles;
    std::map<NodeId, std::size_t> isolated_at;  // node -> event index of ISOLATE

    explicit Walker(const TraceLog& t) : trace(t) {
        for (const ClassMeta& c : trace.meta.classes) classes[c.name] = &c;
        for (const NodeMeta& n : trace.meta.nodes) nodes[n.id] = &n;
    }

    void flag(std::size_t idx, const TraceEvent& ev, const std::string& what) {
        std::ostringstream out;
        out << "event " << idx << " tick " << ev.tick << ' ' << trace_kind_name(ev.kind) << ": "
            << what;
        report.violations.push_back(out.str());
    }

    const SleepSchedule* profile_as_of(NodeId id, SimTime t) const {
        const auto it = profiles.find(id);
        if (it == profiles.end()) return nullptr;
        const SleepSchedule* best = nullptr;
        for (const auto& [issue, sched] : it->second) {
            if (issue > t) break;
            best = &sched;
        }
        return best;
    }

    void on_send(std::size_t idx, const TraceEvent& ev) {
        const std::uint64_t pkt = ev.get_u64("pkt");
        const NodeId origin = static_cast<NodeId>(ev.get_u64("origin"));
        const Micro res = ev.get_i64("res");

        const auto iso = isolated_at.find(ev.actor);
        if (iso != isolated_at.end() && iso->second < idx) {
            flag(idx, ev, "isolated node " + std::to_string(ev.actor) + " still transmits");
        }

        const auto [it, fresh] = stamped_res.try_emplace(pkt, res);
        if (!fresh && it->second != res) {
            flag(idx, ev, "pkt " + std::to_string(pkt) + " residual stamp changed in flight");
        }
        if (fresh && ev.actor != origin) {
            flag(idx, ev, "pkt " + std::to_string(pkt) + " first sent away from its origin");
        }

        // Range discipline: every non-attacker link fits the radio radius.
        const std::string& to = ev.get("to");
        const auto sender = nodes.find(ev.actor);
        if (to != "*" && sender != nodes.end() && !sender->second->attacker) {
            ++report.sends_checked;
            const auto receiver = nodes.find(static_cast<NodeId>(std::stoul(to)));
            if (receiver == nodes.end()) {
                flag(idx, ev, "send to unknown node " + to);
            } else {
                const Position a{sender->second->x, sender->second->y};
                const Position b{receiver->second->x, receiver->second->y};
                if (dist2(a, b) > trace.meta.radius * trace.meta.radius) {
                    flag(idx, ev, "link " + std::to_string(ev.actor) + "->" + to +
                                      " exceeds the radio radius");
                }
            }
        }
    }

    void on_deliver(std::size_t idx, const TraceEvent& ev) {
        if (ev.get("status") != deliver_status_name(DeliverStatus::Ok)) return;
        const std::uint64_t pkt = ev.get_u64("pkt");
        const NodeId origin = static_cast<NodeId>(ev.get_u64("origin"));

        const auto iso = isolated_at.find(origin);
        if (iso != isolated_at.end() && iso->second < idx) {
            flag(idx, ev, "traffic from isolated origin " + std::to_string(origin) +
                              " still accepted");
        }

        if (ev.get("kind") != packet_kind_name(PacketKind::SleepSignal)) {
            history[{ev.actor, origin}].push_back(ev.tick);
        }
        last_delivery[pkt] = {ev.actor, ev.tick, origin, ev.get_u64("created")};
    }

    void on_phase1(std::size_t idx, const TraceEvent& ev) {
        ++report.phase1_checked;
        const std::uint64_t pkt = ev.get_u64("pkt");
        const NodeId origin = static_cast<NodeId>(ev.get_u64("origin"));

        const auto del = last_delivery.find(pkt);
        if (del == last_delivery.end() || del->second.actor != ev.actor ||
            del->second.tick != ev.tick) {
            flag(idx, ev, "no matching delivery for pkt " + std::to_string(pkt));
            return;
        }
        const SimTime created = del->second.created;

        // Arrival count over (tick - W, tick], this packet included.
        const SimTime window = trace.meta.detect.window;
        std::uint32_t count = 0;
        for (SimTime t : history[{ev.actor, origin}]) {
            if (ev.tick < window || t > ev.tick - window) ++count;
        }
        if (count != ev.get_u64("count")) {
            flag(idx, ev, "window count: recomputed " + std::to_string(count) + ", logged " +
                              ev.get("count"));
        }

        const auto node_it = nodes.find(origin);
        const auto cls_it = node_it != nodes.end() ? classes.find(node_it->second->cls)
                                                   : classes.end();
        if (cls_it == classes.end()) {
            flag(idx, ev, "origin " + std::to_string(origin) + " has no class record");
            return;
        }
        const ClassMeta& cls = *cls_it->second;

        // Expected verdict, re-derived. Sleep violation outranks rate.
        const SleepSchedule* sched = profile_as_of(origin, created);
        Tag tag;
        Phase1Reason reason;
        bool unprofiled = false;
        if (sched == nullptr) {
            unprofiled = true;
            tag = Tag::Invalid;
            reason = Phase1Reason::SleepViolation;
        } else if (!sched->awake_at(created)) {
            tag = Tag::Invalid;
            reason = Phase1Reason::SleepViolation;
        } else if (count > trace.meta.detect.rate_threshold) {
            tag = Tag::Invalid;
            reason = Phase1Reason::RateExceeded;
        } else {
            tag = Tag::Valid;
            reason = Phase1Reason::None;
        }

        const Micro res = ev.get_i64("res");
        const auto stamp = stamped_res.find(pkt);
        if (stamp != stamped_res.end() && stamp->second != res) {
            flag(idx, ev, "res diverges from the origin transmit stamp");
        }
        const BaselineClass base{cls.initial, cls.schedule};
        const Micro bar = threshold_re(base, trace.meta.costs,
                                       static_cast<std::int64_t>(trace.meta.detect.energy_margin_ppm),
                                       created);
        const bool susp = tag == Tag::Invalid && res < bar;

        if (ev.get("tag") != tag_name(tag)) {
            flag(idx, ev, std::string("tag: expected ") + tag_name(tag) + ", logged " +
                              ev.get("tag"));
        }
        if (ev.get("reason") != phase1_reason_name(reason)) {
            flag(idx, ev, std::string("reason: expected ") + phase1_reason_name(reason) +
                              ", logged " + ev.get("reason"));
        }
        if (ev.get("susp") != (susp ? "1" : "0")) {
            flag(idx, ev, "suspicion: expected " + std::string(susp ? "1" : "0") + ", logged " +
                              ev.get("susp"));
        }
        if (bar != ev.get_i64("bar")) {
            flag(idx, ev, "threshold: recomputed " + std::to_string(bar) + ", logged " +
                              ev.get("bar"));
        }
        if (unprofiled != (ev.find("unprofiled") != nullptr)) {
            flag(idx, ev, "unprofiled marker mismatch");
        }
    }

    void on_elect(std::size_t idx, const TraceEvent& ev) {
        ++report.elections_checked;
        const std::string& role = ev.get("role");
        const std::vector<std::string> cands = split(ev.get("cands"), ',');
        if (cands.empty() || cands.front().empty()) {
            flag(idx, ev, "election with an empty candidate list");
            return;
        }

        NodeId best = kNoNode;
        if (role == role_name(Role::ClusterInCharge)) {
            Micro be = 0;
            std::uint64_t bd = 0;
            NodeId prev = 0;
            bool first = true;
            for (const std::string& c : cands) {
                const std::vector<std::string> parts = split(c, ':');
                if (parts.size() != 3) {
                    flag(idx, ev, "malformed head candidate '" + c + "'");
                    return;
                }
                const NodeId id = static_cast<NodeId>(std::stoul(parts[0]));
                const Micro e = std::stoll(parts[1]);
                const std::uint64_t d = std::stoull(parts[2]);
                if (!first && id <= prev) flag(idx, ev, "candidates not in ascending id order");
                prev = id;
                if (first || e > be || (e == be && d > bd) ||
                    (e == be && d == bd && id < best)) {
                    best = id;
                    be = e;
                    bd = d;
                }
                first = false;
            }
        } else if (role == role_name(Role::SectorInCharge)) {
            Micro be = 0;
            bool first = true;
            for (const std::string& c : cands) {
                const std::vector<std::string> parts = split(c, ':');
                if (parts.size() != 2) {
                    flag(idx, ev, "malformed sector-head candidate '" + c + "'");
                    return;
                }
                const NodeId id = static_cast<NodeId>(std::stoul(parts[0]));
                const Micro e = std::stoll(parts[1]);
                if (first || e > be || (e == be && id < best)) {
                    best = id;
                    be = e;
                }
                first = false;
            }
        } else if (role == role_name(Role::SectorMonitor)) {
            const NodeId cic = static_cast<NodeId>(ev.get_u64("ctx"));
            const auto head = nodes.find(cic);
            if (head == nodes.end()) {
                flag(idx, ev, "monitor election under unknown head");
                return;
            }
            const Position hp{head->second->x, head->second->y};
            double bd = 0.0;
            bool first = true;
            for (const std::string& c : cands) {
                const NodeId id = static_cast<NodeId>(std::stoul(c));
                const auto m = nodes.find(id);
                if (m == nodes.end()) {
                    flag(idx, ev, "unknown monitor candidate " + c);
                    return;
                }
                const double d = dist2(Position{m->second->x, m->second->y}, hp);
                if (first || d < bd || (d == bd && id < best)) {
                    best = id;
                    bd = d;
                }
                first = false;
            }
        } else {
            flag(idx, ev, "unexpected elected role " + role);
            return;
        }

        if (best != ev.actor) {
            flag(idx, ev, role + " winner: rule picks " + std::to_string(best) + ", trace has " +
                              std::to_string(ev.actor));
        }
    }

    void on_profile(std::size_t idx, const TraceEvent& ev) {
        SleepSchedule s;
        s.period = ev.get_u64("period");
        s.wake_offset = ev.get_u64("offset");
        s.wake_len = ev.get_u64("len");
        const auto cls = classes.find(ev.get("class"));
        if (cls == classes.end()) {
            flag(idx, ev, "profile names unknown class " + ev.get("class"));
        } else if (!(cls->second->schedule == s)) {
            flag(idx, ev, "profile schedule disagrees with the class definition");
        }
        profiles[ev.actor].emplace_back(ev.get_u64("issue"), s);
    }

    void run() {
        const auto& events = trace.events();
        if (events.empty() || events.back().kind != TraceKind::End) {
            report.violations.push_back("trace truncated: no END record");
            return;
        }
        for (std::size_t i = 0; i < events.size(); ++i) {
            const TraceEvent& ev = events[i];
            switch (ev.kind) {
                case TraceKind::Send: on_send(i, ev); break;
                case TraceKind::Deliver: on_deliver(i, ev); break;
                case TraceKind::Phase1: on_phase1(i, ev); break;
                case TraceKind::Elect: on_elect(i, ev); break;
                case TraceKind::Profile: on_profile(i, ev); break;
                case TraceKind::Isolate: {
                    ++report.isolation_events;
                    isolated_at.try_emplace(static_cast<NodeId>(ev.get_u64("node")), i);
                    break;
                }
                default: break;
            }
        }
    }
};

}  // namespace

std::string OracleReport::summary() const {
    std::ostringstream out;
    out << "phase1=" << phase1_checked << " elections=" << elections_checked
        << " sends=" << sends_checked << " isolations=" << isolation_events
        << " violations=" << violations.size();
    return out.str();
}

OracleReport verify_trace(const TraceLog& trace) {
    Walker w(trace);
    w.run();
    return std::move(w.report);
}

}  // namespace wsn
