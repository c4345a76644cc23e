#include "wsn/simulation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace wsn {

namespace {

std::string join_candidates(const std::vector<Candidate>& cands, bool with_degree) {
    std::string out;
    for (const Candidate& c : cands) {
        if (!out.empty()) out += ',';
        out += std::to_string(c.id);
        out += ':';
        out += std::to_string(c.energy);
        if (with_degree) {
            out += ':';
            out += std::to_string(c.degree);
        }
    }
    return out;
}

}  // namespace

Simulator::Simulator(ScenarioConfig cfg)
    : cfg_(std::move(cfg)), cluster_invalids_(cfg_.detect.window) {
    std::vector<NodeSpec> specs = materialize_nodes(cfg_);
    std::sort(specs.begin(), specs.end(),
              [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });

    nodes_.reserve(specs.size());
    for (const NodeSpec& s : specs) {
        Node n;
        n.id = s.id;
        n.pos = {s.x, s.y};
        n.cls = cfg_.find_class(s.cls);
        if (n.cls == nullptr) throw ConfigError("node " + std::to_string(s.id) + ": unknown class");
        n.attacker = s.attacker;
        n.arrival = s.arrival;
        n.energy.initial = s.initial ? *s.initial : n.cls->initial;
        n.energy.residual = n.energy.initial;
        nodes_.push_back(std::move(n));
    }

    sg_ = cfg_.gateway;
    Node& sg = node(sg_);
    if (sg.arrival != 0) throw ConfigError("gateway must be present from tick 0");
    if (sg.attacker) throw ConfigError("gateway cannot be an attacker");
    sg.role = Role::SinkGateway;

    // Initial radio graph over the tick-0 population; arrivals join later.
    std::vector<Position> positions;
    std::vector<std::size_t> initial;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].arrival == 0) {
            initial.push_back(i);
            positions.push_back(nodes_[i].pos);
        }
    }
    graph_ = NeighborGraph::build(positions, cfg_.radius);
    for (std::size_t k = 0; k < initial.size(); ++k) {
        nodes_[initial[k]].graph_idx = static_cast<NodeId>(k);
        nodes_[initial[k]].present = true;
        graph_nodes_.push_back(initial[k]);
    }

    for (const AttackSpec& a : cfg_.attacks) {
        AttackPlan p;
        p.attacker = a.attacker;
        p.target_spec = a.target;
        p.mode = a.mode;
        p.start = a.start;
        p.period = a.period;
        p.shots = a.shots;
        if (a.target != "@sectored_leaf") {
            const NodeId t = static_cast<NodeId>(std::stoul(a.target));
            bool found = false;
            for (const Node& n : nodes_) found = found || n.id == t;
            if (!found) throw ConfigError("attack target " + a.target + ": no such node");
            p.target = t;
        }
        plans_.push_back(std::move(p));
    }

    trace_.meta.scenario = cfg_.scenario;
    trace_.meta.seed = cfg_.seed;
    trace_.meta.horizon = cfg_.horizon;
    trace_.meta.detection = cfg_.detection_enabled;
    trace_.meta.config_hash = cfg_.hash();
    trace_.meta.radius = cfg_.radius;
    trace_.meta.latency = cfg_.latency;
    trace_.meta.round_period = cfg_.round_period;
    trace_.meta.election_period = cfg_.election_period;
    trace_.meta.sample_period = cfg_.sample_period;
    trace_.meta.sectors = cfg_.sectors;
    trace_.meta.gateway = sg_;
    trace_.meta.detect = cfg_.detect;
    trace_.meta.costs = cfg_.costs;
    for (const ClassSpec& c : cfg_.classes) {
        trace_.meta.classes.push_back({c.name, c.initial, c.layer, c.schedule});
    }
    for (const Node& n : nodes_) {
        trace_.meta.nodes.push_back({n.id, n.pos.x, n.pos.y, n.cls->name, n.attacker, n.arrival});
    }
    for (std::size_t i = 0; i < plans_.size(); ++i) {
        const AttackPlan& p = plans_[i];
        trace_.meta.plans.push_back({static_cast<std::uint32_t>(i), p.attacker, p.target_spec,
                                     p.mode, p.start, p.period, p.shots});
    }
}

// --- node table ---

Simulator::Node& Simulator::node(NodeId id) {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const Node& n, NodeId v) { return n.id < v; });
    if (it == nodes_.end() || it->id != id) throw std::logic_error("unknown node id");
    return *it;
}

const Simulator::Node& Simulator::node(NodeId id) const {
    return const_cast<Simulator*>(this)->node(id);
}

bool Simulator::asleep_at(const Node& n, SimTime t) const {
    switch (n.mode) {
        case Mode::AlwaysAwake: return false;
        case Mode::AdminSleep: return true;
        case Mode::Scheduled: return !n.schedule.awake_at(t);
    }
    return false;
}

// --- energy ---

void Simulator::settle(Node& n, SimTime to, SimTime now) {
    if (n.dead || !n.present || to <= n.settled_to) return;
    const SimTime from = n.settled_to;
    n.settled_to = to;
    SimTime awake = 0;
    switch (n.mode) {
        case Mode::AlwaysAwake: awake = to - from; break;
        case Mode::AdminSleep: awake = 0; break;
        case Mode::Scheduled: awake = awake_ticks_in(n.schedule, from, to); break;
    }
    const SimTime asleep = (to - from) - awake;
    // Booked as two lump charges; the cause reported is the first killing one.
    if (awake > 0 &&
        n.energy.charge(EnergyAction::IdleListen, static_cast<Micro>(awake) * cfg_.costs.idle_listen)) {
        note_death(n, EnergyAction::IdleListen, now);
        return;
    }
    if (asleep > 0 &&
        n.energy.charge(EnergyAction::Sleep, static_cast<Micro>(asleep) * cfg_.costs.sleep)) {
        note_death(n, EnergyAction::Sleep, now);
    }
}

bool Simulator::charge(Node& n, EnergyAction a, Micro amount, SimTime now) {
    if (n.dead) return false;
    if (n.energy.charge(a, amount)) {
        note_death(n, a, now);
        return false;
    }
    return true;
}

void Simulator::note_death(Node& n, EnergyAction cause, SimTime now) {
    n.dead = true;
    TraceEvent ev(now, TraceKind::Death, n.id);
    ev.add("cause", energy_action_name(cause));
    trace_.append(std::move(ev));
}

SimTime Simulator::predict_death(const Node& n) const {
    const Micro r = n.energy.residual;
    auto span_cost = [&](SimTime b) -> Micro {  // duty for [settled_to, b)
        const SimTime a = n.settled_to;
        SimTime awake = 0;
        switch (n.mode) {
            case Mode::AlwaysAwake: awake = b - a; break;
            case Mode::AdminSleep: awake = 0; break;
            case Mode::Scheduled: awake = awake_ticks_in(n.schedule, a, b); break;
        }
        return static_cast<Micro>(awake) * cfg_.costs.idle_listen +
               static_cast<Micro>((b - a) - awake) * cfg_.costs.sleep;
    };
    // Duty through the final settle never reaches the residual: outlives the run.
    if (span_cost(cfg_.horizon + 2) < r) return cfg_.horizon + 1;
    SimTime lo = n.settled_to;
    SimTime hi = cfg_.horizon + 1;  // invariant: span_cost(hi + 1) >= r
    while (lo < hi) {
        const SimTime mid = lo + (hi - lo) / 2;
        if (span_cost(mid + 1) >= r) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

void Simulator::reschedule_death(Node& n, SimTime now) {
    if (n.dead || !n.present) return;
    ++n.death_gen;
    const SimTime d = predict_death(n);
    if (d <= cfg_.horizon) {
        queue_.schedule(now, d < now ? now : d, EventKind::DeathCheck,
                        DeathCheckPayload{n.id, n.death_gen});
    }
}

// --- traffic ---

Packet Simulator::make_packet(PacketKind kind, NodeId origin, NodeId final_dst, SimTime created) {
    Packet p;
    p.id = next_pkt_++;
    p.kind = kind;
    p.origin = origin;
    p.final_dst = final_dst;
    p.created_at = created;
    return p;
}

void Simulator::log_send(const Packet& pkt, NodeId from, const std::string& to, SimTime now) {
    TraceEvent ev(now, TraceKind::Send, from);
    ev.add("pkt", pkt.id);
    ev.add("kind", packet_kind_name(pkt.kind));
    ev.add("origin", pkt.origin);
    ev.add("to", to);
    ev.add("dst", pkt.final_dst == kNoNode ? std::string("*") : std::to_string(pkt.final_dst));
    ev.add("created", pkt.created_at);
    ev.add("res", pkt.sender_residual);
    if (pkt.tag != Tag::Untagged) {
        ev.add("tag", tag_name(pkt.tag));
        ev.add("reason", phase1_reason_name(pkt.reason));
        ev.add("susp", pkt.suspected ? 1 : 0);
    }
    if (pkt.report_target != kNoNode) ev.add("report", pkt.report_target);
    trace_.append(std::move(ev));
}

void Simulator::send_to(Node& from, const Packet& pkt, NodeId to, SimTime now) {
    log_send(pkt, from.id, std::to_string(to), now);
    queue_.schedule(now, now + cfg_.latency, EventKind::PacketDelivery,
                    DeliveryPayload{pkt, from.id, to});
}

bool Simulator::originate(Node& origin, Packet pkt, NodeId to, SimTime now) {
    if (to == kNoNode) {
        log_drop(origin.id, pkt, now);
        return false;
    }
    if (!charge(origin, EnergyAction::Transmit, cfg_.costs.transmit, now)) return false;
    pkt.sender_residual = origin.energy.residual;  // post-transmit, by convention
    send_to(origin, pkt, to, now);
    return true;
}

void Simulator::forward_up(Node& n, const Packet& pkt, SimTime now) {
    if (n.parent == kNoNode) {
        log_drop(n.id, pkt, now);
        return;
    }
    if (!charge(n, EnergyAction::Transmit, cfg_.costs.transmit, now)) return;
    send_to(n, pkt, n.parent, now);
}

void Simulator::log_drop(NodeId actor, const Packet& pkt, SimTime now) {
    TraceEvent ev(now, TraceKind::Drop, actor);
    ev.add("pkt", pkt.id);
    ev.add("origin", pkt.origin);
    ev.add("reason", "no_route");
    trace_.append(std::move(ev));
}

void Simulator::respond_with_data(Node& n, SimTime now) {
    if (!charge(n, EnergyAction::Sense, cfg_.costs.sense, now)) return;
    originate(n, make_packet(PacketKind::Data, n.id, sg_, now), n.parent, now);
}

// --- protocol phases ---

void Simulator::begin_discovery(SimTime now) {
    Node& sg = node(sg_);
    settle(sg, now, now);
    if (!alive(sg)) return;
    discovery_active_ = true;
    respondents_.clear();

    Packet q = make_packet(PacketKind::Query, sg_, kNoNode, now);
    if (!charge(sg, EnergyAction::Transmit, cfg_.costs.transmit, now)) {
        discovery_active_ = false;
        return;
    }
    q.sender_residual = sg.energy.residual;
    log_send(q, sg_, "*", now);

    // One transmit covers the broadcast; deliveries fan out in id order.
    std::vector<NodeId> heard;
    for (NodeId gidx : graph_.neighbors(sg.graph_idx)) {
        heard.push_back(nodes_[graph_nodes_[gidx]].id);
    }
    std::sort(heard.begin(), heard.end());
    for (NodeId id : heard) {
        queue_.schedule(now, now + cfg_.latency, EventKind::PacketDelivery,
                        DeliveryPayload{q, sg_, id});
    }
    queue_.schedule(now, now + 2 * cfg_.latency + 1, EventKind::DiscoveryDecision);
    reschedule_death(sg, now);
}

void Simulator::finish_discovery(SimTime now) {
    discovery_active_ = false;
    registry_.insert(respondents_.begin(), respondents_.end());
    respondents_.clear();
    run_elections(now);
    resolve_plan_targets(now);
    issue_profiles(now);
}

std::vector<NodeId> Simulator::eligible_members(SimTime now) {
    std::vector<NodeId> out;
    for (NodeId id : registry_) {
        Node& n = node(id);
        if (!alive(n) || isolation_.contains(id)) continue;
        settle(n, now, now);
        if (n.dead) continue;
        out.push_back(id);
    }
    return out;
}

std::vector<Candidate> Simulator::head_candidates(const std::vector<NodeId>& eligible) const {
    const Node& sg = node(sg_);
    std::vector<Candidate> heads;
    for (NodeId id : eligible) {
        const Node& n = node(id);
        if (n.cls->layer < 3) continue;
        if (!graph_.adjacent(n.graph_idx, sg.graph_idx)) continue;
        heads.push_back({id, n.energy.residual, static_cast<std::uint32_t>(graph_.degree(n.graph_idx))});
    }
    return heads;
}

std::vector<Candidate> Simulator::sic_pool(const std::vector<NodeId>& eligible, NodeId head) const {
    const Node& h = node(head);
    std::vector<Candidate> pool;
    for (NodeId id : eligible) {
        const Node& n = node(id);
        if (id == head || n.cls->layer < 2) continue;
        if (!graph_.adjacent(n.graph_idx, h.graph_idx)) continue;
        pool.push_back({id, n.energy.residual, 0});
    }
    return pool;
}

void Simulator::run_elections(SimTime now) {
    const std::vector<NodeId> eligible = eligible_members(now);
    const std::vector<Candidate> heads = head_candidates(eligible);
    const NodeId new_cic = pick_cic_winner(heads);

    // Wipe the old structure; winners get their roles back below.
    for (NodeId id : registry_) {
        Node& n = node(id);
        n.role = Role::LeafNode;
        n.parent = kNoNode;
        n.sector_sic = kNoNode;
    }
    cic_ = new_cic;
    sics_.clear();
    sectors_.clear();

    if (cic_ == kNoNode) {
        TraceEvent ev(now, TraceKind::Halt, kNoNode);
        ev.add("why", "no_cic");
        trace_.append(std::move(ev));
        return;
    }

    {
        TraceEvent ev(now, TraceKind::Elect, cic_);
        ev.add("role", role_name(Role::ClusterInCharge));
        ev.add("ctx", sg_);
        ev.add("cands", join_candidates(heads, true));
        trace_.append(std::move(ev));
    }
    Node& head = node(cic_);
    head.role = Role::ClusterInCharge;
    head.parent = sg_;

    // Sector heads: peel the energy maximum off the head's neighborhood,
    // logging the remaining pool at each pick so the choice is auditable.
    std::vector<Candidate> pool = sic_pool(eligible, cic_);
    for (std::uint32_t rank = 1; rank <= cfg_.sectors && !pool.empty(); ++rank) {
        const NodeId win = pick_sic_winner(pool);
        TraceEvent ev(now, TraceKind::Elect, win);
        ev.add("role", role_name(Role::SectorInCharge));
        ev.add("ctx", cic_);
        ev.add("rank", rank);
        ev.add("cands", join_candidates(pool, false));
        trace_.append(std::move(ev));
        sics_.push_back(win);
        Node& s = node(win);
        s.role = Role::SectorInCharge;
        s.parent = cic_;  // rerouted through the sector monitor once one exists
        pool.erase(std::find_if(pool.begin(), pool.end(),
                                [win](const Candidate& c) { return c.id == win; }));
    }

    // Sector membership by greedy claim, in graph index space.
    std::vector<NodeId> sic_gidx;
    for (NodeId s : sics_) sic_gidx.push_back(node(s).graph_idx);
    std::vector<NodeId> claim_gidx;
    for (NodeId id : eligible) {
        if (id == cic_) continue;
        if (std::find(sics_.begin(), sics_.end(), id) != sics_.end()) continue;
        claim_gidx.push_back(node(id).graph_idx);
    }
    std::sort(claim_gidx.begin(), claim_gidx.end());
    std::vector<Sector> raw = form_sectors(graph_, sic_gidx, claim_gidx);

    for (std::size_t i = 0; i < raw.size(); ++i) {
        Sector sec;
        sec.sic = sics_[i];
        for (NodeId g : raw[i].members) sec.members.push_back(nodes_[graph_nodes_[g]].id);
        std::sort(sec.members.begin(), sec.members.end());

        // Monitor: nearest detection-capable member the head can hear.
        std::vector<SmCandidate> sm_cands;
        for (NodeId m : sec.members) {
            const Node& n = node(m);
            if (n.cls->layer < 2) continue;
            if (!graph_.adjacent(n.graph_idx, head.graph_idx)) continue;
            sm_cands.push_back({m, dist2(n.pos, head.pos)});
        }
        sec.sm = pick_sm_winner(sm_cands);
        if (sec.sm != kNoNode) {
            TraceEvent ev(now, TraceKind::Elect, sec.sm);
            ev.add("role", role_name(Role::SectorMonitor));
            ev.add("ctx", cic_);
            ev.add("sector", sec.sic);
            std::string cands;
            for (const SmCandidate& c : sm_cands) {
                if (!cands.empty()) cands += ',';
                cands += std::to_string(c.id);
            }
            ev.add("cands", cands);
            trace_.append(std::move(ev));
        }

        for (NodeId m : sec.members) {
            Node& n = node(m);
            n.sector_sic = sec.sic;
            n.parent = sec.sic;
        }
        if (sec.sm != kNoNode) {
            Node& mon = node(sec.sm);
            mon.role = Role::SectorMonitor;
            mon.parent = cic_;
            node(sec.sic).parent = sec.sm;  // collected data passes the monitor
        }
        sectors_.push_back(std::move(sec));
    }
}

void Simulator::resolve_plan_targets(SimTime now) {
    for (std::size_t i = 0; i < plans_.size(); ++i) {
        AttackPlan& p = plans_[i];
        if (p.target != kNoNode || p.target_spec != "@sectored_leaf") continue;
        NodeId best = kNoNode;
        for (const Sector& sec : sectors_) {
            if (sec.sm == kNoNode) continue;
            for (NodeId m : sec.members) {
                if (node(m).role != Role::LeafNode || node(m).cls->layer != 1) continue;
                if (best == kNoNode || m < best) best = m;
            }
        }
        if (best == kNoNode) continue;  // try again after the next cascade
        p.target = best;
        TraceEvent ev(now, TraceKind::Plan, p.attacker);
        ev.add("plan", i);
        ev.add("target", best);
        trace_.append(std::move(ev));
    }
}

void Simulator::issue_profiles(SimTime now) {
    Node& sg = node(sg_);
    for (NodeId id : registry_) {
        if (sg.dead) break;  // a dead gateway announces nothing
        Node& n = node(id);
        if (!alive(n) || isolation_.contains(id)) continue;
        TraceEvent ev(now, TraceKind::Profile, id);
        ev.add("role", role_name(n.role));
        ev.add("class", n.cls->name);
        ev.add("period", n.cls->schedule.period);
        ev.add("offset", n.cls->schedule.wake_offset);
        ev.add("len", n.cls->schedule.wake_len);
        ev.add("issue", now);
        trace_.append(std::move(ev));
        profiles_[id].emplace_back(now, n.cls->schedule);
        originate(sg, make_packet(PacketKind::StatusProfile, sg_, id, now), id, now);
    }
    reschedule_death(sg, now);
}

RotationTrigger Simulator::rotation_trigger(SimTime now) {
    std::vector<NodeId> holders;
    if (cic_ != kNoNode) holders.push_back(cic_);
    holders.insert(holders.end(), sics_.begin(), sics_.end());
    for (const Sector& s : sectors_) {
        if (s.sm != kNoNode) holders.push_back(s.sm);
    }
    for (NodeId h : holders) {
        if (!alive(node(h)) || isolation_.contains(h)) return RotationTrigger::HolderLost;
    }

    const std::vector<NodeId> eligible = eligible_members(now);
    if (!holders.empty() && !eligible.empty()) {
        Micro sum = 0;
        for (NodeId id : eligible) sum += node(id).energy.residual;
        for (NodeId h : holders) {
            // residual < mean / 2, kept exact: 2 * residual * n < sum
            if (2 * node(h).energy.residual * static_cast<Micro>(eligible.size()) < sum) {
                return RotationTrigger::LowEnergy;
            }
        }
    }

    // Would the standing rule pick a different head or sector-head list today?
    const NodeId would_cic = pick_cic_winner(head_candidates(eligible));
    if (would_cic != cic_) return RotationTrigger::Dominated;
    if (would_cic == kNoNode) return RotationTrigger::None;

    std::vector<NodeId> would_sics;
    std::vector<Candidate> pool = sic_pool(eligible, would_cic);
    for (std::uint32_t rank = 1; rank <= cfg_.sectors && !pool.empty(); ++rank) {
        const NodeId win = pick_sic_winner(pool);
        would_sics.push_back(win);
        pool.erase(std::find_if(pool.begin(), pool.end(),
                                [win](const Candidate& c) { return c.id == win; }));
    }
    if (would_sics != sics_) return RotationTrigger::Dominated;
    return RotationTrigger::None;
}

// --- detection ---

const ClassSpec* Simulator::class_of(NodeId id) const { return node(id).cls; }

const SleepSchedule* Simulator::profile_as_of(NodeId id, SimTime t) const {
    const auto it = profiles_.find(id);
    if (it == profiles_.end()) return nullptr;
    const SleepSchedule* best = nullptr;
    for (const auto& [issue, sched] : it->second) {
        if (issue > t) break;  // history is append-only by issue tick
        best = &sched;
    }
    return best;
}

void Simulator::monitor_classify(Node& sm, Packet& pkt, SimTime now) {
    if (!charge(sm, EnergyAction::Detect, cfg_.costs.detect, now)) return;
    const std::uint32_t count = sm.window.at(pkt.origin).count_at(now);
    const SleepSchedule* sched = profile_as_of(pkt.origin, pkt.created_at);
    Phase1Verdict v;
    bool unprofiled = false;
    if (sched == nullptr) {
        // No profile on record for the claimed origin: nothing legitimate
        // originates unprofiled, so treat it as a sleep-window violation.
        unprofiled = true;
        v.tag = Tag::Invalid;
        v.reason = Phase1Reason::SleepViolation;
    } else {
        v = phase1_classify(pkt, count, *sched, cfg_.detect);
    }
    pkt.tag = v.tag;
    pkt.reason = v.reason;

    const ClassSpec* cls = class_of(pkt.origin);
    const BaselineClass base{cls->initial, cls->schedule};
    const Micro bar = threshold_re(base, cfg_.costs,
                                   static_cast<std::int64_t>(cfg_.detect.energy_margin_ppm),
                                   pkt.created_at);
    pkt.suspected = phase1_suspect(pkt, base, cfg_.costs, cfg_.detect);

    TraceEvent ev(now, TraceKind::Phase1, sm.id);
    ev.add("pkt", pkt.id);
    ev.add("origin", pkt.origin);
    ev.add("tag", tag_name(pkt.tag));
    ev.add("reason", phase1_reason_name(pkt.reason));
    ev.add("susp", pkt.suspected ? 1 : 0);
    ev.add("count", count);
    ev.add("res", pkt.sender_residual);
    ev.add("bar", bar);
    if (unprofiled) ev.add("unprofiled", 1);
    trace_.append(std::move(ev));
}

void Simulator::head_decide(Node& cic, Packet& pkt, SimTime now) {
    if (!cfg_.detection_enabled) {
        forward_up(cic, pkt, now);
        return;
    }
    if (!charge(cic, EnergyAction::Detect, cfg_.costs.detect, now)) return;

    if (pkt.tag == Tag::Untagged) {
        // Data that never passed a monitor. A monitor originating its own
        // data dodges the one check nobody else can make, so that is treated
        // as invalid pending corroboration. Anything else arrives untagged
        // because its sector has no monitor seat; that gap is structural and
        // not the sender's fault, so the head runs the standard first-phase
        // checks itself, off its own arrival window, before deciding.
        // Branding such traffic invalid outright would slowly turn
        // long-serving nodes, whose residual sits below the class curve
        // precisely because they held seats, into false positives.
        const bool own_data = node(pkt.origin).role == Role::SectorMonitor;
        {
            TraceEvent ev(now, TraceKind::CTag, cic.id);
            ev.add("pkt", pkt.id);
            ev.add("origin", pkt.origin);
            ev.add("why", own_data ? "sm_origin" : "no_sm");
            trace_.append(std::move(ev));
        }
        if (own_data) {
            pkt.tag = Tag::Invalid;
            const ClassSpec* cls = class_of(pkt.origin);
            const BaselineClass base{cls->initial, cls->schedule};
            pkt.suspected = phase1_suspect(pkt, base, cfg_.costs, cfg_.detect);
        } else {
            monitor_classify(cic, pkt, now);
        }
    }

    const std::uint32_t invalids = pkt.tag == Tag::Invalid ? cluster_invalids_.record(now)
                                                           : cluster_invalids_.count_at(now);
    const Phase2Verdict verdict = phase2_decide(pkt, invalids, cfg_.detect);
    const bool reclassified = !verdict.confirmed && pkt.tag == Tag::Invalid;

    TraceEvent ev(now, TraceKind::Phase2, cic.id);
    ev.add("pkt", pkt.id);
    ev.add("origin", pkt.origin);
    ev.add("decision", phase2_decision_name(verdict.decision));
    ev.add("confirmed", verdict.confirmed ? 1 : 0);
    ev.add("invalids", invalids);
    if (reclassified) ev.add("reclassified", 1);
    trace_.append(std::move(ev));

    if (verdict.confirmed) {
        // Offending packet dies here; the report rides a status response.
        Packet report = make_packet(PacketKind::StatusResponse, cic.id, sg_, now);
        report.report_target = pkt.origin;
        originate(cic, std::move(report), cic.parent, now);
        return;
    }
    if (reclassified) pkt.tag = Tag::Valid;  // overruled, passes as clean
    forward_up(cic, pkt, now);
}

// --- event handlers ---

void Simulator::handle_delivery(const DeliveryPayload& d, SimTime now) {
    Node& r = node(d.to);
    Packet pkt = d.packet;
    if (alive(r)) settle(r, now, now);

    DeliverStatus status = DeliverStatus::Ok;
    bool forced_wake = false;
    if (!alive(r)) {
        status = DeliverStatus::Dead;
    } else if (isolation_.contains(r.id)) {
        status = DeliverStatus::IsolatedDst;
    } else if (isolation_.contains(pkt.origin)) {
        status = DeliverStatus::IsolatedSrc;
    } else if (asleep_at(r, now)) {
        if (pkt.kind == PacketKind::FakeRequest) {
            forced_wake = true;  // the attack's whole point
        } else if (r.mode == Mode::AdminSleep &&
                   (pkt.kind == PacketKind::Query || pkt.kind == PacketKind::StatusProfile ||
                    pkt.kind == PacketKind::SleepSignal)) {
            // Administratively parked nodes keep one ear on gateway control.
        } else {
            status = DeliverStatus::Asleep;
        }
    }

    {
        TraceEvent ev(now, TraceKind::Deliver, r.id);
        ev.add("pkt", pkt.id);
        ev.add("kind", packet_kind_name(pkt.kind));
        ev.add("from", d.from);
        ev.add("origin", pkt.origin);
        ev.add("created", pkt.created_at);
        ev.add("status", deliver_status_name(status));
        if (pkt.tag != Tag::Untagged) ev.add("tag", tag_name(pkt.tag));
        trace_.append(std::move(ev));
    }
    if (status != DeliverStatus::Ok) return;

    if (pkt.kind != PacketKind::SleepSignal) {
        auto [it, fresh] = r.window.try_emplace(pkt.origin, cfg_.detect.window);
        it->second.record(now);
    }

    bool powered = true;
    if (forced_wake) {
        const SimTime wake_len = r.mode == Mode::Scheduled ? r.schedule.wake_len : 1;
        const Micro lump = static_cast<Micro>(wake_len) * cfg_.costs.idle_listen;
        TraceEvent ev(now, TraceKind::WakeForced, r.id);
        ev.add("by", pkt.origin);
        ev.add("pkt", pkt.id);
        ev.add("cost", cfg_.costs.receive + lump);
        trace_.append(std::move(ev));
        powered = charge(r, EnergyAction::Receive, cfg_.costs.receive, now) &&
                  charge(r, EnergyAction::IdleListen, lump, now);
    } else {
        powered = charge(r, EnergyAction::Receive, cfg_.costs.receive, now);
    }

    if (powered) {
        switch (pkt.kind) {
            case PacketKind::Query: {
                if (r.attacker || r.id == sg_) break;  // attackers lurk silently
                originate(r, make_packet(PacketKind::StatusResponse, r.id, sg_, now), sg_, now);
                break;
            }
            case PacketKind::StatusResponse: {
                if (r.id != sg_) break;
                if (pkt.report_target != kNoNode) {
                    if (pkt.report_target == sg_) {
                        TraceEvent ev(now, TraceKind::Note, r.id);
                        ev.add("reject", "isolate_sg");
                        trace_.append(std::move(ev));
                    } else if (isolation_.add(pkt.report_target, now)) {
                        TraceEvent ev(now, TraceKind::Isolate, r.id);
                        ev.add("node", pkt.report_target);
                        ev.add("pkt", pkt.id);
                        trace_.append(std::move(ev));
                    }
                } else if (discovery_active_) {
                    respondents_.insert(pkt.origin);
                } else if (!registry_.contains(pkt.origin)) {
                    // A newcomer announcing itself between discoveries: park
                    // it asleep until the next cycle picks it up.
                    pending_discovery_ = true;
                    originate(r, make_packet(PacketKind::SleepSignal, sg_, pkt.origin, now),
                              pkt.origin, now);
                }
                break;
            }
            case PacketKind::StatusProfile: {
                settle(r, now + 1, now);  // new duty cycle starts next tick
                if (r.dead) break;
                r.mode = Mode::Scheduled;
                r.schedule = r.cls->schedule;
                r.profiled = true;
                break;
            }
            case PacketKind::SleepSignal: {
                settle(r, now + 1, now);
                if (r.dead) break;
                r.mode = Mode::AdminSleep;
                break;
            }
            case PacketKind::DataRequest: {
                if (r.role == Role::SectorInCharge) {
                    const Sector* sec = nullptr;
                    for (const Sector& s : sectors_) {
                        if (s.sic == r.id) sec = &s;
                    }
                    if (sec == nullptr) break;
                    for (NodeId m : sec->members) {
                        if (node(m).role != Role::LeafNode) continue;
                        if (!originate(r, make_packet(PacketKind::DataRequest, r.id, m, now), m,
                                       now) &&
                            r.dead) {
                            break;  // died mid-fan, the rest go unpolled
                        }
                    }
                } else if (r.role == Role::LeafNode) {
                    respond_with_data(r, now);
                }
                break;
            }
            case PacketKind::Data: {
                if (r.id == sg_) break;  // sink: terminal
                if (r.role == Role::ClusterInCharge) {
                    head_decide(r, pkt, now);
                    break;
                }
                if (r.role == Role::SectorMonitor && cfg_.detection_enabled) {
                    monitor_classify(r, pkt, now);
                    if (r.dead) break;
                }
                forward_up(r, pkt, now);
                break;
            }
            case PacketKind::FakeRequest: {
                // Deceived data-plane nodes answer as if polled. The head and
                // the gateway know the collection cadence and ignore it.
                if (r.attacker || r.id == sg_ || r.role == Role::ClusterInCharge) break;
                respond_with_data(r, now);
                break;
            }
        }
    }
    reschedule_death(r, now);
}

void Simulator::handle_round_start(SimTime now) {
    if (now + cfg_.round_period <= cfg_.horizon) {
        queue_.schedule(now, now + cfg_.round_period, EventKind::RoundStart);
    }
    if (cic_ == kNoNode) return;
    Node& head = node(cic_);
    if (!alive(head) || isolation_.contains(cic_)) return;
    settle(head, now, now);
    if (head.dead) return;
    for (const Sector& sec : sectors_) {
        if (!originate(head, make_packet(PacketKind::DataRequest, cic_, sec.sic, now), sec.sic,
                       now) &&
            head.dead) {
            break;
        }
    }
    reschedule_death(head, now);
}

void Simulator::handle_election_tick(SimTime now) {
    if (now + cfg_.election_period <= cfg_.horizon) {
        queue_.schedule(now, now + cfg_.election_period, EventKind::ElectionTick);
    }
    if (pending_discovery_) {
        pending_discovery_ = false;
        begin_discovery(now);
        return;
    }
    if (registry_.empty()) return;
    const RotationTrigger trig = rotation_trigger(now);
    if (trig == RotationTrigger::None) return;
    TraceEvent ev(now, TraceKind::Note, kNoNode);
    ev.add("trigger", rotation_trigger_name(trig));
    trace_.append(std::move(ev));
    run_elections(now);
    resolve_plan_targets(now);
    issue_profiles(now);
}

void Simulator::handle_metrics_sample(SimTime now) {
    if (now + cfg_.sample_period <= cfg_.horizon) {
        queue_.schedule(now, now + cfg_.sample_period, EventKind::MetricsSample);
    }
    std::uint32_t alive_count = 0;
    for (const Node& n : nodes_) {
        if (n.id == sg_ || n.attacker) continue;
        if (alive(n)) ++alive_count;
    }
    TraceEvent ev(now, TraceKind::Note, kNoNode);
    ev.add("alive", alive_count);
    ev.add("isolated", isolation_.size());
    trace_.append(std::move(ev));
}

void Simulator::handle_attacker_fire(std::size_t plan_index, SimTime now) {
    AttackPlan& plan = plans_[plan_index];
    Node& att = node(plan.attacker);
    if (!alive(att) || plan.exhausted()) return;

    if (plan.target != kNoNode) {
        Node& victim = node(plan.target);
        if (plan.mode == AttackMode::SleepTargeted && !alive(victim)) return;  // job done
        const bool due =
            plan.mode == AttackMode::Blind || asleep_at(victim, now + cfg_.latency);
        if (due) {
            settle(att, now, now);
            if (att.dead) return;
            Packet fake = make_packet(PacketKind::FakeRequest, att.id, plan.target, now);
            TraceEvent ev(now, TraceKind::AttackFire, att.id);
            ev.add("plan", plan_index);
            ev.add("target", plan.target);
            ev.add("pkt", fake.id);
            trace_.append(std::move(ev));
            if (!originate(att, std::move(fake), plan.target, now)) return;
            ++plan.fired;
            reschedule_death(att, now);
        }
    }
    if (!plan.exhausted() && now + plan.period <= cfg_.horizon) {
        queue_.schedule(now, now + plan.period, EventKind::AttackerFire,
                        AttackerFirePayload{plan_index});
    }
}

void Simulator::handle_node_arrival(NodeId id, SimTime now) {
    Node& n = node(id);
    n.present = true;
    n.settled_to = now;
    n.graph_idx = graph_.add_node(n.pos);
    graph_nodes_.push_back(static_cast<std::size_t>(&n - nodes_.data()));
    trace_.append(TraceEvent(now, TraceKind::Arrive, id));

    // Announce to the gateway; it parks us or the running discovery takes us.
    const Node& sg = node(sg_);
    const NodeId to = graph_.adjacent(n.graph_idx, sg.graph_idx) ? sg_ : kNoNode;
    originate(n, make_packet(PacketKind::StatusResponse, id, sg_, now), to, now);
    reschedule_death(n, now);
}

void Simulator::handle_death_check(const DeathCheckPayload& p, SimTime now) {
    Node& n = node(p.node);
    if (n.dead || !n.present || p.generation != n.death_gen) return;
    settle(n, now + 1, now);
    if (!n.dead) reschedule_death(n, now);  // charges between predictions moved it
}

void Simulator::finalize(SimTime end_tick, const char* reason) {
    // Death checks caught every duty death inside the horizon, so these
    // settles only book the tail.
    for (Node& n : nodes_) {
        if (n.present) settle(n, end_tick + 1, end_tick);
    }
    for (const Node& n : nodes_) {
        if (!n.present) continue;
        TraceEvent ev(end_tick, TraceKind::Energy, n.id);
        ev.add("initial", n.energy.initial);
        ev.add("res", n.energy.residual);
        for (std::size_t i = 0; i < kEnergyActionCount; ++i) {
            ev.add(energy_action_name(static_cast<EnergyAction>(i)), n.energy.consumed[i]);
        }
        trace_.append(std::move(ev));
    }
    std::uint32_t alive_count = 0;
    for (const Node& n : nodes_) {
        if (n.id == sg_ || n.attacker) continue;
        if (alive(n)) ++alive_count;
    }
    TraceEvent ev(end_tick, TraceKind::End, kNoNode);
    ev.add("reason", reason);
    ev.add("alive", alive_count);
    trace_.append(std::move(ev));
}

TraceLog Simulator::run() {
    if (ran_) throw std::logic_error("simulator can only run once");
    ran_ = true;

    for (const Node& n : nodes_) {
        if (n.arrival > 0 && n.arrival <= cfg_.horizon) {
            queue_.schedule(0, n.arrival, EventKind::NodeArrival, NodeArrivalPayload{n.id});
        }
    }
    if (cfg_.election_period <= cfg_.horizon) {
        queue_.schedule(0, cfg_.election_period, EventKind::ElectionTick);
    }
    if (cfg_.round_period <= cfg_.horizon) {
        queue_.schedule(0, cfg_.round_period, EventKind::RoundStart);
    }
    if (cfg_.sample_period <= cfg_.horizon) {
        queue_.schedule(0, cfg_.sample_period, EventKind::MetricsSample);
    }
    for (std::size_t i = 0; i < plans_.size(); ++i) {
        if (plans_[i].start <= cfg_.horizon) {
            queue_.schedule(0, plans_[i].start, EventKind::AttackerFire, AttackerFirePayload{i});
        }
    }
    begin_discovery(0);

    while (!queue_.empty() && queue_.peek().at <= cfg_.horizon) {
        const Event ev = queue_.pop();
        const SimTime now = ev.at;
        switch (ev.kind) {
            case EventKind::PacketDelivery:
                handle_delivery(std::get<DeliveryPayload>(ev.payload), now);
                break;
            case EventKind::ElectionTick:
                handle_election_tick(now);
                break;
            case EventKind::AttackerFire:
                handle_attacker_fire(std::get<AttackerFirePayload>(ev.payload).plan_index, now);
                break;
            case EventKind::MetricsSample:
                handle_metrics_sample(now);
                break;
            case EventKind::RoundStart:
                handle_round_start(now);
                break;
            case EventKind::DeathCheck:
                handle_death_check(std::get<DeathCheckPayload>(ev.payload), now);
                break;
            case EventKind::NodeArrival:
                handle_node_arrival(std::get<NodeArrivalPayload>(ev.payload).node, now);
                break;
            case EventKind::DiscoveryDecision:
                finish_discovery(now);
                break;
        }
    }
    finalize(cfg_.horizon, "horizon");
    return std::move(trace_);
}

}  // namespace wsn
