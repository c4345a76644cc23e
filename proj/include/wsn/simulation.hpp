#pragma once

#include <map>
#include <set>
#include <vector>

#include "wsn/attacker.hpp"
#include "wsn/config.hpp"
#include "wsn/detection.hpp"
#include "wsn/energy.hpp"
#include "wsn/engine.hpp"
#include "wsn/packet.hpp"
#include "wsn/roles.hpp"
#include "wsn/topology.hpp"
#include "wsn/trace.hpp"
#include "wsn/types.hpp"

namespace wsn {

// Single-cluster hierarchical sensor network under a sink gateway:
// discovery elects the role tree, collection rounds pull data up it, the
// monitor/cluster-head pair runs the two-phase intrusion check, and the
// gateway isolates confirmed offenders. One call to run() plays the whole
// scenario and returns the trace; everything is driven by the event queue,
// so a config plus seed always reproduces the same bytes.
class Simulator {
public:
    explicit Simulator(ScenarioConfig cfg);

    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    // Runs to the horizon and hands the trace out. Call once.
    TraceLog run();

private:
    enum class Mode : std::uint8_t {
        AlwaysAwake,  // default before any profile; also SG and attackers
        AdminSleep,   // parked by a sleep signal until the next discovery
        Scheduled,    // following the adopted duty cycle
    };

    struct Node {
        NodeId id = kNoNode;
        Position pos;
        const ClassSpec* cls = nullptr;
        bool attacker = false;
        SimTime arrival = 0;

        bool present = false;
        NodeId graph_idx = kNoNode;

        Mode mode = Mode::AlwaysAwake;
        SleepSchedule schedule;  // meaningful in Scheduled mode
        bool profiled = false;
        Role role = Role::LeafNode;
        NodeId parent = kNoNode;      // next hop toward SG; kNoNode = no route
        NodeId sector_sic = kNoNode;  // sector membership, by SIC id

        EnergyState energy;
        SimTime settled_to = 0;  // duty billed for [arrival, settled_to)
        bool dead = false;
        std::uint64_t death_gen = 0;

        // Arrival history per packet origin; feeds the rate rule. Kept on
        // every node so the history survives role changes.
        std::map<NodeId, SlidingCounter> window;
    };

    // --- node table ---
    Node& node(NodeId id);
    const Node& node(NodeId id) const;
    bool alive(const Node& n) const { return n.present && !n.dead; }
    bool asleep_at(const Node& n, SimTime t) const;

    // --- energy ---
    // Books duty for [settled_to, to); emits the death line when it kills.
    void settle(Node& n, SimTime to, SimTime now);
    // Immediate action cost; returns false when the node died paying it.
    bool charge(Node& n, EnergyAction a, Micro amount, SimTime now);
    void note_death(Node& n, EnergyAction cause, SimTime now);
    void reschedule_death(Node& n, SimTime now);
    SimTime predict_death(const Node& n) const;  // exact duty-only death tick

    // --- traffic ---
    Packet make_packet(PacketKind kind, NodeId origin, NodeId final_dst, SimTime created);
    void log_send(const Packet& pkt, NodeId from, const std::string& to, SimTime now);
    void send_to(Node& from, const Packet& pkt, NodeId to, SimTime now);
    // Stamps the origin residual, logs and schedules; false = died or no route.
    bool originate(Node& origin, Packet pkt, NodeId to, SimTime now);
    void forward_up(Node& n, const Packet& pkt, SimTime now);
    void log_drop(NodeId actor, const Packet& pkt, SimTime now);
    void respond_with_data(Node& n, SimTime now);

    // --- protocol phases ---
    void begin_discovery(SimTime now);
    void finish_discovery(SimTime now);
    void run_elections(SimTime now);
    void issue_profiles(SimTime now);
    void resolve_plan_targets(SimTime now);
    RotationTrigger rotation_trigger(SimTime now);
    std::vector<NodeId> eligible_members(SimTime now);  // alive, not isolated
    // Candidate filters, shared by elections and the dominance check so the
    // two can never disagree.
    std::vector<Candidate> head_candidates(const std::vector<NodeId>& eligible) const;
    std::vector<Candidate> sic_pool(const std::vector<NodeId>& eligible, NodeId head) const;

    // --- detection ---
    const ClassSpec* class_of(NodeId id) const;
    const SleepSchedule* profile_as_of(NodeId id, SimTime t) const;
    void monitor_classify(Node& sm, Packet& pkt, SimTime now);
    void head_decide(Node& cic, Packet& pkt, SimTime now);

    // --- event handlers ---
    void handle_delivery(const DeliveryPayload& d, SimTime now);
    void handle_round_start(SimTime now);
    void handle_election_tick(SimTime now);
    void handle_metrics_sample(SimTime now);
    void handle_attacker_fire(std::size_t plan_index, SimTime now);
    void handle_node_arrival(NodeId id, SimTime now);
    void handle_death_check(const DeathCheckPayload& p, SimTime now);
    void finalize(SimTime end_tick, const char* reason);

    ScenarioConfig cfg_;
    NeighborGraph graph_;
    std::vector<Node> nodes_;              // sorted by id
    std::vector<std::size_t> graph_nodes_; // graph index -> nodes_ index
    NodeId sg_ = kNoNode;

    EventQueue queue_;
    TraceLog trace_;
    std::uint64_t next_pkt_ = 1;

    // role structure (single cluster)
    NodeId cic_ = kNoNode;
    std::vector<NodeId> sics_;      // in election order
    std::vector<Sector> sectors_;   // parallel to sics_
    std::set<NodeId> registry_;     // every node the SG has ever profiled

    bool discovery_active_ = false;
    bool pending_discovery_ = false;
    std::set<NodeId> respondents_;

    // profile issue history per node, for as-of classification
    std::map<NodeId, std::vector<std::pair<SimTime, SleepSchedule>>> profiles_;
    SlidingCounter cluster_invalids_;
    IsolationList isolation_;

    std::vector<AttackPlan> plans_;
    bool ran_ = false;
};

}  // namespace wsn
