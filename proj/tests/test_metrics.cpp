#include <doctest.h>

#include <algorithm>
#include <string>

#include "wsn/config.hpp"
#include "wsn/metrics.hpp"
#include "wsn/simulation.hpp"
#include "wsn/trace.hpp"

using namespace wsn;

namespace {

// Hand-built trace around one gateway, one protocol node and one attacker.
// Flags select the isolation/fire combinations for the confusion matrix.
TraceLog synth_trace(bool fired, bool isolated) {
    TraceLog t;
    t.meta.scenario = "synth";
    t.meta.seed = 5;
    t.meta.horizon = 100;
    t.meta.detection = true;
    t.meta.config_hash = 0xabcdefULL;
    t.meta.gateway = 0;
    t.meta.classes.push_back({"gw", 1000000000, 4, {1, 0, 1}});
    t.meta.classes.push_back({"leaf", 50000000, 1, {20, 0, 6}});
    t.meta.classes.push_back({"snoop", 10000000, 1, {1, 0, 1}});
    t.meta.nodes.push_back({0, 0.0, 0.0, "gw", false, 0});
    t.meta.nodes.push_back({1, 5.0, 0.0, "leaf", false, 0});
    t.meta.nodes.push_back({2, 9.0, 0.0, "snoop", true, 0});
    t.meta.plans.push_back({0, 2, "1", AttackMode::SleepTargeted, 10, 7, 0});

    auto send = [&](SimTime tick, NodeId actor, std::uint64_t pkt, const char* kind) {
        TraceEvent ev(tick, TraceKind::Send, actor);
        ev.add("pkt", pkt).add("kind", kind).add("origin", actor);
        ev.add("to", "0").add("dst", 0).add("created", tick).add("res", 1000);
        t.append(std::move(ev));
    };
    send(1, 1, 1, "STATUS_RESPONSE");
    send(5, 1, 2, "DATA");
    send(7, 2, 3, "FAKE_REQUEST");

    {
        TraceEvent ev(6, TraceKind::Deliver, 0);
        ev.add("pkt", 2).add("kind", "DATA").add("from", 1).add("origin", 1);
        ev.add("created", 5).add("status", "OK");
        t.append(std::move(ev));
    }
    {
        TraceEvent ev(8, TraceKind::Deliver, 1);
        ev.add("pkt", 3).add("kind", "FAKE_REQUEST").add("from", 2).add("origin", 2);
        ev.add("created", 7).add("status", "ASLEEP");
        t.append(std::move(ev));
    }
    {
        TraceEvent ev(9, TraceKind::Drop, 1);
        ev.add("pkt", 4).add("origin", 1).add("reason", "no_route");
        t.append(std::move(ev));
    }
    {
        TraceEvent ev(12, TraceKind::Phase1, 1);
        ev.add("pkt", 5).add("origin", 1).add("tag", "INVALID").add("reason", "SLEEP_VIOLATION");
        ev.add("susp", 1).add("count", 2).add("res", 900).add("bar", 5000);
        t.append(std::move(ev));
    }
    {
        TraceEvent ev(13, TraceKind::Phase2, 1);
        ev.add("pkt", 5).add("origin", 1).add("decision", "DROP");
        ev.add("confirmed", 1).add("invalids", 3);
        t.append(std::move(ev));
    }
    if (fired) {
        for (SimTime tick : {SimTime(10), SimTime(17)}) {
            TraceEvent ev(tick, TraceKind::AttackFire, 2);
            ev.add("plan", 0).add("target", 1).add("pkt", 6);
            t.append(std::move(ev));
        }
    }
    if (isolated) {
        TraceEvent ev(30, TraceKind::Isolate, 0);
        ev.add("node", 1).add("pkt", 7);
        t.append(std::move(ev));
    }
    {
        TraceEvent ev(40, TraceKind::Death, 1);
        ev.add("cause", "idle");
        t.append(std::move(ev));
    }
    {
        // Attacker deaths never count against the protocol population.
        TraceEvent ev(45, TraceKind::Death, 2);
        ev.add("cause", "tx");
        t.append(std::move(ev));
    }

    auto energy = [&](NodeId id, Micro initial, Micro res, Micro tx, Micro rx, Micro idle) {
        TraceEvent ev(100, TraceKind::Energy, id);
        ev.add("initial", initial).add("res", res);
        ev.add("tx", tx).add("rx", rx).add("sense", 0);
        ev.add("idle", idle).add("sleep", 0).add("detect", 0);
        t.append(std::move(ev));
    };
    energy(0, 1000000000, 999995000, 2000, 1000, 2000);
    energy(1, 50000000, 49990000, 4000, 1000, 5000);
    energy(2, 10000000, 9992000, 2000, 0, 6000);
    {
        TraceEvent ev(100, TraceKind::End, kNoNode);
        ev.add("reason", "horizon").add("alive", 0);
        t.append(std::move(ev));
    }
    return t;
}

}  // namespace

TEST_CASE("run metrics digest a synthetic trace") {
    const RunMetrics m = RunMetrics::from_trace(synth_trace(true, true));

    CHECK(m.scenario == "synth");
    CHECK(m.seed == 5);
    CHECK(m.config_hash == 0xabcdefULL);
    CHECK(m.end_tick == 100);
    CHECK(m.end_reason == "horizon");
    CHECK(m.protocol_nodes == 1);

    CHECK(m.packets_sent == 3);
    CHECK(m.deliveries_ok == 1);
    CHECK(m.deliveries_failed == 1);
    CHECK(m.drops_no_route == 1);
    CHECK(m.data_to_gateway == 1);
    CHECK(m.phase1_invalid == 1);
    CHECK(m.phase2_confirmed == 1);

    // Repeat fire at 17 does not move the first-fire tick.
    REQUIRE(m.victim_first_fire.size() == 1);
    CHECK(m.victim_first_fire.at(1) == 10);
    REQUIRE(m.isolated.size() == 1);
    CHECK(m.isolated.at(1) == 30);
    CHECK(m.true_positives == 1);
    CHECK(m.false_positives == 0);
    CHECK(m.false_negatives == 0);
    CHECK(m.detection_latency.at(1) == 20);
    CHECK(m.mean_detection_latency() == doctest::Approx(20.0));

    // Protocol-only death accounting; the attacker's death is ignored.
    CHECK(m.deaths == 1);
    CHECK(m.first_death == SimTime(40));
    CHECK(m.half_dead == SimTime(40));
    CHECK(m.lifetime() == 40);

    // Ledgers keyed by actor, aggregated by class and action.
    CHECK(m.node_energy.size() == 3);
    CHECK(m.node_energy.at(1).residual == 49990000);
    CHECK(m.node_energy.at(1).total() == 10000);
    CHECK(m.consumed_total == 5000 + 10000 + 8000);
    CHECK(m.consumed_by_class.at("leaf") == 10000);
    CHECK(m.consumed_by_class.at("snoop") == 8000);
    CHECK(m.consumed_by_action[0] == 8000);  // tx across all three nodes

    const std::string kv = m.to_kv();
    CHECK(kv.find("lifetime=40") != std::string::npos);
    CHECK(kv.find("tp=1") != std::string::npos);
}

TEST_CASE("confusion matrix corners") {
    const RunMetrics fp = RunMetrics::from_trace(synth_trace(false, true));
    CHECK(fp.true_positives == 0);
    CHECK(fp.false_positives == 1);
    CHECK(fp.false_negatives == 0);
    CHECK(!fp.mean_detection_latency());

    const RunMetrics fn = RunMetrics::from_trace(synth_trace(true, false));
    CHECK(fn.true_positives == 0);
    CHECK(fn.false_positives == 0);
    CHECK(fn.false_negatives == 1);

    const RunMetrics quiet = RunMetrics::from_trace(synth_trace(false, false));
    CHECK(quiet.true_positives == 0);
    CHECK(quiet.false_positives == 0);
    CHECK(quiet.false_negatives == 0);
}

TEST_CASE("truncated trace is rejected") {
    TraceLog empty;
    CHECK_THROWS_AS((void)RunMetrics::from_trace(empty), std::runtime_error);

    TraceLog no_end = synth_trace(false, false);
    TraceEvent extra(101, TraceKind::Note, kNoNode);
    extra.add("trigger", "none");
    no_end.append(std::move(extra));
    CHECK_THROWS_WITH_AS((void)RunMetrics::from_trace(no_end),
                         "trace truncated: no END record", std::runtime_error);
}

TEST_CASE("paired comparison checks identity and polarity") {
    RunMetrics on;
    on.detection = true;
    on.config_hash = 42;
    on.end_tick = 500;  // censored: nobody died
    on.true_positives = 1;
    on.detection_latency[3] = 12;
    RunMetrics off;
    off.detection = false;
    off.config_hash = 42;
    off.end_tick = 500;
    off.first_death = 210;

    const PairComparison pc = compare_runs(on, off);
    CHECK(pc.lifetime_on == 500);
    CHECK(pc.lifetime_off == 210);
    CHECK(pc.lifetime_gain == 290);
    CHECK(pc.true_positives == 1);
    CHECK(pc.mean_detection_latency == doctest::Approx(12.0));

    RunMetrics other = off;
    other.config_hash = 43;
    CHECK_THROWS_AS((void)compare_runs(on, other), std::runtime_error);
    CHECK_THROWS_AS((void)compare_runs(off, on), std::runtime_error);  // swapped polarity
}

TEST_CASE("csv row stays aligned with the header") {
    const std::string header = RunMetrics::csv_header();
    const RunMetrics m = RunMetrics::from_trace(synth_trace(true, true));
    const std::string row = m.csv_row();
    CHECK(std::count(header.begin(), header.end(), ',') ==
          std::count(row.begin(), row.end(), ','));

    // Unset optionals serialize as empty cells, not zeros.
    const RunMetrics censored = RunMetrics::from_trace(synth_trace(false, false));
    CHECK(censored.csv_row().find(",,") != std::string::npos);
}

TEST_CASE("reference layout metrics end to end") {
    ScenarioConfig cfg =
        ScenarioConfig::load(std::string(WSNSIM_SCENARIO_DIR) + "/fig4.json");
    Simulator on_sim(cfg);
    const RunMetrics on = RunMetrics::from_trace(on_sim.run());

    CHECK(on.protocol_nodes == 9);
    CHECK(on.victim_first_fire.at(0) == 30);
    CHECK(on.isolated.at(0) == 35);
    CHECK(on.true_positives == 1);
    CHECK(on.false_positives == 0);
    CHECK(on.false_negatives == 0);
    CHECK(on.detection_latency.at(0) == 5);
    CHECK(on.mean_detection_latency() == doctest::Approx(5.0));
    CHECK(on.data_to_gateway == 28);
    CHECK(on.phase1_invalid == 1);
    CHECK(on.phase2_confirmed == 1);
    CHECK(on.deaths == 0);
    CHECK(!on.first_death);
    CHECK(on.lifetime() == 200);

    // Every node's ledger adds up.
    for (const auto& [id, e] : on.node_energy) {
        CAPTURE(id);
        CHECK(e.initial - e.residual == e.total());
    }

    cfg.detection_enabled = false;
    Simulator off_sim(std::move(cfg));
    const RunMetrics off = RunMetrics::from_trace(off_sim.run());
    CHECK(off.data_to_gateway == 46);  // seven bait answers die on napping relays
    CHECK(off.deliveries_failed == 7);
    CHECK(off.phase1_invalid == 0);
    CHECK(off.false_negatives == 1);  // attack ran, nobody cut it off

    const PairComparison pc = compare_runs(on, off);
    CHECK(pc.lifetime_gain == 0);  // the reference victim survives either way
    CHECK(pc.true_positives == 1);
}
