// Acceptance gate: one self-contained check per release criterion, each
// printing a single PASS/FAIL line. Run all, or a single one with
//   acceptance --scenarios <dir> --only ac3
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wsn/config.hpp"
#include "wsn/metrics.hpp"
#include "wsn/replay_oracle.hpp"
#include "wsn/simulation.hpp"
#include "wsn/trace.hpp"

using namespace wsn;

namespace {

std::string g_dir = WSNSIM_SCENARIO_DIR;

ScenarioConfig load_cfg(const char* name) {
    return ScenarioConfig::load(g_dir + "/" + name);
}

TraceLog run_cfg(ScenarioConfig cfg) {
    Simulator sim(std::move(cfg));
    return sim.run();
}

TraceLog run_named(const char* name, std::uint64_t seed, bool detection) {
    ScenarioConfig cfg = load_cfg(name);
    cfg.seed = seed;
    cfg.detection_enabled = detection;
    return run_cfg(std::move(cfg));
}

// Collects failure details; a criterion passes when none accumulated.
struct Checker {
    std::vector<std::string> fails;

    void expect(bool ok, const std::string& what) {
        if (!ok) fails.push_back(what);
    }
    template <typename A, typename B>
    void expect_eq(const A& got, const B& want, const std::string& what) {
        if (!(got == static_cast<A>(want))) {
            std::ostringstream out;
            out << what << ": got " << got << ", want " << want;
            fails.push_back(out.str());
        }
    }
    std::string summary(std::size_t limit = 4) const {
        std::ostringstream out;
        for (std::size_t i = 0; i < fails.size() && i < limit; ++i) {
            if (i) out << "; ";
            out << fails[i];
        }
        if (fails.size() > limit) out << "; +" << (fails.size() - limit) << " more";
        return out.str();
    }
};

const TraceEvent* at_tick(const TraceLog& t, TraceKind k, SimTime tick, NodeId actor = kNoNode) {
    for (const TraceEvent& ev : t.events()) {
        if (ev.kind == k && ev.tick == tick && (actor == kNoNode || ev.actor == actor)) {
            return &ev;
        }
    }
    return nullptr;
}

std::size_t count_kind(const TraceLog& t, TraceKind k) {
    std::size_t n = 0;
    for (const TraceEvent& ev : t.events()) {
        if (ev.kind == k) ++n;
    }
    return n;
}

// --- AC-1: the reference walkthrough, frozen line by line ---

std::string ac1(bool& ok) {
    const auto t0 = std::chrono::steady_clock::now();
    const TraceLog t = run_named("fig4.json", 1, true);
    Checker c;

    const TraceEvent* cic = at_tick(t, TraceKind::Elect, 3, 8);
    c.expect(cic != nullptr, "no head election at tick 3 by node 8");
    if (cic != nullptr) {
        c.expect_eq(cic->get("role"), std::string("CIC"), "elected role");
        c.expect_eq(cic->get_u64("ctx"), 9, "election context");
        c.expect_eq(cic->get("cands"), std::string("8:79982000:9"), "head candidates");
    }
    bool sic1 = false, sic2 = false, sm6 = false, sm7 = false;
    for (const TraceEvent& ev : t.events()) {
        if (ev.kind != TraceKind::Elect || ev.tick != 3) continue;
        if (ev.get("role") == "SIC" && ev.get_u64("rank") == 1) {
            sic1 = true;
            c.expect_eq(ev.actor, 4, "first sector head");
            c.expect_eq(ev.get("cands"),
                        std::string("4:69982000,5:68982000,6:59982000,7:58982000"),
                        "first sector-head pool");
        }
        if (ev.get("role") == "SIC" && ev.get_u64("rank") == 2) {
            sic2 = true;
            c.expect_eq(ev.actor, 5, "second sector head");
            c.expect_eq(ev.get("cands"), std::string("5:68982000,6:59982000,7:58982000"),
                        "second sector-head pool");
        }
        if (ev.get("role") == "SM" && ev.actor == 6) sm6 = true;
        if (ev.get("role") == "SM" && ev.actor == 7) sm7 = true;
    }
    c.expect(sic1 && sic2, "expected two sector-head elections at tick 3");
    c.expect(sm6 && sm7, "expected monitors 6 and 7 elected at tick 3");

    std::size_t profiles3 = 0;
    for (const TraceEvent& ev : t.events()) {
        if (ev.kind == TraceKind::Profile && ev.tick == 3) ++profiles3;
    }
    c.expect_eq(profiles3, 9, "profiles issued at tick 3");

    // The opening shot: fake request at 30, forced wake at 31, the victim's
    // deceived answer carries its drained residual.
    const TraceEvent* fire = at_tick(t, TraceKind::AttackFire, 30);
    c.expect(fire != nullptr && fire->get_u64("target") == 0, "first fire at 30 targeting 0");
    const TraceEvent* wake = at_tick(t, TraceKind::WakeForced, 31, 0);
    c.expect(wake != nullptr, "forced wake at 31");
    if (wake != nullptr) c.expect_eq(wake->get_i64("cost"), 31000, "forced wake cost");
    bool bait_answer = false;
    for (const TraceEvent& ev : t.events()) {
        if (ev.kind == TraceKind::Send && ev.tick == 31 && ev.actor == 0 &&
            ev.get("kind") == "DATA") {
            bait_answer = true;
            c.expect_eq(ev.get_i64("res"), 29889500, "victim residual on the baited answer");
        }
    }
    c.expect(bait_answer, "victim answered the bait at 31");

    // Phase 1 at the sector monitor: sleep-window violation plus a residual
    // under the class baseline bar.
    const TraceEvent* p1 = at_tick(t, TraceKind::Phase1, 33, 6);
    c.expect(p1 != nullptr, "no phase-1 verdict at 33");
    std::uint64_t bad_pkt = 0;
    if (p1 != nullptr) {
        bad_pkt = p1->get_u64("pkt");
        c.expect_eq(p1->get_u64("origin"), 0, "phase-1 origin");
        c.expect_eq(p1->get("tag"), std::string("INVALID"), "phase-1 tag");
        c.expect_eq(p1->get("reason"), std::string("SLEEP_VIOLATION"), "phase-1 reason");
        c.expect_eq(p1->get_u64("susp"), 1, "phase-1 suspicion");
        c.expect_eq(p1->get_u64("count"), 2, "phase-1 window count");
        c.expect_eq(p1->get_i64("res"), 29889500, "phase-1 residual");
        c.expect_eq(p1->get_i64("bar"), 39954120, "phase-1 threshold");
    }

    // Phase 2 at the head: confirmed on the sleep-violation rule alone.
    const TraceEvent* p2 = at_tick(t, TraceKind::Phase2, 34, 8);
    c.expect(p2 != nullptr, "no phase-2 decision at 34");
    if (p2 != nullptr) {
        c.expect_eq(p2->get_u64("confirmed"), 1, "phase-2 confirmation");
        c.expect_eq(p2->get_u64("invalids"), 1, "phase-2 corroboration count");
        c.expect_eq(p2->get("decision"), std::string("DROP"), "phase-2 decision");
    }

    const TraceEvent* iso = at_tick(t, TraceKind::Isolate, 35, 9);
    c.expect(iso != nullptr, "no isolation at 35");
    if (iso != nullptr) c.expect_eq(iso->get_u64("node"), 0, "isolated node");

    // The flagged packet dies at the head; clean data keeps flowing.
    std::size_t data_at_sg = 0, phase1_total = 0, phase1_valid = 0, phase2_total = 0;
    std::size_t confirmed = 0, frozen_fakes = 0;
    bool bad_pkt_delivered_to_sg = false, clean_delivered = false;
    for (const TraceEvent& ev : t.events()) {
        if (ev.kind == TraceKind::Deliver && ev.actor == 9 && ev.get("status") == "OK" &&
            ev.get("kind") == "DATA") {
            ++data_at_sg;
            if (bad_pkt != 0 && ev.get_u64("pkt") == bad_pkt) bad_pkt_delivered_to_sg = true;
            const std::string* tag = ev.find("tag");
            if (tag != nullptr && *tag == "VALID" && ev.get_u64("origin") == 1) {
                clean_delivered = true;
            }
        }
        if (ev.kind == TraceKind::Deliver && ev.actor == 0 &&
            ev.get("kind") == "FAKE_REQUEST" && ev.get("status") == "ISOLATED_DST") {
            ++frozen_fakes;
        }
        if (ev.kind == TraceKind::Phase1) {
            ++phase1_total;
            if (ev.get("tag") == "VALID") ++phase1_valid;
        }
        if (ev.kind == TraceKind::Phase2) {
            ++phase2_total;
            if (ev.get("confirmed") == "1") ++confirmed;
        }
    }
    c.expect(!bad_pkt_delivered_to_sg, "flagged packet reached the gateway");
    c.expect(clean_delivered, "no clean tagged data delivered to the gateway");
    c.expect_eq(data_at_sg, 28, "data deliveries at the gateway");
    c.expect_eq(phase1_total, 29, "phase-1 verdicts");
    c.expect_eq(phase1_valid, 28, "clean phase-1 verdicts");
    c.expect_eq(phase2_total, 29, "phase-2 decisions");
    c.expect_eq(confirmed, 1, "confirmed intrusions");
    c.expect_eq(frozen_fakes, 17, "post-isolation fakes bounced");
    c.expect_eq(count_kind(t, TraceKind::WakeForced), 1, "forced wakes");
    c.expect_eq(count_kind(t, TraceKind::Isolate), 1, "isolations");
    c.expect_eq(count_kind(t, TraceKind::Death), 0, "deaths");
    c.expect_eq(count_kind(t, TraceKind::CTag), 0, "head-side tag fallbacks");
    c.expect_eq(count_kind(t, TraceKind::Drop), 0, "routing drops");
    c.expect_eq(count_kind(t, TraceKind::Note), 0, "rotations or notes");
    c.expect_eq(count_kind(t, TraceKind::Halt), 0, "halts");
    c.expect_eq(t.events().back().get_u64("alive"), 9, "final alive count");

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 1.0, "walkthrough run exceeded one second");

    ok = c.fails.empty();
    if (!ok) return c.summary();
    std::ostringstream out;
    out << "reference walkthrough reproduced, " << t.events().size() << " events, "
        << std::fixed << secs << "s";
    return out.str();
}

// --- AC-2: no attacker, no alarms, ever ---

std::string ac2(bool& ok) {
    const auto t0 = std::chrono::steady_clock::now();
    Checker c;
    std::size_t runs = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        ScenarioConfig cfg = load_cfg("quiet_network.json");
        cfg.seed = seed;
        c.expect(materialize_nodes(cfg).size() <= 30, "network larger than intended");
        const TraceLog t = run_cfg(std::move(cfg));
        const RunMetrics m = RunMetrics::from_trace(t);
        ++runs;
        if (m.phase2_confirmed != 0 || !m.isolated.empty() || m.false_positives != 0) {
            std::ostringstream out;
            out << "seed " << seed << ": confirmed=" << m.phase2_confirmed
                << " isolated=" << m.isolated.size() << " fp=" << m.false_positives;
            c.fails.push_back(out.str());
        }
        c.expect(count_kind(t, TraceKind::AttackFire) == 0, "attack fire in a quiet scenario");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 30.0, "quiet sweep exceeded thirty seconds");

    ok = c.fails.empty();
    if (!ok) return c.summary();
    std::ostringstream out;
    out << runs << " quiet runs, zero confirmations and zero isolations, " << std::fixed << secs
        << "s";
    return out.str();
}

// --- AC-3: the replay oracle agrees with every in-run verdict ---

std::string ac3(bool& ok) {
    Checker c;
    std::size_t phase1_total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ScenarioConfig cfg = load_cfg("oracle_small.json");
        cfg.seed = seed;
        c.expect(materialize_nodes(cfg).size() <= 12, "oracle scenario grew past 12 nodes");
        const TraceLog t = run_cfg(std::move(cfg));
        if (t.events().size() > 2000) {
            c.fails.push_back("seed " + std::to_string(seed) + ": " +
                              std::to_string(t.events().size()) + " events, budget is 2000");
        }
        const OracleReport rep = verify_trace(t);
        phase1_total += rep.phase1_checked;
        for (const std::string& v : rep.violations) {
            c.fails.push_back("seed " + std::to_string(seed) + ": " + v);
        }
    }
    c.expect(phase1_total > 0, "no phase-1 verdicts exercised");

    ok = c.fails.empty();
    if (!ok) return c.summary();
    return std::to_string(phase1_total) + " phase-1 verdicts re-derived across 20 seeds, "
           "zero disagreements";
}

// The canonical trace set shared by the conservation and invariant checks.
std::vector<TraceLog> canonical_traces() {
    std::vector<TraceLog> out;
    out.push_back(run_named("fig4.json", 1, true));
    out.push_back(run_named("fig4.json", 1, false));
    out.push_back(run_named("blind_flood.json", 1, true));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        out.push_back(run_named("oracle_small.json", seed, true));
    }
    out.push_back(run_named("sweep_attack.json", 1, true));
    out.push_back(run_named("sweep_attack.json", 1, false));
    out.push_back(run_named("quiet_network.json", 1, true));
    return out;
}

// --- AC-4: every consumed micro is attributed, exactly ---

std::string ac4(bool& ok) {
    Checker c;
    std::size_t lines = 0;
    std::size_t ti = 0;
    for (const TraceLog& t : canonical_traces()) {
        ++ti;
        for (const TraceEvent& ev : t.events()) {
            if (ev.kind != TraceKind::Energy) continue;
            ++lines;
            const Micro spent = ev.get_i64("tx") + ev.get_i64("rx") + ev.get_i64("sense") +
                                ev.get_i64("idle") + ev.get_i64("sleep") + ev.get_i64("detect");
            if (ev.get_i64("initial") - ev.get_i64("res") != spent) {
                std::ostringstream out;
                out << "trace " << ti << " node " << ev.actor << ": initial-res="
                    << ev.get_i64("initial") - ev.get_i64("res") << " but actions sum to "
                    << spent;
                c.fails.push_back(out.str());
            }
        }
    }
    c.expect(lines > 0, "no energy lines found");

    ok = c.fails.empty();
    if (!ok) return c.summary();
    return std::to_string(lines) + " energy ledgers balanced exactly";
}

// --- AC-5: every election obeys its rule against the logged pool ---

std::string ac5(bool& ok) {
    Checker c;
    std::size_t elections = 0, rotations = 0;
    std::size_t ti = 0;
    for (const TraceLog& t : canonical_traces()) {
        ++ti;
        const OracleReport rep = verify_trace(t);
        elections += rep.elections_checked;
        for (const std::string& v : rep.violations) {
            c.fails.push_back("trace " + std::to_string(ti) + ": " + v);
        }
        for (const TraceEvent& ev : t.events()) {
            if (ev.kind == TraceKind::Note && ev.find("trigger") != nullptr) ++rotations;
        }
    }
    c.expect(elections > 0, "no elections checked");
    c.expect(rotations > 0, "no rotation was ever triggered across the set");

    ok = c.fails.empty();
    if (!ok) return c.summary();
    return std::to_string(elections) + " elections verified (" + std::to_string(rotations) +
           " rotations observed), zero violations";
}

// --- AC-6: detection extends lifetime under a persistent targeted attack ---

std::string ac6(bool& ok) {
    const auto t0 = std::chrono::steady_clock::now();
    Checker c;

    auto pair_for_seed = [](std::uint64_t seed) {
        const RunMetrics on = RunMetrics::from_trace(run_named("sweep_attack.json", seed, true));
        const RunMetrics off =
            RunMetrics::from_trace(run_named("sweep_attack.json", seed, false));
        return compare_runs(on, off);
    };
    std::vector<std::future<PairComparison>> futs;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        futs.push_back(std::async(std::launch::async, pair_for_seed, seed));
    }
    std::size_t not_worse = 0;
    std::int64_t total_gain = 0;
    for (std::size_t i = 0; i < futs.size(); ++i) {
        const PairComparison pc = futs[i].get();
        if (pc.lifetime_on >= pc.lifetime_off) ++not_worse;
        total_gain += pc.lifetime_gain;
        if (pc.lifetime_gain < 0) {
            c.fails.push_back("seed " + std::to_string(i + 1) + ": lifetime shrank by " +
                              std::to_string(-pc.lifetime_gain));
        }
    }
    const double mean_gain = static_cast<double>(total_gain) / 20.0;
    c.expect(not_worse >= 18, "detection helped in only " + std::to_string(not_worse) +
                                  "/20 pairs, need 18");
    c.expect(mean_gain > 0.0, "mean lifetime gain not positive");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 120.0, "paired sweep exceeded two minutes");

    ok = c.fails.empty();
    if (!ok) return c.summary();
    std::ostringstream out;
    out << not_worse << "/20 pairs not worse, mean lifetime gain " << std::fixed << mean_gain
        << " ticks, " << secs << "s";
    return out.str();
}

// --- AC-7: byte-identical reruns ---

std::string ac7(bool& ok) {
    Checker c;
    const std::string a1 = run_named("fig4.json", 1, true).serialize();
    const std::string a2 = run_named("fig4.json", 1, true).serialize();
    c.expect(a1 == a2, "reference scenario reruns differ");
    const std::string b1 = run_named("quiet_network.json", 3, true).serialize();
    const std::string b2 = run_named("quiet_network.json", 3, true).serialize();
    c.expect(b1 == b2, "generated scenario reruns differ");
    c.expect(!a1.empty() && !b1.empty(), "empty serialization");

    ok = c.fails.empty();
    if (!ok) return c.summary();
    return "two scenarios, byte-identical reruns (" + std::to_string(a1.size() + b1.size()) +
           " bytes compared)";
}

// --- AC-8: isolation seals the node off for the rest of the run ---

void check_containment(const TraceLog& t, const char* label, Checker& c) {
    std::map<NodeId, SimTime> cutoffs;
    for (const TraceEvent& ev : t.events()) {
        if (ev.kind == TraceKind::Isolate) {
            cutoffs.emplace(static_cast<NodeId>(ev.get_u64("node")), ev.tick);
        }
    }
    c.expect(!cutoffs.empty(), std::string(label) + ": no isolation to check");
    for (const auto& [node, tick] : cutoffs) {
        bool bounced = false;
        for (const TraceEvent& ev : t.events()) {
            if (ev.tick <= tick) continue;
            if (ev.kind == TraceKind::Send && ev.actor == node) {
                c.fails.push_back(std::string(label) + ": node " + std::to_string(node) +
                                  " transmits after isolation at tick " +
                                  std::to_string(ev.tick));
            }
            if (ev.kind == TraceKind::Deliver && ev.get("status") == "OK" &&
                static_cast<NodeId>(ev.get_u64("origin")) == node) {
                c.fails.push_back(std::string(label) + ": traffic from node " +
                                  std::to_string(node) + " accepted at tick " +
                                  std::to_string(ev.tick));
            }
            if (ev.kind == TraceKind::Deliver && ev.actor == node &&
                ev.get("status") == "ISOLATED_DST") {
                bounced = true;
            }
        }
        c.expect(bounced, std::string(label) + ": nothing ever bounced off node " +
                              std::to_string(node));
    }
}

std::string ac8(bool& ok) {
    Checker c;
    const TraceLog flood = run_named("blind_flood.json", 1, true);
    check_containment(flood, "flood", c);
    const OracleReport rep = verify_trace(flood);
    for (const std::string& v : rep.violations) c.fails.push_back("flood oracle: " + v);

    const TraceLog reference = run_named("fig4.json", 1, true);
    check_containment(reference, "reference", c);

    ok = c.fails.empty();
    if (!ok) return c.summary();
    return "isolated nodes stayed silent and unheard through both runs";
}

}  // namespace

int main(int argc, char** argv) {
    std::optional<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--scenarios" && i + 1 < argc) {
            g_dir = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            const std::string which = argv[++i];
            if (which.size() == 3 && which.rfind("ac", 0) == 0 && which[2] >= '1' &&
                which[2] <= '8') {
                only = which[2] - '0';
            } else {
                std::fprintf(stderr, "unknown criterion '%s', expected ac1..ac8\n",
                             which.c_str());
                return 2;
            }
        } else {
            std::fprintf(stderr, "usage: acceptance [--scenarios DIR] [--only acN]\n");
            return 2;
        }
    }

    using Fn = std::string (*)(bool&);
    const std::pair<int, Fn> table[] = {{1, ac1}, {2, ac2}, {3, ac3}, {4, ac4},
                                        {5, ac5}, {6, ac6}, {7, ac7}, {8, ac8}};
    bool all_ok = true;
    for (const auto& [id, fn] : table) {
        if (only && *only != id) continue;
        bool ok = false;
        std::string detail;
        try {
            detail = fn(ok);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        std::printf("AC-%d %s: %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
        if (!ok) all_ok = false;
    }
    return all_ok ? 0 : 1;
}
