#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "wsn/trace.hpp"

using namespace wsn;

namespace {

TraceLog sample_log() {
    TraceLog log;
    log.meta.scenario = "sample";
    log.meta.seed = 42;
    log.meta.horizon = 500;
    log.meta.detection = true;
    log.meta.config_hash = 0xdeadbeef01234567ull;
    log.meta.radius = 27.5;
    log.meta.latency = 1;
    log.meta.round_period = 20;
    log.meta.election_period = 100;
    log.meta.sample_period = 250;
    log.meta.sectors = 2;
    log.meta.gateway = 0;
    log.meta.costs = {2000, 1000, 500, 5000, 500, 200};
    log.meta.classes.push_back({"gw", 1000 * kMicroPerUnit, 4, {1, 0, 1}});
    log.meta.classes.push_back({"leaf", 50 * kMicroPerUnit, 1, {20, 0, 6}});
    log.meta.nodes.push_back({0, 0.0, 0.0, "gw", false, 0});
    log.meta.nodes.push_back({1, 12.25, -3.5, "leaf", false, 0});
    log.meta.nodes.push_back({2, 40.0, 40.0, "leaf", true, 30});
    log.meta.plans.push_back({0, 2, "1", AttackMode::Blind, 50, 3, 0});

    TraceEvent send(0, TraceKind::Send, 0);
    send.add("pkt", std::uint64_t{1}).add("kind", "QUERY").add("to", "*");
    log.append(send);
    TraceEvent note(10, TraceKind::Note, kNoNode);
    note.add("alive", 3u);
    log.append(note);
    TraceEvent end(500, TraceKind::End, kNoNode);
    end.add("reason", "horizon").add("alive", 2u);
    log.append(end);
    return log;
}

}  // namespace

TEST_CASE("event lines render tick, kind, actor and fields") {
    TraceEvent ev(7, TraceKind::Send, 3);
    ev.add("pkt", std::uint64_t{12}).add("kind", "DATA");
    CHECK(ev.line() == "7\tSEND\t3\tpkt=12\tkind=DATA");

    TraceEvent bare(0, TraceKind::Note, kNoNode);
    CHECK(bare.line() == "0\tNOTE\t-");
}

TEST_CASE("field accessors") {
    TraceEvent ev(1, TraceKind::Deliver, 2);
    ev.add("status", "OK").add("res", std::int64_t{-5}).add("count", 19u);
    CHECK(ev.get("status") == "OK");
    CHECK(ev.get_i64("res") == -5);
    CHECK(ev.get_u64("count") == 19);
    CHECK(ev.find("missing") == nullptr);
    CHECK_THROWS_AS(ev.get("missing"), std::runtime_error);
    CHECK_THROWS_AS(ev.get_u64("status"), std::runtime_error);
}

TEST_CASE("serialize, parse, serialize is byte-stable") {
    TraceLog log = sample_log();
    const std::string first = log.serialize();
    TraceLog parsed = TraceLog::parse_string(first);
    CHECK(parsed.serialize() == first);

    CHECK(parsed.meta.scenario == "sample");
    CHECK(parsed.meta.seed == 42);
    CHECK(parsed.meta.config_hash == 0xdeadbeef01234567ull);
    CHECK(parsed.meta.gateway == 0);
    CHECK(parsed.meta.radius == 27.5);
    CHECK(parsed.meta.costs.idle_listen == 5000);
    REQUIRE(parsed.meta.classes.size() == 2);
    CHECK(parsed.meta.classes[1].schedule == SleepSchedule{20, 0, 6});
    CHECK(parsed.meta.classes[1].layer == 1);
    REQUIRE(parsed.meta.nodes.size() == 3);
    CHECK(parsed.meta.nodes[1].x == 12.25);
    CHECK(parsed.meta.nodes[2].attacker);
    CHECK(parsed.meta.nodes[2].arrival == 30);
    REQUIRE(parsed.meta.plans.size() == 1);
    CHECK(parsed.meta.plans[0].mode == AttackMode::Blind);
    CHECK(parsed.meta.plans[0].target == "1");

    REQUIRE(parsed.events().size() == 3);
    CHECK(parsed.events()[1].actor == kNoNode);
    CHECK(parsed.events()[2].kind == TraceKind::End);
}

TEST_CASE("save and load round-trip through a file") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "wsnsim_trace_test.trace";
    TraceLog log = sample_log();
    log.save(path.string());
    TraceLog loaded = TraceLog::load(path.string());
    CHECK(loaded.serialize() == log.serialize());
    std::remove(path.string().c_str());
}

TEST_CASE("parser reports the offending line") {
    CHECK_THROWS_WITH_AS(TraceLog::parse_string("5\tBOGUS\t1\n"),
                         doctest::Contains("line 1"), std::runtime_error);
    CHECK_THROWS_WITH_AS(TraceLog::parse_string("0\tSEND\t1\tnovalue\n"),
                         doctest::Contains("without '='"), std::runtime_error);
    CHECK_THROWS_AS(TraceLog::parse_string("#mystery\ta=1\n"), std::runtime_error);
    CHECK_THROWS_AS(TraceLog::parse_string("0\tSEND\n"), std::runtime_error);
}

TEST_CASE("parser tolerates blank lines, CR endings and missing END") {
    TraceLog log = TraceLog::parse_string("\n3\tNOTE\t-\talive=2\r\n\n");
    REQUIRE(log.events().size() == 1);
    CHECK(log.events()[0].tick == 3);
    CHECK(log.events()[0].get("alive") == "2");
}

TEST_CASE("doubles render in shortest round-trip form") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(27.5) == "27.5");
    for (double v : {0.0, 1.0, -3.25, 1e-9, 123456.789, 1.0 / 3.0}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK_THROWS_AS(parse_double("12x"), std::runtime_error);
}

TEST_CASE("kind and status names round-trip") {
    for (int i = 0; i <= static_cast<int>(TraceKind::End); ++i) {
        const auto k = static_cast<TraceKind>(i);
        CHECK(trace_kind_from_name(trace_kind_name(k)) == k);
    }
    for (int i = 0; i <= static_cast<int>(DeliverStatus::IsolatedSrc); ++i) {
        const auto s = static_cast<DeliverStatus>(i);
        CHECK(deliver_status_from_name(deliver_status_name(s)) == s);
    }
    CHECK_THROWS_AS(trace_kind_from_name("NOPE"), std::runtime_error);
    CHECK_THROWS_AS(deliver_status_from_name("NOPE"), std::runtime_error);
}
