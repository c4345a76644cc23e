#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsn/attacker.hpp"
#include "wsn/detection.hpp"
#include "wsn/energy.hpp"
#include "wsn/types.hpp"

namespace wsn {

// Run traces are line-oriented text: '#' metadata lines first, then one line
// per logged event, tab separated:
//   tick<TAB>KIND<TAB>actor<TAB>key=value<TAB>key=value...
// The format is the exchange contract between the simulator, the metrics
// pass and the replay checker, so field values never contain whitespace and
// serialization is canonical (same run, same bytes).

enum class TraceKind : std::uint8_t {
    Send,
    Deliver,
    Drop,
    Phase1,
    Phase2,
    CTag,  // conservative tag applied at the cluster head, no monitor in path
    Elect,
    Profile,
    Isolate,
    WakeForced,
    AttackFire,
    Death,
    Energy,
    Arrive,
    Plan,
    Note,
    Halt,
    End,
};

const char* trace_kind_name(TraceKind k);
TraceKind trace_kind_from_name(std::string_view name);

enum class DeliverStatus : std::uint8_t {
    Ok,
    Dead,         // receiver already dead
    Asleep,       // receiver sleeping, radio off
    IsolatedDst,  // receiver on the isolation list
    IsolatedSrc,  // packet origin on the isolation list, dropped on arrival
};

const char* deliver_status_name(DeliverStatus s);
DeliverStatus deliver_status_from_name(std::string_view name);

struct TraceEvent {
    SimTime tick = 0;
    TraceKind kind = TraceKind::Note;
    NodeId actor = kNoNode;  // kNoNode renders as '-'
    std::vector<std::pair<std::string, std::string>> fields;

    TraceEvent() = default;
    TraceEvent(SimTime t, TraceKind k, NodeId a) : tick(t), kind(k), actor(a) {}

    TraceEvent& add(std::string key, std::string value);
    TraceEvent& add(std::string key, const char* value);
    template <typename T>
        requires std::integral<T>
    TraceEvent& add(std::string key, T value) {
        return add(std::move(key), std::to_string(value));
    }

    const std::string* find(std::string_view key) const;
    // Throwing accessors for required fields.
    const std::string& get(std::string_view key) const;
    std::uint64_t get_u64(std::string_view key) const;
    std::int64_t get_i64(std::string_view key) const;

    std::string line() const;
};

struct ClassMeta {
    std::string name;
    Micro initial = 0;  // nominal initial energy for this class
    std::uint32_t layer = 1;
    SleepSchedule schedule;
};

struct NodeMeta {
    NodeId id = kNoNode;
    double x = 0.0;
    double y = 0.0;
    std::string cls;
    bool attacker = false;
    SimTime arrival = 0;  // 0 = present from the start
};

struct PlanMeta {
    std::uint32_t index = 0;
    NodeId attacker = kNoNode;
    std::string target;  // numeric id or picker token
    AttackMode mode = AttackMode::SleepTargeted;
    SimTime start = 0;
    SimTime period = 1;
    std::uint32_t shots = 0;
};

struct TraceMeta {
    std::string scenario;
    std::uint64_t seed = 0;
    SimTime horizon = 0;
    bool detection = true;
    std::uint64_t config_hash = 0;

    double radius = 0.0;
    SimTime latency = 1;
    SimTime round_period = 20;
    SimTime election_period = 100;
    SimTime sample_period = 500;
    std::uint32_t sectors = 2;
    NodeId gateway = kNoNode;
    DetectionParams detect;
    CostTable costs;

    std::vector<ClassMeta> classes;
    std::vector<NodeMeta> nodes;
    std::vector<PlanMeta> plans;
};

class TraceLog {
public:
    TraceMeta meta;

    void append(TraceEvent ev) { events_.push_back(std::move(ev)); }
    const std::vector<TraceEvent>& events() const { return events_; }

    std::string serialize() const;
    void save(const std::string& path) const;

    static TraceLog parse(std::istream& in);
    static TraceLog parse_string(const std::string& text);
    static TraceLog load(const std::string& path);

private:
    std::vector<TraceEvent> events_;
};

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace wsn
