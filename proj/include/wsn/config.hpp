#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wsn/attacker.hpp"
#include "wsn/detection.hpp"
#include "wsn/energy.hpp"
#include "wsn/types.hpp"

#include <json.hpp>

namespace wsn {

// Scenario files are JSON (comments allowed). Unknown keys are hard errors;
// omitted optional keys fall back to defaults and each applied default is
// reported to the caller.

struct ClassSpec {
    std::string name;
    Micro initial = 0;
    // Capacity tier: 1 = sense-only, 2 = may hold SIC/SM, 3 = may hold CIC,
    // 4 = gateway grade. Election candidacy filters on this.
    std::uint32_t layer = 1;
    SleepSchedule schedule;
};

struct NodeSpec {
    NodeId id = kNoNode;
    double x = 0.0;
    double y = 0.0;
    std::string cls;
    std::optional<Micro> initial;  // overrides the class nominal when set
    bool attacker = false;
    SimTime arrival = 0;  // 0 = present from the start
};

struct GenerateSpec {
    bool enabled = false;
    double center_x = 0.0;
    double center_y = 0.0;
    double disk_radius = 0.0;
    std::string gateway_class;
    // class name -> how many nodes, placed in listed order
    std::vector<std::pair<std::string, std::uint32_t>> mix;
};

struct AttackSpec {
    NodeId attacker = kNoNode;
    std::string target;  // numeric id or "@sectored_leaf"
    AttackMode mode = AttackMode::SleepTargeted;
    SimTime start = 0;
    SimTime period = 1;
    std::uint32_t shots = 0;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioConfig {
    std::string scenario = "unnamed";
    std::uint64_t seed = 0;
    SimTime horizon = 0;

    double radius = 0.0;
    SimTime latency = 1;
    SimTime round_period = 20;
    SimTime election_period = 100;
    SimTime sample_period = 500;
    std::uint32_t sectors = 2;

    bool detection_enabled = true;
    DetectionParams detect;
    CostTable costs;

    std::vector<ClassSpec> classes;  // sorted by name
    NodeId gateway = kNoNode;
    std::vector<NodeSpec> nodes;     // explicit nodes, arrivals included
    GenerateSpec generate;
    std::vector<AttackSpec> attacks;

    static ScenarioConfig from_json(const nlohmann::json& j,
                                    std::vector<std::string>* defaults_applied = nullptr);
    static ScenarioConfig load(const std::string& path,
                               std::vector<std::string>* defaults_applied = nullptr);

    // Resolved round-trippable form (defaults filled in, generate block kept).
    nlohmann::json to_json() const;

    // Canonical identity of the scenario. Detection on/off runs of the same
    // scenario hash identically so paired comparisons can check compatibility.
    std::uint64_t hash() const;

    const ClassSpec* find_class(const std::string& name) const;
};

// Explicit nodes plus generated placement, ids assigned and checked. The
// placement stream depends only on (seed, "topology").
std::vector<NodeSpec> materialize_nodes(const ScenarioConfig& cfg);

}  // namespace wsn
