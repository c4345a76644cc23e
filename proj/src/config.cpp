#include "wsn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "wsn/engine.hpp"

namespace wsn {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config: " + path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&key](const char* a) { return key == a; }) == allowed.end()) {
            fail(join(path, key), "unknown key");
        }
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(join(path, key), "required key missing");
    return *it;
}

bool get_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected a boolean");
    return v.get<bool>();
}

std::uint64_t get_u64(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    fail(path, "expected a non-negative integer");
}

double get_real(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

Micro get_energy(const json& v, const std::string& path) {
    const double units = get_real(v, path);
    if (units < 0) fail(path, "energy cannot be negative");
    return to_micro(units);
}

// Optional-with-default helpers; applied defaults are reported by name.
struct Defaults {
    std::vector<std::string>* sink;
    void note(const std::string& path, const std::string& rendered) {
        if (sink) sink->push_back(path + " = " + rendered);
    }
};

std::uint64_t opt_u64(const json& obj, const std::string& path, const char* key,
                      std::uint64_t fallback, Defaults& d) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        d.note(join(path, key), std::to_string(fallback));
        return fallback;
    }
    return get_u64(*it, join(path, key));
}

double opt_real(const json& obj, const std::string& path, const char* key, double fallback,
                Defaults& d) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        d.note(join(path, key), std::to_string(fallback));
        return fallback;
    }
    return get_real(*it, join(path, key));
}

bool opt_bool(const json& obj, const std::string& path, const char* key, bool fallback,
              Defaults& d) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        d.note(join(path, key), fallback ? "true" : "false");
        return fallback;
    }
    return get_bool(*it, join(path, key));
}

SleepSchedule parse_schedule(const json& obj, const std::string& path) {
    SleepSchedule s;
    s.period = get_u64(require(obj, path, "period"), join(path, "period"));
    s.wake_offset = get_u64(require(obj, path, "wake_offset"), join(path, "wake_offset"));
    s.wake_len = get_u64(require(obj, path, "wake_len"), join(path, "wake_len"));
    if (s.period < 1) fail(join(path, "period"), "must be >= 1");
    if (s.wake_len < 1) fail(join(path, "wake_len"), "must be >= 1");
    if (s.wake_len > s.period) fail(join(path, "wake_len"), "exceeds period");
    if (s.wake_offset + s.wake_len > s.period) {
        fail(join(path, "wake_offset"), "wake window must not wrap the period");
    }
    return s;
}

NodeSpec parse_node(const json& obj, const std::string& path, const ScenarioConfig& cfg,
                    Defaults& d) {
    check_keys(obj, path, {"id", "x", "y", "class", "initial", "attacker", "arrival"});
    NodeSpec n;
    n.id = static_cast<NodeId>(get_u64(require(obj, path, "id"), join(path, "id")));
    n.x = get_real(require(obj, path, "x"), join(path, "x"));
    n.y = get_real(require(obj, path, "y"), join(path, "y"));
    n.cls = get_string(require(obj, path, "class"), join(path, "class"));
    if (!cfg.find_class(n.cls)) fail(join(path, "class"), "unknown class '" + n.cls + "'");
    if (const auto it = obj.find("initial"); it != obj.end()) {
        const Micro e = get_energy(*it, join(path, "initial"));
        if (e <= 0) fail(join(path, "initial"), "must be positive");
        n.initial = e;
    }
    n.attacker = opt_bool(obj, path, "attacker", false, d);
    n.arrival = opt_u64(obj, path, "arrival", 0, d);
    if (n.attacker && n.arrival > 0) fail(path, "arriving attackers are not supported");
    return n;
}

}  // namespace

const ClassSpec* ScenarioConfig::find_class(const std::string& name) const {
    for (const ClassSpec& c : classes) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

ScenarioConfig ScenarioConfig::from_json(const json& j, std::vector<std::string>* defaults_applied) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    Defaults d{defaults_applied};
    ScenarioConfig cfg;

    check_keys(j, "", {"scenario", "seed", "horizon", "radius", "latency", "round_period",
                       "election_period", "sample_period", "sectors", "detection", "costs",
                       "classes", "gateway", "nodes", "generate", "attacks"});

    cfg.scenario = get_string(require(j, "", "scenario"), "scenario");
    if (cfg.scenario.empty() ||
        cfg.scenario.find_first_of(" \t\n=") != std::string::npos) {
        fail("scenario", "name must be a non-empty token without whitespace or '='");
    }
    cfg.seed = get_u64(require(j, "", "seed"), "seed");
    cfg.horizon = get_u64(require(j, "", "horizon"), "horizon");
    cfg.radius = get_real(require(j, "", "radius"), "radius");
    if (cfg.radius <= 0) fail("radius", "must be positive");

    cfg.latency = opt_u64(j, "", "latency", 1, d);
    if (cfg.latency < 1) fail("latency", "must be >= 1");
    cfg.round_period = opt_u64(j, "", "round_period", 20, d);
    if (cfg.round_period < 1) fail("round_period", "must be >= 1");
    cfg.election_period = opt_u64(j, "", "election_period", 100, d);
    if (cfg.election_period < 1) fail("election_period", "must be >= 1");
    cfg.sample_period = opt_u64(j, "", "sample_period", 500, d);
    if (cfg.sample_period < 1) fail("sample_period", "must be >= 1");
    cfg.sectors = static_cast<std::uint32_t>(opt_u64(j, "", "sectors", 2, d));
    if (cfg.sectors < 1) fail("sectors", "must be >= 1");

    if (const auto it = j.find("detection"); it != j.end()) {
        const json& det = *it;
        if (!det.is_object()) fail("detection", "expected an object");
        check_keys(det, "detection",
                   {"enabled", "rate_threshold", "window", "energy_margin", "corroboration"});
        cfg.detection_enabled = opt_bool(det, "detection", "enabled", true, d);
        cfg.detect.rate_threshold =
            static_cast<std::uint32_t>(opt_u64(det, "detection", "rate_threshold", 10, d));
        cfg.detect.window = opt_u64(det, "detection", "window", 20, d);
        if (cfg.detect.window < 1) fail("detection.window", "must be >= 1");
        const double margin = opt_real(det, "detection", "energy_margin", 0.8, d);
        if (margin < 0 || margin > 2) fail("detection.energy_margin", "must be in [0, 2]");
        cfg.detect.energy_margin_ppm = static_cast<std::uint32_t>(std::llround(margin * 1e6));
        cfg.detect.corroboration =
            static_cast<std::uint32_t>(opt_u64(det, "detection", "corroboration", 3, d));
        if (cfg.detect.corroboration < 1) fail("detection.corroboration", "must be >= 1");
    } else {
        d.note("detection", "(all defaults)");
    }

    {
        const json empty = json::object();
        const json& costs = j.contains("costs") ? j.at("costs") : empty;
        if (!costs.is_object()) fail("costs", "expected an object");
        check_keys(costs, "costs", {"transmit", "receive", "sense", "idle_listen", "sleep", "detect"});
        auto cost = [&costs, &d](const char* key, double fallback) -> Micro {
            const auto it = costs.find(key);
            if (it == costs.end()) {
                d.note(join("costs", key), std::to_string(fallback));
                return to_micro(fallback);
            }
            return get_energy(*it, join("costs", key));
        };
        cfg.costs.transmit = cost("transmit", 0.002);
        cfg.costs.receive = cost("receive", 0.001);
        cfg.costs.sense = cost("sense", 0.0005);
        cfg.costs.idle_listen = cost("idle_listen", 0.005);
        cfg.costs.sleep = cost("sleep", 0.0005);
        cfg.costs.detect = cost("detect", 0.0002);
    }

    {
        const json& classes = require(j, "", "classes");
        if (!classes.is_object() || classes.empty()) fail("classes", "expected a non-empty object");
        for (const auto& [name, body] : classes.items()) {
            const std::string path = join("classes", name);
            if (name.empty() || name.find_first_of(" \t\n=") != std::string::npos) {
                fail(path, "class name must be a token without whitespace or '='");
            }
            if (!body.is_object()) fail(path, "expected an object");
            check_keys(body, path, {"initial", "layer", "period", "wake_offset", "wake_len"});
            ClassSpec c;
            c.name = name;
            c.initial = get_energy(require(body, path, "initial"), join(path, "initial"));
            if (c.initial <= 0) fail(join(path, "initial"), "must be positive");
            c.layer = static_cast<std::uint32_t>(
                get_u64(require(body, path, "layer"), join(path, "layer")));
            if (c.layer < 1 || c.layer > 4) fail(join(path, "layer"), "must be in 1..4");
            c.schedule = parse_schedule(body, path);
            cfg.classes.push_back(std::move(c));
        }
        // nlohmann objects iterate sorted by key, so this is already canonical
    }

    if (const auto it = j.find("generate"); it != j.end()) {
        const json& gen = *it;
        if (!gen.is_object()) fail("generate", "expected an object");
        check_keys(gen, "generate", {"center", "disk_radius", "gateway_class", "mix"});
        cfg.generate.enabled = true;
        const json& center = require(gen, "generate", "center");
        if (!center.is_array() || center.size() != 2) {
            fail("generate.center", "expected [x, y]");
        }
        cfg.generate.center_x = get_real(center[0], "generate.center[0]");
        cfg.generate.center_y = get_real(center[1], "generate.center[1]");
        cfg.generate.disk_radius =
            get_real(require(gen, "generate", "disk_radius"), "generate.disk_radius");
        if (cfg.generate.disk_radius <= 0) fail("generate.disk_radius", "must be positive");
        cfg.generate.gateway_class =
            get_string(require(gen, "generate", "gateway_class"), "generate.gateway_class");
        if (!cfg.find_class(cfg.generate.gateway_class)) {
            fail("generate.gateway_class", "unknown class '" + cfg.generate.gateway_class + "'");
        }
        const json& mix = require(gen, "generate", "mix");
        if (!mix.is_array() || mix.empty()) fail("generate.mix", "expected a non-empty array");
        std::uint32_t total = 0;
        for (std::size_t i = 0; i < mix.size(); ++i) {
            const std::string path = "generate.mix[" + std::to_string(i) + "]";
            if (!mix[i].is_object()) fail(path, "expected an object");
            check_keys(mix[i], path, {"class", "count"});
            const std::string cls = get_string(require(mix[i], path, "class"), join(path, "class"));
            if (!cfg.find_class(cls)) fail(join(path, "class"), "unknown class '" + cls + "'");
            const auto count =
                static_cast<std::uint32_t>(get_u64(require(mix[i], path, "count"), join(path, "count")));
            total += count;
            cfg.generate.mix.emplace_back(cls, count);
        }
        if (total == 0) fail("generate.mix", "total node count must be positive");
        if (j.contains("gateway")) {
            fail("gateway", "gateway is implicit (id 0) when generate is used");
        }
        cfg.gateway = 0;
    }

    if (const auto it = j.find("nodes"); it != j.end()) {
        const json& nodes = *it;
        if (!nodes.is_array()) fail("nodes", "expected an array");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::string path = "nodes[" + std::to_string(i) + "]";
            if (!nodes[i].is_object()) fail(path, "expected an object");
            cfg.nodes.push_back(parse_node(nodes[i], path, cfg, d));
        }
    }
    if (!cfg.generate.enabled && cfg.nodes.empty()) {
        throw ConfigError("config: scenario needs 'nodes' or 'generate'");
    }

    if (cfg.generate.enabled) {
        cfg.gateway = 0;  // generated gateway always takes id 0
    } else {
        cfg.gateway = static_cast<NodeId>(get_u64(require(j, "", "gateway"), "gateway"));
        const auto gw = std::find_if(cfg.nodes.begin(), cfg.nodes.end(),
                                     [&cfg](const NodeSpec& n) { return n.id == cfg.gateway; });
        if (gw == cfg.nodes.end()) fail("gateway", "no node with this id");
        if (gw->attacker) fail("gateway", "gateway cannot be an attacker");
        if (gw->arrival != 0) fail("gateway", "gateway must be present from the start");
    }

    {
        std::set<NodeId> ids;
        for (const NodeSpec& n : cfg.nodes) {
            if (!ids.insert(n.id).second) {
                fail("nodes", "duplicate node id " + std::to_string(n.id));
            }
        }
    }

    if (const auto it = j.find("attacks"); it != j.end()) {
        const json& attacks = *it;
        if (!attacks.is_array()) fail("attacks", "expected an array");
        for (std::size_t i = 0; i < attacks.size(); ++i) {
            const std::string path = "attacks[" + std::to_string(i) + "]";
            const json& a = attacks[i];
            if (!a.is_object()) fail(path, "expected an object");
            check_keys(a, path, {"attacker", "target", "mode", "start", "period", "shots"});
            AttackSpec spec;
            spec.attacker =
                static_cast<NodeId>(get_u64(require(a, path, "attacker"), join(path, "attacker")));
            const auto node = std::find_if(cfg.nodes.begin(), cfg.nodes.end(),
                                           [&spec](const NodeSpec& n) { return n.id == spec.attacker; });
            if (node == cfg.nodes.end() || !node->attacker) {
                fail(join(path, "attacker"), "must reference a node with attacker=true");
            }
            const json& target = require(a, path, "target");
            if (target.is_string()) {
                spec.target = target.get<std::string>();
                if (spec.target != "@sectored_leaf" &&
                    spec.target.find_first_not_of("0123456789") != std::string::npos) {
                    fail(join(path, "target"), "expected a node id or '@sectored_leaf'");
                }
            } else {
                spec.target = std::to_string(get_u64(target, join(path, "target")));
            }
            spec.mode = attack_mode_from_name(get_string(require(a, path, "mode"), join(path, "mode")));
            spec.start = opt_u64(a, path, "start", 0, d);
            spec.period = opt_u64(a, path, "period", 1, d);
            if (spec.period < 1) fail(join(path, "period"), "must be >= 1");
            spec.shots = static_cast<std::uint32_t>(opt_u64(a, path, "shots", 0, d));
            cfg.attacks.push_back(std::move(spec));
        }
    }

    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path, std::vector<std::string>* defaults_applied) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open: " + path);
    json j;
    try {
        j = json::parse(f, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return from_json(j, defaults_applied);
}

json ScenarioConfig::to_json() const {
    json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["horizon"] = horizon;
    j["radius"] = radius;
    j["latency"] = latency;
    j["round_period"] = round_period;
    j["election_period"] = election_period;
    j["sample_period"] = sample_period;
    j["sectors"] = sectors;
    j["detection"] = {{"enabled", detection_enabled},
                      {"rate_threshold", detect.rate_threshold},
                      {"window", detect.window},
                      {"energy_margin", static_cast<double>(detect.energy_margin_ppm) / 1e6},
                      {"corroboration", detect.corroboration}};
    j["costs"] = {{"transmit", to_units(costs.transmit)},   {"receive", to_units(costs.receive)},
                  {"sense", to_units(costs.sense)},         {"idle_listen", to_units(costs.idle_listen)},
                  {"sleep", to_units(costs.sleep)},         {"detect", to_units(costs.detect)}};
    json classes_j = json::object();
    for (const ClassSpec& c : classes) {
        classes_j[c.name] = {{"initial", to_units(c.initial)},
                             {"layer", c.layer},
                             {"period", c.schedule.period},
                             {"wake_offset", c.schedule.wake_offset},
                             {"wake_len", c.schedule.wake_len}};
    }
    j["classes"] = std::move(classes_j);
    if (generate.enabled) {
        json mix_j = json::array();
        for (const auto& [cls, count] : generate.mix) {
            mix_j.push_back({{"class", cls}, {"count", count}});
        }
        j["generate"] = {{"center", {generate.center_x, generate.center_y}},
                         {"disk_radius", generate.disk_radius},
                         {"gateway_class", generate.gateway_class},
                         {"mix", std::move(mix_j)}};
    } else {
        j["gateway"] = gateway;
    }
    json nodes_j = json::array();
    for (const NodeSpec& n : nodes) {
        json nj = {{"id", n.id}, {"x", n.x}, {"y", n.y}, {"class", n.cls}};
        if (n.initial) nj["initial"] = to_units(*n.initial);
        if (n.attacker) nj["attacker"] = true;
        if (n.arrival > 0) nj["arrival"] = n.arrival;
        nodes_j.push_back(std::move(nj));
    }
    if (!nodes_j.empty()) j["nodes"] = std::move(nodes_j);
    if (!attacks.empty()) {
        json attacks_j = json::array();
        for (const AttackSpec& a : attacks) {
            attacks_j.push_back({{"attacker", a.attacker},
                                 {"target", a.target},
                                 {"mode", attack_mode_name(a.mode)},
                                 {"start", a.start},
                                 {"period", a.period},
                                 {"shots", a.shots}});
        }
        j["attacks"] = std::move(attacks_j);
    }
    return j;
}

std::uint64_t ScenarioConfig::hash() const {
    // Integer-only canonical form; floats are scaled to micro so the dump
    // string is bit-stable. detection.enabled is pinned to true so the on and
    // off runs of one scenario share an identity.
    json c;
    c["scenario"] = scenario;
    c["seed"] = seed;
    c["horizon"] = horizon;
    c["radius_u"] = std::llround(radius * 1e6);
    c["latency"] = latency;
    c["round"] = round_period;
    c["election"] = election_period;
    c["sample"] = sample_period;
    c["sectors"] = sectors;
    c["detection"] = {{"enabled", true},
                      {"rate", detect.rate_threshold},
                      {"window", detect.window},
                      {"margin_ppm", detect.energy_margin_ppm},
                      {"corr", detect.corroboration}};
    c["costs"] = {costs.transmit, costs.receive, costs.sense,
                  costs.idle_listen, costs.sleep, costs.detect};
    json classes_j = json::object();
    for (const ClassSpec& cl : classes) {
        classes_j[cl.name] = {cl.initial, cl.layer, cl.schedule.period, cl.schedule.wake_offset,
                              cl.schedule.wake_len};
    }
    c["classes"] = std::move(classes_j);
    c["gateway"] = gateway;
    json nodes_j = json::array();
    for (const NodeSpec& n : nodes) {
        nodes_j.push_back({n.id, std::llround(n.x * 1e6), std::llround(n.y * 1e6), n.cls,
                           n.initial ? *n.initial : Micro{-1}, n.attacker, n.arrival});
    }
    c["nodes"] = std::move(nodes_j);
    if (generate.enabled) {
        json mix_j = json::array();
        for (const auto& [cls, count] : generate.mix) mix_j.push_back({cls, count});
        c["generate"] = {std::llround(generate.center_x * 1e6), std::llround(generate.center_y * 1e6),
                         std::llround(generate.disk_radius * 1e6), generate.gateway_class,
                         std::move(mix_j)};
    }
    json attacks_j = json::array();
    for (const AttackSpec& a : attacks) {
        attacks_j.push_back({a.attacker, a.target, attack_mode_name(a.mode), a.start, a.period, a.shots});
    }
    c["attacks"] = std::move(attacks_j);
    return fnv1a64(c.dump());
}

std::vector<NodeSpec> materialize_nodes(const ScenarioConfig& cfg) {
    std::vector<NodeSpec> out;
    if (cfg.generate.enabled) {
        Rng rng(derive_seed(cfg.seed, "topology"));
        NodeSpec gw;
        gw.id = 0;
        gw.x = cfg.generate.center_x;
        gw.y = cfg.generate.center_y;
        gw.cls = cfg.generate.gateway_class;
        out.push_back(std::move(gw));
        NodeId next = 1;
        const double r = cfg.generate.disk_radius;
        for (const auto& [cls, count] : cfg.generate.mix) {
            for (std::uint32_t i = 0; i < count; ++i) {
                double dx = 0.0, dy = 0.0;
                do {
                    dx = (rng.uniform() * 2.0 - 1.0) * r;
                    dy = (rng.uniform() * 2.0 - 1.0) * r;
                } while (dx * dx + dy * dy > r * r);
                NodeSpec n;
                n.id = next++;
                n.x = cfg.generate.center_x + dx;
                n.y = cfg.generate.center_y + dy;
                n.cls = cls;
                out.push_back(std::move(n));
            }
        }
    }
    std::set<NodeId> ids;
    for (const NodeSpec& n : out) ids.insert(n.id);
    for (const NodeSpec& n : cfg.nodes) {
        if (!ids.insert(n.id).second) {
            throw ConfigError("config: node id " + std::to_string(n.id) +
                              " collides with a generated node");
        }
        out.push_back(n);
    }
    return out;
}

}  // namespace wsn
