#include "wsn/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace wsn {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::uint64_t parse_u64(std::string_view s, int base = 10) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("trace: bad unsigned value '" + std::string(s) + "'");
    }
    return v;
}

std::int64_t parse_i64(std::string_view s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("trace: bad integer value '" + std::string(s) + "'");
    }
    return v;
}

std::pair<std::string_view, std::string_view> split_kv(std::string_view token) {
    const std::size_t eq = token.find('=');
    if (eq == std::string_view::npos) {
        throw std::runtime_error("trace: field without '=': '" + std::string(token) + "'");
    }
    return {token.substr(0, eq), token.substr(eq + 1)};
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[v & 0xf];
        v >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

}  // namespace

const char* trace_kind_name(TraceKind k) {
    switch (k) {
        case TraceKind::Send: return "SEND";
        case TraceKind::Deliver: return "DELIVER";
        case TraceKind::Drop: return "DROP";
        case TraceKind::Phase1: return "PHASE1";
        case TraceKind::Phase2: return "PHASE2";
        case TraceKind::CTag: return "CTAG";
        case TraceKind::Elect: return "ELECT";
        case TraceKind::Profile: return "PROFILE";
        case TraceKind::Isolate: return "ISOLATE";
        case TraceKind::WakeForced: return "WAKE_FORCED";
        case TraceKind::AttackFire: return "ATTACK_FIRE";
        case TraceKind::Death: return "DEATH";
        case TraceKind::Energy: return "ENERGY";
        case TraceKind::Arrive: return "ARRIVE";
        case TraceKind::Plan: return "PLAN";
        case TraceKind::Note: return "NOTE";
        case TraceKind::Halt: return "HALT";
        case TraceKind::End: return "END";
    }
    return "?";
}

TraceKind trace_kind_from_name(std::string_view name) {
    for (int i = 0; i <= static_cast<int>(TraceKind::End); ++i) {
        const auto k = static_cast<TraceKind>(i);
        if (name == trace_kind_name(k)) return k;
    }
    throw std::runtime_error("trace: unknown event kind '" + std::string(name) + "'");
}

const char* deliver_status_name(DeliverStatus s) {
    switch (s) {
        case DeliverStatus::Ok: return "OK";
        case DeliverStatus::Dead: return "DEAD";
        case DeliverStatus::Asleep: return "ASLEEP";
        case DeliverStatus::IsolatedDst: return "ISOLATED_DST";
        case DeliverStatus::IsolatedSrc: return "ISOLATED_SRC";
    }
    return "?";
}

DeliverStatus deliver_status_from_name(std::string_view name) {
    for (int i = 0; i <= static_cast<int>(DeliverStatus::IsolatedSrc); ++i) {
        const auto s = static_cast<DeliverStatus>(i);
        if (name == deliver_status_name(s)) return s;
    }
    throw std::runtime_error("trace: unknown deliver status '" + std::string(name) + "'");
}

TraceEvent& TraceEvent::add(std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
}

TraceEvent& TraceEvent::add(std::string key, const char* value) {
    return add(std::move(key), std::string(value));
}

const std::string* TraceEvent::find(std::string_view key) const {
    for (const auto& [k, v] : fields) {
        if (k == key) return &v;
    }
    return nullptr;
}

const std::string& TraceEvent::get(std::string_view key) const {
    const std::string* v = find(key);
    if (!v) {
        throw std::runtime_error(std::string("trace: missing field '") + std::string(key) +
                                 "' on " + trace_kind_name(kind) + " line");
    }
    return *v;
}

std::uint64_t TraceEvent::get_u64(std::string_view key) const { return parse_u64(get(key)); }

std::int64_t TraceEvent::get_i64(std::string_view key) const { return parse_i64(get(key)); }

std::string TraceEvent::line() const {
    std::string out = std::to_string(tick);
    out += '\t';
    out += trace_kind_name(kind);
    out += '\t';
    if (actor == kNoNode) {
        out += '-';
    } else {
        out += std::to_string(actor);
    }
    for (const auto& [k, v] : fields) {
        out += '\t';
        out += k;
        out += '=';
        out += v;
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("trace: bad real value '" + std::string(s) + "'");
    }
    return v;
}

std::string TraceLog::serialize() const {
    std::string out;
    out.reserve(256 + events_.size() * 64);
    auto kv = [&out](std::string_view key, const std::string& value) {
        out += '\t';
        out += key;
        out += '=';
        out += value;
    };

    out += "#wsnsim\tv=1\n";
    out += "#scenario";
    kv("name", meta.scenario);
    kv("seed", std::to_string(meta.seed));
    kv("horizon", std::to_string(meta.horizon));
    kv("detection", meta.detection ? "1" : "0");
    kv("hash", hex16(meta.config_hash));
    out += '\n';

    out += "#param";
    kv("radius", format_double(meta.radius));
    kv("latency", std::to_string(meta.latency));
    kv("round", std::to_string(meta.round_period));
    kv("election", std::to_string(meta.election_period));
    kv("sample", std::to_string(meta.sample_period));
    kv("sectors", std::to_string(meta.sectors));
    kv("gateway", std::to_string(meta.gateway));
    kv("rate", std::to_string(meta.detect.rate_threshold));
    kv("window", std::to_string(meta.detect.window));
    kv("margin_ppm", std::to_string(meta.detect.energy_margin_ppm));
    kv("corr", std::to_string(meta.detect.corroboration));
    out += '\n';

    out += "#cost";
    kv("tx", std::to_string(meta.costs.transmit));
    kv("rx", std::to_string(meta.costs.receive));
    kv("sense", std::to_string(meta.costs.sense));
    kv("idle", std::to_string(meta.costs.idle_listen));
    kv("sleep", std::to_string(meta.costs.sleep));
    kv("detect", std::to_string(meta.costs.detect));
    out += '\n';

    for (const ClassMeta& c : meta.classes) {
        out += "#class";
        kv("name", c.name);
        kv("initial", std::to_string(c.initial));
        kv("layer", std::to_string(c.layer));
        kv("period", std::to_string(c.schedule.period));
        kv("offset", std::to_string(c.schedule.wake_offset));
        kv("len", std::to_string(c.schedule.wake_len));
        out += '\n';
    }
    for (const NodeMeta& n : meta.nodes) {
        out += "#node";
        kv("id", std::to_string(n.id));
        kv("x", format_double(n.x));
        kv("y", format_double(n.y));
        kv("class", n.cls);
        kv("attacker", n.attacker ? "1" : "0");
        kv("arrival", std::to_string(n.arrival));
        out += '\n';
    }
    for (const PlanMeta& p : meta.plans) {
        out += "#plan";
        kv("idx", std::to_string(p.index));
        kv("attacker", std::to_string(p.attacker));
        kv("target", p.target);
        kv("mode", attack_mode_name(p.mode));
        kv("start", std::to_string(p.start));
        kv("period", std::to_string(p.period));
        kv("shots", std::to_string(p.shots));
        out += '\n';
    }

    for (const TraceEvent& ev : events_) {
        out += ev.line();
        out += '\n';
    }
    return out;
}

void TraceLog::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("trace: cannot open for write: " + path);
    const std::string text = serialize();
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw std::runtime_error("trace: write failed: " + path);
}

namespace {

void parse_meta_line(TraceMeta& meta, std::string_view line) {
    const auto tokens = split_tabs(line);
    const std::string_view section = tokens[0];
    std::vector<std::pair<std::string_view, std::string_view>> kvs;
    for (std::size_t i = 1; i < tokens.size(); ++i) kvs.push_back(split_kv(tokens[i]));
    auto want = [&kvs, section](std::string_view key) -> std::string_view {
        for (const auto& [k, v] : kvs) {
            if (k == key) return v;
        }
        throw std::runtime_error("trace: " + std::string(section) + " line missing '" +
                                 std::string(key) + "'");
    };

    if (section == "#wsnsim") {
        if (want("v") != "1") throw std::runtime_error("trace: unsupported version");
    } else if (section == "#scenario") {
        meta.scenario = std::string(want("name"));
        meta.seed = parse_u64(want("seed"));
        meta.horizon = parse_u64(want("horizon"));
        meta.detection = want("detection") == "1";
        meta.config_hash = parse_u64(want("hash"), 16);
    } else if (section == "#param") {
        meta.radius = parse_double(want("radius"));
        meta.latency = parse_u64(want("latency"));
        meta.round_period = parse_u64(want("round"));
        meta.election_period = parse_u64(want("election"));
        meta.sample_period = parse_u64(want("sample"));
        meta.sectors = static_cast<std::uint32_t>(parse_u64(want("sectors")));
        meta.gateway = static_cast<NodeId>(parse_u64(want("gateway")));
        meta.detect.rate_threshold = static_cast<std::uint32_t>(parse_u64(want("rate")));
        meta.detect.window = parse_u64(want("window"));
        meta.detect.energy_margin_ppm = static_cast<std::uint32_t>(parse_u64(want("margin_ppm")));
        meta.detect.corroboration = static_cast<std::uint32_t>(parse_u64(want("corr")));
    } else if (section == "#cost") {
        meta.costs.transmit = parse_i64(want("tx"));
        meta.costs.receive = parse_i64(want("rx"));
        meta.costs.sense = parse_i64(want("sense"));
        meta.costs.idle_listen = parse_i64(want("idle"));
        meta.costs.sleep = parse_i64(want("sleep"));
        meta.costs.detect = parse_i64(want("detect"));
    } else if (section == "#class") {
        ClassMeta c;
        c.name = std::string(want("name"));
        c.initial = parse_i64(want("initial"));
        c.layer = static_cast<std::uint32_t>(parse_u64(want("layer")));
        c.schedule.period = parse_u64(want("period"));
        c.schedule.wake_offset = parse_u64(want("offset"));
        c.schedule.wake_len = parse_u64(want("len"));
        meta.classes.push_back(std::move(c));
    } else if (section == "#node") {
        NodeMeta n;
        n.id = static_cast<NodeId>(parse_u64(want("id")));
        n.x = parse_double(want("x"));
        n.y = parse_double(want("y"));
        n.cls = std::string(want("class"));
        n.attacker = want("attacker") == "1";
        n.arrival = parse_u64(want("arrival"));
        meta.nodes.push_back(std::move(n));
    } else if (section == "#plan") {
        PlanMeta p;
        p.index = static_cast<std::uint32_t>(parse_u64(want("idx")));
        p.attacker = static_cast<NodeId>(parse_u64(want("attacker")));
        p.target = std::string(want("target"));
        p.mode = attack_mode_from_name(std::string(want("mode")));
        p.start = parse_u64(want("start"));
        p.period = parse_u64(want("period"));
        p.shots = static_cast<std::uint32_t>(parse_u64(want("shots")));
        meta.plans.push_back(std::move(p));
    } else {
        throw std::runtime_error("trace: unknown meta section '" + std::string(section) + "'");
    }
}

TraceEvent parse_event_line(std::string_view line) {
    const auto tokens = split_tabs(line);
    if (tokens.size() < 3) throw std::runtime_error("trace: short event line");
    TraceEvent ev;
    ev.tick = parse_u64(tokens[0]);
    ev.kind = trace_kind_from_name(tokens[1]);
    ev.actor = tokens[2] == "-" ? kNoNode : static_cast<NodeId>(parse_u64(tokens[2]));
    for (std::size_t i = 3; i < tokens.size(); ++i) {
        const auto [k, v] = split_kv(tokens[i]);
        ev.fields.emplace_back(std::string(k), std::string(v));
    }
    return ev;
}

}  // namespace

TraceLog TraceLog::parse(std::istream& in) {
    TraceLog log;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            if (line[0] == '#') {
                parse_meta_line(log.meta, line);
            } else {
                log.events_.push_back(parse_event_line(line));
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return log;
}

TraceLog TraceLog::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

TraceLog TraceLog::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("trace: cannot open: " + path);
    return parse(f);
}

}  // namespace wsn
