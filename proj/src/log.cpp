#include "spgp/log.hpp"

#include <stdexcept>

#include <json.hpp>

namespace spgp {

namespace {
using nlohmann::json;

json vecs_to_json(const std::vector<Vec2>& vs) {
    json out = json::array();
    for (const Vec2& v : vs) out.push_back(json::array({v.x, v.y}));
    return out;
}

std::vector<Vec2> vecs_from_json(const json& j, const char* field) {
    if (!j.is_array()) {
        throw std::runtime_error(std::string("log document: '") + field + "' must be a list");
    }
    std::vector<Vec2> out;
    out.reserve(j.size());
    for (const json& v : j) {
        if (!v.is_array() || v.size() != 2) {
            throw std::runtime_error(std::string("log document: bad point in '") + field + "'");
        }
        out.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    return out;
}

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) {
        throw std::runtime_error(std::string("log document: missing field '") + key + "'");
    }
    return j.at(key);
}

}  // namespace

std::string to_string(SimEvent::Type type) {
    switch (type) {
        case SimEvent::Type::DeadlockDetected: return "deadlock_detected";
        case SimEvent::Type::PerturbStarted: return "perturb_started";
        case SimEvent::Type::PerturbArrived: return "perturb_arrived";
        case SimEvent::Type::PerturbTimeout: return "perturb_timeout";
        case SimEvent::Type::PerturbSkipped: return "perturb_skipped";
        case SimEvent::Type::QpInfeasible: return "qp_infeasible";
        case SimEvent::Type::Collision: return "collision";
        case SimEvent::Type::DegenerateGeometry: return "degenerate_geometry";
    }
    return "unknown";
}

namespace {

SimEvent::Type event_type_from(const std::string& s) {
    for (const auto t : {SimEvent::Type::DeadlockDetected, SimEvent::Type::PerturbStarted,
                         SimEvent::Type::PerturbArrived, SimEvent::Type::PerturbTimeout,
                         SimEvent::Type::PerturbSkipped, SimEvent::Type::QpInfeasible,
                         SimEvent::Type::Collision, SimEvent::Type::DegenerateGeometry}) {
        if (to_string(t) == s) return t;
    }
    throw std::runtime_error("log document: unknown event type '" + s + "'");
}

}  // namespace

std::vector<Vec2> TrajectoryLog::positions_of(std::size_t agent_index) const {
    std::vector<Vec2> out;
    out.reserve(steps.size());
    for (const StepRecord& r : steps) out.push_back(r.positions.at(agent_index));
    return out;
}

std::string save_log(const TrajectoryLog& log) {
    json j;
    j["version"] = 1;
    j["dt"] = log.dt;
    j["t_max"] = log.t_max;
    j["eps_goal"] = log.eps_goal;
    j["agent_ids"] = log.agent_ids;
    j["original_goals"] = vecs_to_json(log.original_goals);
    j["aborted_degenerate"] = log.aborted_degenerate;
    j["obstacles"] = json::array();
    for (const Obstacle& o : log.obstacles) {
        j["obstacles"].push_back(
            {{"center", json::array({o.center.x, o.center.y})}, {"radius", o.radius}});
    }
    j["steps"] = json::array();
    for (const StepRecord& r : log.steps) {
        json modes = json::array();
        for (const auto m : r.modes) modes.push_back(m == AgentMode::Mode::Perturb ? 1 : 0);
        j["steps"].push_back({{"time", r.time},
                              {"positions", vecs_to_json(r.positions)},
                              {"velocities", vecs_to_json(r.velocities)},
                              {"controls", vecs_to_json(r.controls)},
                              {"nominals", vecs_to_json(r.nominals)},
                              {"modes", modes},
                              {"min_pairwise_h", r.min_pairwise_h},
                              {"min_obstacle_h", r.min_obstacle_h}});
    }
    j["events"] = json::array();
    for (const SimEvent& e : log.events) {
        j["events"].push_back({{"step", e.step},
                               {"type", to_string(e.type)},
                               {"agent", e.agent},
                               {"point", json::array({e.point.x, e.point.y})}});
    }
    return j.dump() + "\n";
}

TrajectoryLog load_log(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("log document: parse error: ") + e.what());
    }
    if (require(j, "version").get<int>() != 1) {
        throw std::runtime_error("log document: unknown version");
    }
    TrajectoryLog log;
    log.dt = require(j, "dt").get<double>();
    log.t_max = require(j, "t_max").get<int>();
    log.eps_goal = require(j, "eps_goal").get<double>();
    log.agent_ids = require(j, "agent_ids").get<std::vector<int>>();
    log.original_goals = vecs_from_json(require(j, "original_goals"), "original_goals");
    log.aborted_degenerate = require(j, "aborted_degenerate").get<bool>();
    for (const json& o : require(j, "obstacles")) {
        Obstacle ob;
        const json& center = require(o, "center");
        ob.center = {center[0].get<double>(), center[1].get<double>()};
        ob.radius = require(o, "radius").get<double>();
        log.obstacles.push_back(ob);
    }
    for (const json& r : require(j, "steps")) {
        StepRecord rec;
        rec.time = require(r, "time").get<double>();
        rec.positions = vecs_from_json(require(r, "positions"), "positions");
        rec.velocities = vecs_from_json(require(r, "velocities"), "velocities");
        rec.controls = vecs_from_json(require(r, "controls"), "controls");
        rec.nominals = vecs_from_json(require(r, "nominals"), "nominals");
        for (const json& m : require(r, "modes")) {
            rec.modes.push_back(m.get<int>() == 1 ? AgentMode::Mode::Perturb
                                                  : AgentMode::Mode::Normal);
        }
        rec.min_pairwise_h = require(r, "min_pairwise_h").get<double>();
        rec.min_obstacle_h = require(r, "min_obstacle_h").get<double>();
        log.steps.push_back(std::move(rec));
    }
    for (const json& e : require(j, "events")) {
        SimEvent ev;
        ev.step = require(e, "step").get<int>();
        ev.type = event_type_from(require(e, "type").get<std::string>());
        ev.agent = require(e, "agent").get<int>();
        const json& pt = require(e, "point");
        ev.point = {pt[0].get<double>(), pt[1].get<double>()};
        log.events.push_back(ev);
    }
    return log;
}

}  // namespace spgp
