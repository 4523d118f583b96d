#include "spgp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace spgp {

namespace {

using nlohmann::json;

// Wall disks are thick enough that the barrier's soft response cannot push an
// agent through a wall line; openings are always measured as clear aperture.
constexpr double kWallDiskRadius = 0.25;

struct Params {
    std::map<std::string, double> values;
    std::set<std::string> used;

    double get(const std::string& key, double fallback) {
        used.insert(key);
        const auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
    void check_all_used() const {
        for (const auto& [key, _] : values) {
            if (!used.count(key)) {
                throw std::invalid_argument("build_scenario: unknown override '" + key + "'");
            }
        }
    }
};

// Disks of radius r along the segment, spacing <= r, endpoints included.
void add_wall(std::vector<Obstacle>& out, const Vec2& from, const Vec2& to, double r) {
    const double len = dist(from, to);
    const int segments = std::max(1, static_cast<int>(std::ceil(len / r)));
    for (int i = 0; i <= segments; ++i) {
        const double t = static_cast<double>(i) / segments;
        out.push_back({from + t * (to - from), r});
    }
}

AgentState make_agent(int id, const Vec2& start, const Vec2& goal, double radius,
                      double accel_limit) {
    AgentState a;
    a.id = id;
    a.position = start;
    a.goal = goal;
    a.safety_radius = radius;
    a.accel_limit = accel_limit;
    return a;
}

// Common parameter block shared by every builder.
struct Common {
    double radius, accel, goal_eps;
    ScenarioConfig base;
};

Common apply_common(const std::string& name, Params& p) {
    Common c;
    c.base.name = name;
    c.base.safety.gamma = p.get("gamma", 10.0);
    c.base.safety.margin = p.get("margin", 0.05);
    c.base.safety.obstacle_activation_dist = p.get("activation_dist", 3.0);
    c.base.spgp.delta = p.get("delta", 1.0);
    c.base.spgp.u_t = p.get("u_t", 0.05);
    c.base.spgp.window = static_cast<int>(p.get("window", 10));
    c.base.spgp.candidates = static_cast<int>(p.get("candidates", 8));
    c.base.spgp.eps_pg = p.get("eps_pg", 0.1);
    c.base.spgp.neighbor_radius = p.get("neighbor_radius", 3.0);
    c.base.spgp.independent_xy = p.get("independent_xy", 0.0) != 0.0;
    c.base.spgp.perturb_timeout_steps = static_cast<int>(p.get("perturb_timeout", 600));
    c.base.gains.kp = p.get("kp", 1.0);
    c.base.gains.kd = p.get("kd", 2.0);
    c.base.dt = p.get("dt", 0.05);
    c.base.safety.brake_dt = p.get("brake_dt", c.base.dt);
    c.base.safety.brake_reserve = p.get("brake_reserve", 0.25);
    c.base.t_max = static_cast<int>(p.get("t_max", 0.0));  // 0: builder picks
    c.base.eps_goal = p.get("eps_goal", 0.6);
    c.base.resolve_same_step = p.get("resolve_same_step", 0.0) != 0.0;
    c.radius = p.get("radius", 0.2);
    c.accel = p.get("accel_limit", 1.0);
    return c;
}

int default_t_max(int n_agents) { return n_agents <= 2 ? 3000 : 2000 + 700 * n_agents; }

ScenarioConfig build_doorway(int n, Params& p) {
    Common c = apply_common("doorway", p);
    const double gap = p.get("gap", 0.8);
    const double reach = p.get("wall_reach", 3.4);
    const double start_y = p.get("start_y", -1.6);
    const double start_depth = p.get("start_depth", 1.8);
    const double goal_y = p.get("goal_y", 1.5);
    const double disk_r = p.get("disk_radius", n <= 2 ? 0.15 : kWallDiskRadius);
    const double room_s = p.get("room_depth_south", n <= 2 ? 2.3 : -start_y + 1.8);
    const double room_n = p.get("room_depth_north",
                                n <= 2 ? 2.3 : goal_y + 0.7 + 1.0 * (n - 1) + 1.0);
    p.check_all_used();

    ScenarioConfig cfg = c.base;
    if (cfg.t_max == 0) cfg.t_max = default_t_max(n);
    // Disk centers retreat by one disk radius so the clear aperture equals `gap`.
    add_wall(cfg.obstacles, {-reach - disk_r, 0.0}, {-gap / 2.0 - disk_r, 0.0}, disk_r);
    add_wall(cfg.obstacles, {gap / 2.0 + disk_r, 0.0}, {reach + disk_r, 0.0}, disk_r);
    // The doorway joins two enclosed chambers. The perimeter keeps pseudo-goal
    // excursions inside the rooms, which is also what caps the makespan growth
    // at large perturbation radii.
    {
        const double hx = reach + disk_r;
        add_wall(cfg.obstacles, {-hx, -room_s}, {hx, -room_s}, disk_r);
        add_wall(cfg.obstacles, {-hx, room_n}, {hx, room_n}, disk_r);
        add_wall(cfg.obstacles, {-hx, -room_s}, {-hx, room_n}, disk_r);
        add_wall(cfg.obstacles, {hx, -room_s}, {hx, room_n}, disk_r);
    }

    const Vec2 shared{0.0, goal_y};
    if (n == 1) {
        const Vec2 start{0.0, start_y};
        cfg.agents.push_back(make_agent(0, start, shared + cfg.eps_goal * normalized(shared - start),
                                        c.radius, c.accel));
    } else if (n == 2) {
        // Counter-flow through the opening: both agents travel the doorway axis in
        // opposite directions and swap ends. The slot admits one agent, so the
        // baseline filter (which never retreats) wedges head-on inside it. The
        const Vec2 s0{0.0, -start_depth};
        const Vec2 s1{0.0, start_depth};
        cfg.agents.push_back(make_agent(0, s0, s1, c.radius, c.accel));
        cfg.agents.push_back(make_agent(1, s1, s0, c.radius, c.accel));
    } else {
        // Two start rows below the wall, goal row fanned out beyond the gap.
        struct Slot { double x, y; };
        std::vector<Slot> starts;
        const int row0 = (n + 1) / 2;
        const int row1 = n - row0;
        for (int j = 0; j < row0; ++j) {
            starts.push_back({1.0 * (j - (row0 - 1) / 2.0), start_y});
        }
        for (int j = 0; j < row1; ++j) {
            starts.push_back({1.0 * (j - (row1 - 1) / 2.0), start_y - 0.8});
        }
        std::sort(starts.begin(), starts.end(), [](const Slot& a, const Slot& b) {
            return a.x != b.x ? a.x < b.x : a.y < b.y;
        });
        // Goals stack in a near-axis column beyond the gap: any wall press then
        // slides the agent toward the opening, and arrivals park clear of the slot.
        for (int i = 0; i < n; ++i) {
            const Vec2 start{starts[i].x, starts[i].y};
            const Vec2 goal{0.12 * (i % 2 == 0 ? 1.0 : -1.0), goal_y + 0.7 + 1.0 * i};
            cfg.agents.push_back(make_agent(i, start, goal, c.radius, c.accel));
        }
    }
    return cfg;
}

ScenarioConfig build_intersection(int n, Params& p) {
    Common c = apply_common("intersection", p);
    // Two-agent arms are too narrow for a head-on pass; larger crowds get wider arms.
    const double hw = p.get("arm_half_width", n <= 2 ? 0.425 : 0.55);
    const double start_dist = p.get("start_dist", 2.6);
    const double exit_dist = p.get("exit_dist", 3.0);
    const double layer_spacing = p.get("layer_spacing", 1.2);
    const double disk_r = p.get("disk_radius", kWallDiskRadius);
    const int max_layer = (n - 1) / 4;
    const double reach =
        p.get("reach", std::max(3.8, start_dist + layer_spacing * max_layer + 1.2));
    p.check_all_used();

    ScenarioConfig cfg = c.base;
    if (cfg.t_max == 0) cfg.t_max = default_t_max(n);
    // Corner-block edges sit one disk radius outside the arms, so `hw` is the
    // clear arm half-width. Arm ends are capped: the crossing is a closed room,
    // which keeps pseudo-goal excursions inside it.
    const double edge = hw + disk_r;
    const double cap = reach + disk_r;
    for (const double sx : {1.0, -1.0}) {
        for (const double sy : {1.0, -1.0}) {
            add_wall(cfg.obstacles, {sx * edge, sy * edge}, {sx * reach, sy * edge}, disk_r);
            add_wall(cfg.obstacles, {sx * edge, sy * edge}, {sx * edge, sy * reach}, disk_r);
        }
        add_wall(cfg.obstacles, {sx * cap, -edge}, {sx * cap, edge}, disk_r);
        add_wall(cfg.obstacles, {-edge, sx * cap}, {edge, sx * cap}, disk_r);
    }

    // Inbound directions per arm: west, south, east, north.
    const Vec2 dirs[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    if (n == 1) {
        cfg.agents.push_back(
            make_agent(0, -start_dist * dirs[0], start_dist * dirs[0], c.radius, c.accel));
    } else if (n == 2) {
        // Opposed counter-flow across the crossing, staggered so the two meet
        // head-on inside the south arm, which is too narrow for a pass. The box
        // sits just behind the north-bound agent's opponent: a perturbed agent can
        // duck into a horizontal arm there, while the baseline filter, which never
        // retreats, stays wedged in the arm.
        const Vec2 s0{0.0, -start_dist};
        const Vec2 s1{0.0, start_dist - 1.0};
        cfg.agents.push_back(make_agent(0, s0, s1, c.radius, c.accel));
        cfg.agents.push_back(make_agent(1, s1, s0, c.radius, c.accel));
        (void)exit_dist;
    } else {
        for (int i = 0; i < n; ++i) {
            const int arm = i % 4;
            const int layer = i / 4;
            const Vec2 start = -(start_dist + layer_spacing * layer) * dirs[arm];
            cfg.agents.push_back(make_agent(i, start, -start, c.radius, c.accel));
        }
    }
    return cfg;
}

ScenarioConfig build_hallway(int n, Params& p) {
    Common c = apply_common("hallway", p);
    const double width = p.get("width", n <= 2 ? 1.2 : 1.2 + 0.3 * (n - 2));
    const double length = p.get("length", 7.0);
    const double stagger = p.get("stagger", 0.9);
    const double disk_r = p.get("disk_radius", kWallDiskRadius);
    const int east = (n + 1) / 2;
    const int west = n - east;
    const double overhang = p.get("overhang", 1.0 + stagger * std::max(east, west));
    p.check_all_used();

    ScenarioConfig cfg = c.base;
    if (cfg.t_max == 0) cfg.t_max = default_t_max(n);
    // Disk centers sit one disk radius outside the interior, so `width` is the
    // clear corridor width.
    const double half_w = width / 2.0 + disk_r;
    const double half_l = length / 2.0;
    add_wall(cfg.obstacles, {-half_l - overhang, -half_w}, {half_l + overhang, -half_w}, disk_r);
    add_wall(cfg.obstacles, {-half_l - overhang, half_w}, {half_l + overhang, half_w}, disk_r);

    // Counter-flow convoys on opposite quarter lines, swapping sides end to end.
    const double lane = width / 4.0;
    int id = 0;
    for (int k = 0; k < east; ++k) {
        cfg.agents.push_back(make_agent(id++, {-half_l - stagger * k, -lane},
                                        {half_l + stagger * k, lane}, c.radius, c.accel));
    }
    for (int k = 0; k < west; ++k) {
        cfg.agents.push_back(make_agent(id++, {half_l + stagger * k, lane},
                                        {-half_l - stagger * k, -lane}, c.radius, c.accel));
    }
    return cfg;
}

ScenarioConfig build_lcorner(int n, Params& p) {
    Common c = apply_common("lcorner", p);
    const double width = p.get("width", 1.2);
    const double start_dist = p.get("start_dist", 2.6);
    const double stagger = p.get("stagger", 0.9);
    const int horiz = (n + 1) / 2;
    const int vert = n - horiz;
    const double reach =
        p.get("reach", std::max(3.5, start_dist + stagger * (std::max(horiz, vert) - 1) + 1.2));
    const double disk_r = p.get("disk_radius", kWallDiskRadius);
    p.check_all_used();

    ScenarioConfig cfg = c.base;
    if (cfg.t_max == 0) cfg.t_max = default_t_max(n);
    // `width` is the clear corridor width; disk centers sit one radius outside it.
    const double hw = width / 2.0 + disk_r;
    add_wall(cfg.obstacles, {-hw, -hw}, {reach, -hw}, disk_r);   // outer horizontal
    add_wall(cfg.obstacles, {-hw, -hw}, {-hw, reach}, disk_r);   // outer vertical
    add_wall(cfg.obstacles, {hw, hw}, {reach, hw}, disk_r);      // inner horizontal
    add_wall(cfg.obstacles, {hw, hw}, {hw, reach}, disk_r);      // inner vertical

    int id = 0;
    for (int k = 0; k < horiz; ++k) {
        const double d = start_dist + stagger * k;
        cfg.agents.push_back(make_agent(id++, {d, 0.0}, {0.0, d}, c.radius, c.accel));
    }
    for (int k = 0; k < vert; ++k) {
        const double d = start_dist + stagger * k;
        cfg.agents.push_back(make_agent(id++, {0.0, d}, {d, 0.0}, c.radius, c.accel));
    }
    return cfg;
}

// --- JSON helpers -----------------------------------------------------------

const json& require(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key)) {
        throw ScenarioLoadError("scenario document: missing field '" + ctx + key + "'");
    }
    return j.at(key);
}

double require_num(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number()) {
        throw ScenarioLoadError("scenario document: field '" + ctx + key + "' must be a number");
    }
    return v.get<double>();
}

int require_int(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number_integer()) {
        throw ScenarioLoadError("scenario document: field '" + ctx + key +
                                "' must be an integer");
    }
    return v.get<int>();
}

bool require_bool(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_boolean()) {
        throw ScenarioLoadError("scenario document: field '" + ctx + key + "' must be a bool");
    }
    return v.get<bool>();
}

Vec2 require_vec2(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ScenarioLoadError("scenario document: field '" + ctx + key +
                                "' must be [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) {
            throw ScenarioLoadError("scenario document: unknown field '" + ctx + key + "'");
        }
    }
}

json vec_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

}  // namespace

int scenario_capacity(const std::string& name) {
    if (name == "doorway") return 8;
    if (name == "intersection") return 10;
    if (name == "hallway") return 10;
    if (name == "lcorner") return 5;
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

void validate(const ScenarioConfig& config) {
    scenario_capacity(config.name);  // known name
    if (config.agents.empty()) {
        throw std::invalid_argument("scenario: at least one agent required");
    }
    if (static_cast<int>(config.agents.size()) > scenario_capacity(config.name)) {
        throw std::invalid_argument("scenario '" + config.name + "' supports at most " +
                                    std::to_string(scenario_capacity(config.name)) +
                                    " agents, got " + std::to_string(config.agents.size()));
    }
    if (!(config.dt > 0.0) || config.t_max < 1 || !(config.eps_goal > 0.0)) {
        throw std::invalid_argument("scenario: dt, t_max and eps_goal must be positive");
    }
    validate(config.safety);
    validate(config.spgp);
    validate(config.gains);
    std::set<int> ids;
    for (const auto& a : config.agents) {
        validate(a);
        if (!ids.insert(a.id).second) {
            throw std::invalid_argument("scenario: duplicate agent id " + std::to_string(a.id));
        }
    }
    for (const auto& o : config.obstacles) validate(o);

    for (std::size_t i = 0; i < config.agents.size(); ++i) {
        for (std::size_t j = i + 1; j < config.agents.size(); ++j) {
            const double h = pairwise_h(config.agents[i], config.agents[j]);
            if (h < 0.0) {
                throw std::invalid_argument(
                    "scenario: agents " + std::to_string(config.agents[i].id) + " and " +
                    std::to_string(config.agents[j].id) + " overlap at t=0 (pairwise_h=" +
                    std::to_string(h) + ")");
            }
        }
        for (std::size_t k = 0; k < config.obstacles.size(); ++k) {
            if (obstacle_h(config.agents[i], config.obstacles[k]) < 0.0) {
                throw std::invalid_argument("scenario: agent " +
                                            std::to_string(config.agents[i].id) +
                                            " overlaps obstacle " + std::to_string(k));
            }
            if (dist(config.agents[i].goal, config.obstacles[k].center) <=
                config.obstacles[k].radius) {
                throw std::invalid_argument("scenario: goal of agent " +
                                            std::to_string(config.agents[i].id) +
                                            " lies inside obstacle " + std::to_string(k));
            }
        }
    }
}

ScenarioConfig build_scenario(const std::string& name, int n_agents,
                              const std::map<std::string, double>& overrides) {
    if (n_agents < 1) {
        throw std::invalid_argument("build_scenario: n_agents must be >= 1");
    }
    if (n_agents > scenario_capacity(name)) {
        throw std::invalid_argument("build_scenario: '" + name + "' supports at most " +
                                    std::to_string(scenario_capacity(name)) + " agents");
    }
    Params p{overrides, {}};
    ScenarioConfig cfg;
    if (name == "doorway") cfg = build_doorway(n_agents, p);
    else if (name == "intersection") cfg = build_intersection(n_agents, p);
    else if (name == "hallway") cfg = build_hallway(n_agents, p);
    else cfg = build_lcorner(n_agents, p);
    validate(cfg);
    return cfg;
}

std::string save_scenario(const ScenarioConfig& config) {
    validate(config);
    json j;
    j["version"] = 1;
    j["name"] = config.name;
    j["dt"] = config.dt;
    j["t_max"] = config.t_max;
    j["eps_goal"] = config.eps_goal;
    j["resolve_same_step"] = config.resolve_same_step;
    j["gains"] = {{"kp", config.gains.kp}, {"kd", config.gains.kd}};
    j["safety"] = {{"gamma", config.safety.gamma},
                   {"margin", config.safety.margin},
                   {"obstacle_activation_dist", config.safety.obstacle_activation_dist},
                   {"brake_dt", config.safety.brake_dt},
                   {"brake_reserve", config.safety.brake_reserve}};
    j["spgp"] = {{"delta", config.spgp.delta},
                 {"u_t", config.spgp.u_t},
                 {"window", config.spgp.window},
                 {"candidates", config.spgp.candidates},
                 {"eps_pg", config.spgp.eps_pg},
                 {"neighbor_radius", config.spgp.neighbor_radius},
                 {"independent_xy", config.spgp.independent_xy},
                 {"perturb_timeout_steps", config.spgp.perturb_timeout_steps}};
    j["agents"] = json::array();
    for (const auto& a : config.agents) {
        j["agents"].push_back({{"id", a.id},
                               {"position", vec_to_json(a.position)},
                               {"velocity", vec_to_json(a.velocity)},
                               {"safety_radius", a.safety_radius},
                               {"accel_limit", a.accel_limit},
                               {"goal", vec_to_json(a.goal)}});
    }
    j["obstacles"] = json::array();
    for (const auto& o : config.obstacles) {
        j["obstacles"].push_back({{"center", vec_to_json(o.center)}, {"radius", o.radius}});
    }
    return j.dump(2) + "\n";
}

ScenarioConfig load_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioLoadError(std::string("scenario document: parse error: ") + e.what());
    }
    check_keys(j, {"version", "name", "dt", "t_max", "eps_goal", "resolve_same_step", "gains",
                   "safety", "spgp", "agents", "obstacles"},
               "");
    const int version = require_int(j, "version", "");
    if (version != 1) {
        throw ScenarioLoadError("scenario document: unknown version " +
                                std::to_string(version));
    }

    ScenarioConfig cfg;
    const json& name = require(j, "name", "");
    if (!name.is_string()) throw ScenarioLoadError("scenario document: 'name' must be a string");
    cfg.name = name.get<std::string>();
    cfg.dt = require_num(j, "dt", "");
    cfg.t_max = require_int(j, "t_max", "");
    cfg.eps_goal = require_num(j, "eps_goal", "");
    cfg.resolve_same_step = require_bool(j, "resolve_same_step", "");

    const json& gains = require(j, "gains", "");
    check_keys(gains, {"kp", "kd"}, "gains.");
    cfg.gains.kp = require_num(gains, "kp", "gains.");
    cfg.gains.kd = require_num(gains, "kd", "gains.");

    const json& safety = require(j, "safety", "");
    check_keys(safety, {"gamma", "margin", "obstacle_activation_dist", "brake_dt",
                        "brake_reserve"},
               "safety.");
    cfg.safety.gamma = require_num(safety, "gamma", "safety.");
    cfg.safety.margin = require_num(safety, "margin", "safety.");
    cfg.safety.obstacle_activation_dist =
        require_num(safety, "obstacle_activation_dist", "safety.");
    cfg.safety.brake_dt = require_num(safety, "brake_dt", "safety.");
    cfg.safety.brake_reserve = require_num(safety, "brake_reserve", "safety.");

    const json& sp = require(j, "spgp", "");
    check_keys(sp, {"delta", "u_t", "window", "candidates", "eps_pg", "neighbor_radius",
                    "independent_xy", "perturb_timeout_steps"},
               "spgp.");
    cfg.spgp.delta = require_num(sp, "delta", "spgp.");
    cfg.spgp.u_t = require_num(sp, "u_t", "spgp.");
    cfg.spgp.window = require_int(sp, "window", "spgp.");
    cfg.spgp.candidates = require_int(sp, "candidates", "spgp.");
    cfg.spgp.eps_pg = require_num(sp, "eps_pg", "spgp.");
    cfg.spgp.neighbor_radius = require_num(sp, "neighbor_radius", "spgp.");
    cfg.spgp.independent_xy = require_bool(sp, "independent_xy", "spgp.");
    cfg.spgp.perturb_timeout_steps = require_int(sp, "perturb_timeout_steps", "spgp.");

    const json& agents = require(j, "agents", "");
    if (!agents.is_array()) throw ScenarioLoadError("scenario document: 'agents' must be a list");
    for (const json& a : agents) {
        check_keys(a, {"id", "position", "velocity", "safety_radius", "accel_limit", "goal"},
                   "agents[].");
        AgentState st;
        st.id = require_int(a, "id", "agents[].");
        st.position = require_vec2(a, "position", "agents[].");
        st.velocity = require_vec2(a, "velocity", "agents[].");
        st.safety_radius = require_num(a, "safety_radius", "agents[].");
        st.accel_limit = require_num(a, "accel_limit", "agents[].");
        st.goal = require_vec2(a, "goal", "agents[].");
        cfg.agents.push_back(st);
    }

    const json& obstacles = require(j, "obstacles", "");
    if (!obstacles.is_array()) {
        throw ScenarioLoadError("scenario document: 'obstacles' must be a list");
    }
    for (const json& o : obstacles) {
        check_keys(o, {"center", "radius"}, "obstacles[].");
        Obstacle ob;
        ob.center = require_vec2(o, "center", "obstacles[].");
        ob.radius = require_num(o, "radius", "obstacles[].");
        cfg.obstacles.push_back(ob);
    }

    try {
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw ScenarioLoadError(std::string("scenario document: ") + e.what());
    }
    return cfg;
}

}  // namespace spgp
