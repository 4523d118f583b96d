#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <stdexcept>

#include "spgp/dynamics.hpp"
#include "spgp/rng.hpp"

using namespace spgp;

namespace {

AgentState agent_at(Vec2 p, Vec2 v = {}, Vec2 g = {}) {
    AgentState a;
    a.position = p;
    a.velocity = v;
    a.goal = g;
    return a;
}

}  // namespace

TEST_CASE("step_agent: zero acceleration coasts") {
    const auto next = step_agent(agent_at({0, 0}, {1, 0}), {0, 0}, 0.1);
    CHECK(next.position == Vec2{0.1, 0});
    CHECK(next.velocity == Vec2{1, 0});
}

TEST_CASE("step_agent: semi-implicit update order") {
    const auto next = step_agent(agent_at({0, 0}, {0, 0}), {1, 0}, 0.1);
    CHECK(next.velocity == Vec2{0.1, 0});
    // p += v' * dt, not v * dt
    CHECK(next.position.x == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(next.position.y == 0.0);
}

TEST_CASE("step_agent: rest is a fixed point") {
    AgentState a = agent_at({3.5, -2.25}, {0, 0}, {1, 1});
    for (int i = 0; i < 50; ++i) a = step_agent(a, {0, 0}, 0.05);
    CHECK(a.position == Vec2{3.5, -2.25});
}

TEST_CASE("step_agent: deterministic and preserves identity fields") {
    AgentState a = agent_at({1, 2}, {0.3, -0.4}, {5, 5});
    a.id = 7;
    a.safety_radius = 0.25;
    a.accel_limit = 1.5;
    const auto n1 = step_agent(a, {0.2, 0.1}, 0.05);
    const auto n2 = step_agent(a, {0.2, 0.1}, 0.05);
    CHECK(n1 == n2);
    CHECK(n1.id == 7);
    CHECK(n1.safety_radius == 0.25);
    CHECK(n1.accel_limit == 1.5);
    CHECK(n1.goal == Vec2{5, 5});
}

TEST_CASE("step_agent: rejects bad input") {
    CHECK_THROWS_AS(step_agent(agent_at({0, 0}), {0, 0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(step_agent(agent_at({0, 0}), {std::nan(""), 0}, 0.1),
                    std::invalid_argument);
    AgentState bad = agent_at({std::numeric_limits<double>::infinity(), 0});
    CHECK_THROWS_AS(step_agent(bad, {0, 0}, 0.1), std::invalid_argument);
}

TEST_CASE("clamp_to_ball basics") {
    CHECK(clamp_to_ball({0.5, 0}, 1.0) == Vec2{0.5, 0});
    CHECK(clamp_to_ball({0, 0}, 1.0) == Vec2{0, 0});
    const Vec2 r = clamp_to_ball({3, 4}, 1.0);
    CHECK(r.x == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.y == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("clamp_to_ball: norm bound holds exactly, identity inside") {
    Rng rng(42);
    for (int i = 0; i < 2000; ++i) {
        const Vec2 u{(rng.uniform() - 0.5) * 20.0, (rng.uniform() - 0.5) * 20.0};
        const double alpha = 0.01 + rng.uniform() * 5.0;
        const Vec2 c = clamp_to_ball(u, alpha);
        CHECK(norm_sq(c) <= alpha * alpha);
        if (norm_sq(u) <= alpha * alpha) {
            CHECK(c == u);
        }
    }
}

TEST_CASE("nominal_control: at rest at goal gives zero for any gains") {
    AgentState a = agent_at({2, 3}, {0, 0}, {2, 3});
    for (double kp : {0.1, 1.0, 10.0}) {
        for (double kd : {0.5, 2.0, 8.0}) {
            const auto u = nominal_control(a, {kp, kd});
            CHECK(u == Vec2{0, 0});
        }
    }
}

TEST_CASE("nominal_control: PD then clamp") {
    AgentState a = agent_at({0, 0}, {0, 0}, {1, 0});
    a.accel_limit = 1.0;
    CHECK(nominal_control(a, {1.0, 2.0}) == Vec2{1, 0});

    // Far goal: raw PD (10, 0) is radially clamped to the accel limit.
    a.goal = {10, 0};
    const auto u = nominal_control(a, {1.0, 2.0});
    const Vec2 raw = 1.0 * (a.goal - a.position) - 2.0 * a.velocity;
    const Vec2 expected = raw * (a.accel_limit / norm(raw));
    CHECK(u.x == doctest::Approx(expected.x).epsilon(1e-12));
    CHECK(u.y == doctest::Approx(expected.y).epsilon(1e-12));
    CHECK(norm(u) <= 1.0);
}

TEST_CASE("rng: bit-exact sequence for fixed seed") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(124);
    CHECK(Rng(123).next_u64() != c.next_u64());
    Rng d(9);
    for (int i = 0; i < 1000; ++i) {
        const double x = d.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}
