#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "selfish/policies.hpp"

using namespace selfish;

namespace {

WorldConfig base_cfg(int agents) {
  WorldConfig cfg;
  cfg.num_agents = agents;
  return cfg;
}

WorldState scene(const std::vector<Vec2>& pos, const std::vector<double>& orient,
                 Vec2 predator_pos) {
  WorldState s;
  s.agents.resize(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    s.agents[i].id = static_cast<int>(i);
    s.agents[i].pos = pos[i];
    s.agents[i].orientation_deg = orient[i];
  }
  s.predator.pos = predator_pos;
  return s;
}

// Flat-plane reimplementation of the steering rule, valid when the whole
// scene fits well inside one tile so no displacement wraps. Scalar math only.
double flat_boids_turn(const WorldState& s, int self_id, const BoidsWeights& w) {
  const AgentState& self = s.agents[self_id];
  double ax = 0.0, ay = 0.0;          // heading sum
  double cx = 0.0, cy = 0.0;          // displacement sum
  double sx = 0.0, sy = 0.0;          // separation sum
  int n = 0;
  for (const AgentState& o : s.agents) {
    if (o.id == self_id) continue;
    const double dx = o.pos.x - self.pos.x;
    const double dy = o.pos.y - self.pos.y;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d > w.neighbor_radius) continue;
    ++n;
    ax += std::cos(o.orientation_deg * M_PI / 180.0);
    ay += std::sin(o.orientation_deg * M_PI / 180.0);
    cx += dx;
    cy += dy;
    if (d <= w.separation_radius && d > 0.0) {
      sx -= dx / (d * d);
      sy -= dy / (d * d);
    }
  }
  double vx = 0.0, vy = 0.0;
  if (n > 0) {
    vx += w.w_align * ax / n;
    vy += w.w_align * ay / n;
    const double cn = std::sqrt(cx * cx + cy * cy);
    if (cn > 0.0) {
      vx += w.w_cohere * cx / cn;
      vy += w.w_cohere * cy / cn;
    }
    vx += w.w_separate * sx;
    vy += w.w_separate * sy;
  }
  const double px = self.pos.x - s.predator.pos.x;
  const double py = self.pos.y - s.predator.pos.y;
  const double pn = std::sqrt(px * px + py * py);
  if (pn > 0.0) {
    vx += w.w_avoid * px / pn;
    vy += w.w_avoid * py / pn;
  }
  if (vx == 0.0 && vy == 0.0) return 0.0;
  double turn = std::atan2(vy, vx) * 180.0 / M_PI - self.orientation_deg;
  while (turn > 180.0) turn -= 360.0;
  while (turn <= -180.0) turn += 360.0;
  return turn;
}

}  // namespace

TEST_CASE("boids: pure predator avoidance turns straight away") {
  const WorldConfig cfg = base_cfg(1);
  BoidsWeights w;
  w.w_align = w.w_cohere = w.w_separate = 0.0;
  // facing east with the predator due east -> turn fully around
  WorldState s = scene({{10.0, 10.0}}, {0.0}, {15.0, 10.0});
  CHECK(boids_action(s.agents[0], s.agents, s.predator, w, cfg) ==
        doctest::Approx(180.0));
  // predator due north -> flee south: -90
  s.predator.pos = {10.0, 15.0};
  CHECK(boids_action(s.agents[0], s.agents, s.predator, w, cfg) ==
        doctest::Approx(-90.0));
}

TEST_CASE("boids: symmetric neighborhood produces no turn") {
  const WorldConfig cfg = base_cfg(3);
  BoidsWeights w;
  w.w_avoid = 0.0;
  // two neighbors mirrored north/south of an east-facing observer, both
  // facing east themselves: every term cancels or points east
  WorldState s = scene({{20.0, 20.0}, {20.0, 24.0}, {20.0, 16.0}}, {0.0, 0.0, 0.0},
                       {5.0, 5.0});
  const double turn = boids_action(s.agents[0], s.agents, s.predator, w, cfg);
  CHECK(std::fabs(turn) < 1e-9);
}

TEST_CASE("boids: cohesion pulls toward the neighborhood center") {
  const WorldConfig cfg = base_cfg(2);
  BoidsWeights w;
  w.w_align = w.w_separate = w.w_avoid = 0.0;
  // single neighbor due north, observer facing east
  WorldState s = scene({{20.0, 20.0}, {20.0, 26.0}}, {0.0, 0.0}, {5.0, 5.0});
  CHECK(boids_action(s.agents[0], s.agents, s.predator, w, cfg) ==
        doctest::Approx(90.0));
}

TEST_CASE("boids: separation pushes off a too-close neighbor") {
  const WorldConfig cfg = base_cfg(2);
  BoidsWeights w;
  w.w_align = w.w_cohere = w.w_avoid = 0.0;
  WorldState s = scene({{20.0, 20.0}, {20.0, 22.0}}, {0.0, 0.0}, {5.0, 5.0});
  CHECK(boids_action(s.agents[0], s.agents, s.predator, w, cfg) ==
        doctest::Approx(-90.0));

  SUBCASE("no separation term beyond separation_radius") {
    s.agents[1].pos = {20.0, 24.0};  // inside neighbor radius, outside separation
    CHECK(boids_action(s.agents[0], s.agents, s.predator, w, cfg) == 0.0);
  }
}

TEST_CASE("boids matches a flat-plane reimplementation on random scenes") {
  const WorldConfig cfg = base_cfg(8);
  SplitMix64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> pos;
    std::vector<double> orient;
    // everything inside a central 12x12 box: no wrapping anywhere
    for (int i = 0; i < 8; ++i) {
      pos.push_back({rng.uniform(14.0, 26.0), rng.uniform(14.0, 26.0)});
      orient.push_back(rng.uniform(0.0, 360.0));
    }
    const Vec2 pred{rng.uniform(14.0, 26.0), rng.uniform(14.0, 26.0)};
    WorldState s = scene(pos, orient, pred);

    BoidsWeights w;
    w.w_align = rng.uniform(0.0, 2.0);
    w.w_cohere = rng.uniform(0.0, 2.0);
    w.w_separate = rng.uniform(0.0, 2.0);
    w.w_avoid = rng.uniform(0.0, 2.0);

    for (int i = 0; i < 8; ++i) {
      const double got = boids_action(s.agents[i], s.agents, s.predator, w, cfg);
      const double want = flat_boids_turn(s, i, w);
      CHECK(std::fabs(wrap_angle_signed(got - want)) < 1e-9);
    }
  }
}

TEST_CASE("boids turn is invariant under rigid motions of the scene") {
  const WorldConfig cfg = base_cfg(5);
  SplitMix64 rng(42);
  const BoidsWeights w;

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> pos;
    std::vector<double> orient;
    for (int i = 0; i < 5; ++i) {
      pos.push_back({rng.uniform(16.0, 24.0), rng.uniform(16.0, 24.0)});
      orient.push_back(rng.uniform(0.0, 360.0));
    }
    const Vec2 pred{rng.uniform(16.0, 24.0), rng.uniform(16.0, 24.0)};
    WorldState s = scene(pos, orient, pred);
    const double base = boids_action(s.agents[0], s.agents, s.predator, w, cfg);

    const double phi = rng.uniform(0.0, 360.0);
    const double cr = std::cos(phi * M_PI / 180.0), sr = std::sin(phi * M_PI / 180.0);
    auto rot = [&](Vec2 p) -> Vec2 {
      const double x = p.x - 20.0, y = p.y - 20.0;
      return {20.0 + cr * x - sr * y, 20.0 + sr * x + cr * y};
    };
    std::vector<Vec2> rpos;
    std::vector<double> rorient;
    for (int i = 0; i < 5; ++i) {
      rpos.push_back(rot(pos[i]));
      rorient.push_back(wrap_angle_360(orient[i] + phi));
    }
    WorldState sr_state = scene(rpos, rorient, rot(pred));
    const double rotated =
        boids_action(sr_state.agents[0], sr_state.agents, sr_state.predator, w, cfg);
    CHECK(std::fabs(wrap_angle_signed(rotated - base)) < 1e-6);

    // translation across the wrap boundary
    const Vec2 t{rng.uniform(0.0, 40.0), rng.uniform(0.0, 40.0)};
    std::vector<Vec2> tpos;
    for (int i = 0; i < 5; ++i) tpos.push_back(wrap_position(pos[i] + t, 40.0));
    WorldState st = scene(tpos, orient, wrap_position(pred + t, 40.0));
    const double translated =
        boids_action(st.agents[0], st.agents, st.predator, w, cfg);
    CHECK(std::fabs(wrap_angle_signed(translated - base)) < 1e-9);
  }
}

TEST_CASE("turnaway points exactly opposite the predator") {
  const WorldConfig cfg = base_cfg(1);
  WorldState s = scene({{10.0, 10.0}}, {0.0}, {15.0, 10.0});
  // facing east, predator due east -> +180
  CHECK(turnaway_action(s.agents[0], s.predator, cfg) == doctest::Approx(180.0));
  // facing west already fleeing -> 0
  s.agents[0].orientation_deg = 180.0;
  CHECK(std::fabs(turnaway_action(s.agents[0], s.predator, cfg)) < 1e-12);
  // predator due north, facing east -> -90
  s.agents[0].orientation_deg = 0.0;
  s.predator.pos = {10.0, 15.0};
  CHECK(turnaway_action(s.agents[0], s.predator, cfg) == doctest::Approx(-90.0));
  // coincident positions -> no preferred direction
  s.predator.pos = {10.0, 10.0};
  CHECK(turnaway_action(s.agents[0], s.predator, cfg) == 0.0);

  SUBCASE("after the turn the predator sits exactly behind") {
    SplitMix64 rng(43);
    for (int i = 0; i < 200; ++i) {
      WorldState r = scene({{rng.uniform(0.0, 40.0), rng.uniform(0.0, 40.0)}},
                           {rng.uniform(0.0, 360.0)},
                           {rng.uniform(0.0, 40.0), rng.uniform(0.0, 40.0)});
      if (torus_distance(r.agents[0].pos, r.predator.pos, 40.0) < 1e-6) continue;
      const double turn = turnaway_action(r.agents[0], r.predator, cfg);
      const double after = wrap_angle_360(r.agents[0].orientation_deg + turn);
      const double bearing =
          torus_direction_deg(r.agents[0].pos, after, r.predator.pos, 40.0);
      CHECK(std::fabs(bearing) == doctest::Approx(180.0));
    }
  }
}

TEST_CASE("dqn_action takes the greedy discrete turn") {
  // identity-ish shaping through a hand-built net is overkill here; drive the
  // argmax directly
  CHECK(dqn_action_index(std::vector<double>{1.0, 2.0, 3.0, 2.0, 1.0}) == 2);
  CHECK(kDiscreteActionsDeg[2] == 0.0);
  // ties break to the lowest index
  CHECK(dqn_action_index(std::vector<double>{7.0, 7.0, 7.0, 7.0, 7.0}) == 0);
  CHECK(kDiscreteActionsDeg[0] == -90.0);
  CHECK(dqn_action_index(std::vector<double>{0.0, 5.0, 5.0, 0.0, 0.0}) == 1);

  SUBCASE("argmax is invariant to positive affine rescaling") {
    SplitMix64 rng(44);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> q(5);
      for (double& v : q) v = rng.uniform(-10.0, 10.0);
      const int base = dqn_action_index(q);
      const double a = rng.uniform(0.1, 5.0), b = rng.uniform(-3.0, 3.0);
      std::vector<double> scaled(5);
      for (int k = 0; k < 5; ++k) scaled[k] = a * q[k] + b;
      CHECK(dqn_action_index(scaled) == base);
    }
  }

  SUBCASE("non-finite Q values are rejected") {
    CHECK_THROWS_AS(dqn_action_index(std::vector<double>{0.0, NAN, 0.0, 0.0, 0.0}),
                    std::runtime_error);
  }

  SUBCASE("zero network prefers the first action") {
    SplitMix64 r(45);
    MlpParams net = init_params(MlpSpec::make(9, 2, 8, 5), r);
    for (auto& layer : net.weights)
      for (double& v : layer) v = 0.0;
    for (auto& layer : net.biases)
      for (double& v : layer) v = 0.0;
    Observation obs;
    obs.neighbors = 1;
    obs.values.assign(9, 0.5);
    CHECK(dqn_action(obs, net) == -90.0);
  }
}

TEST_CASE("ddpg_action wraps the raw actor output") {
  SplitMix64 rng(46);
  MlpParams actor = init_params(MlpSpec::make(9, 2, 8, 1), rng);
  // overwrite into a constant function: zero weights, bias = raw output
  for (auto& layer : actor.weights)
    for (double& v : layer) v = 0.0;
  for (auto& layer : actor.biases)
    for (double& v : layer) v = 0.0;

  Observation obs;
  obs.neighbors = 1;
  obs.values.assign(9, 0.3);

  actor.biases.back()[0] = 45.0;
  CHECK(ddpg_action(obs, actor) == doctest::Approx(45.0));
  actor.biases.back()[0] = 270.0;
  CHECK(ddpg_action(obs, actor) == doctest::Approx(-90.0));
  actor.biases.back()[0] = 0.0;
  CHECK(ddpg_action(obs, actor) == 0.0);
  actor.biases.back()[0] = -180.0;
  CHECK(ddpg_action(obs, actor) == doctest::Approx(180.0));
}

TEST_CASE("policy_action dispatch") {
  WorldConfig cfg = base_cfg(6);
  WorldState s = init_world(cfg, 47);
  SplitMix64 rng(48);

  SUBCASE("random policy draws from the discrete set") {
    const PolicyKind p = RandomPolicy{};
    for (int i = 0; i < 100; ++i) {
      const double a = policy_action(p, s, 0, cfg, rng);
      bool in_set = false;
      for (double d : kDiscreteActionsDeg) in_set |= (a == d);
      CHECK(in_set);
    }
  }

  SUBCASE("turnaway dispatch agrees with the direct call") {
    const PolicyKind p = TurnAwayPolicy{};
    CHECK(policy_action(p, s, 2, cfg, rng) ==
          turnaway_action(s.agents[2], s.predator, cfg));
  }

  SUBCASE("observation neighbor counts") {
    CHECK(policy_observation_neighbors(PolicyKind{TurnAwayPolicy{}}) == 0);
    CHECK(policy_observation_neighbors(PolicyKind{BoidsWeights{}}) == 0);
    DqnPolicy dq;
    dq.neighbors = 5;
    CHECK(policy_observation_neighbors(PolicyKind{std::move(dq)}) == 5);
    DdpgPolicy dd;
    dd.neighbors = 1;
    CHECK(policy_observation_neighbors(PolicyKind{std::move(dd)}) == 1);
  }
}
