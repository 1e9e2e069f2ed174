#include "selfish/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfish {

void WorldConfig::validate() const {
  if (edge_length <= 0.0) throw std::invalid_argument("edge-length must be > 0");
  if (agent_speed <= 0.0) throw std::invalid_argument("agent-speed must be > 0");
  if (predator_speed < 0.0) throw std::invalid_argument("predator-speed must be >= 0");
  if (num_agents < 1) throw std::invalid_argument("num-agents must be >= 1");
  if (catch_distance != 2.0 * agent_radius)
    throw std::invalid_argument("catch-distance must equal 2 * agent-radius");
  if (predator_max_turn_deg <= 0.0 || predator_max_turn_deg > 180.0)
    throw std::invalid_argument("predator-max-turn must lie in (0, 180]");
  if (distraction_radius < 0.0)
    throw std::invalid_argument("distraction-radius must be >= 0");
  if (lock_duration < 0 || leap_duration < 0 || leap_cooldown < 0)
    throw std::invalid_argument("predator timers must be >= 0");
  if (leap_speed_factor < 1.0)
    throw std::invalid_argument("leap-speed-factor must be >= 1");
  if (max_episode_steps < 1)
    throw std::invalid_argument("max-episode-steps must be >= 1");
  if (prey_max_turn_deg < 0.0)
    throw std::invalid_argument("prey-max-turn must be >= 0");
}

WorldState init_world(const WorldConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  WorldState s;
  s.rng = SplitMix64(seed);
  s.agents.resize(cfg.num_agents);
  for (int i = 0; i < cfg.num_agents; ++i) {
    AgentState& a = s.agents[i];
    a.id = i;
    a.pos = {s.rng.uniform(0.0, cfg.edge_length), s.rng.uniform(0.0, cfg.edge_length)};
    a.orientation_deg = s.rng.uniform(0.0, 360.0);
    a.alive_steps = 0;
  }
  s.predator.pos = {s.rng.uniform(0.0, cfg.edge_length),
                    s.rng.uniform(0.0, cfg.edge_length)};
  s.predator.orientation_deg = s.rng.uniform(0.0, 360.0);
  s.predator.lock_remaining = 0;
  s.predator.leap_remaining = 0;
  s.predator.leap_cooldown_remaining = cfg.leap_cooldown;
  s.predator.target_id = -1;
  return s;
}

namespace {

int closest_agent(const WorldState& state, const Vec2& from, double L) {
  int best = -1;
  double best_d = 0.0;
  for (const AgentState& a : state.agents) {
    const double d = torus_distance(from, a.pos, L);
    if (best < 0 || d < best_d) {
      best = a.id;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

PredatorState predator_step(const WorldState& state, const WorldConfig& cfg,
                            SplitMix64& rng) {
  PredatorState p = state.predator;
  const double L = cfg.edge_length;

  const bool target_valid =
      p.target_id >= 0 && p.target_id < static_cast<int>(state.agents.size());
  if (!(p.lock_remaining > 0 && target_valid)) {
    std::vector<int> nearby;
    for (const AgentState& a : state.agents)
      if (torus_distance(p.pos, a.pos, L) <= cfg.distraction_radius)
        nearby.push_back(a.id);
    if (!nearby.empty())
      p.target_id = nearby[rng.uniform_int(nearby.size())];
    else
      p.target_id = closest_agent(state, p.pos, L);
    p.lock_remaining = cfg.lock_duration;
  }

  const Vec2 target_pos = state.agents[p.target_id].pos;
  const double bearing = torus_direction_deg(p.pos, p.orientation_deg, target_pos, L);
  const double turn = std::clamp(bearing, -cfg.predator_max_turn_deg,
                                 cfg.predator_max_turn_deg);
  p.orientation_deg = wrap_angle_360(p.orientation_deg + turn);

  const bool leaping = p.leap_remaining > 0;
  const double speed = cfg.predator_speed * (leaping ? cfg.leap_speed_factor : 1.0);
  p.pos = wrap_position(p.pos + heading_vec(p.orientation_deg) * speed, L);

  if (p.lock_remaining > 0) --p.lock_remaining;
  if (leaping) {
    --p.leap_remaining;
  } else {
    if (p.leap_cooldown_remaining > 0) --p.leap_cooldown_remaining;
    if (p.leap_cooldown_remaining == 0) {
      p.leap_remaining = cfg.leap_duration;
      p.leap_cooldown_remaining = cfg.leap_cooldown;
    }
  }
  return p;
}

StepEvents step_world(WorldState& state, std::span<const double> actions_deg,
                      const WorldConfig& cfg) {
  if (actions_deg.size() != state.agents.size())
    throw std::invalid_argument("step_world: one action per agent required");

  const double L = cfg.edge_length;

  // All prey move on the stale state.
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    AgentState& a = state.agents[i];
    double turn = actions_deg[i];
    if (cfg.prey_max_turn_deg > 0.0)
      turn = std::clamp(turn, -cfg.prey_max_turn_deg, cfg.prey_max_turn_deg);
    a.orientation_deg = wrap_angle_360(a.orientation_deg + turn);
    a.pos = wrap_position(a.pos + heading_vec(a.orientation_deg) * cfg.agent_speed, L);
  }

  if (!cfg.pinned_predator)
    state.predator = predator_step(state, cfg, state.rng);

  StepEvents events;
  for (AgentState& a : state.agents) {
    if (torus_distance(a.pos, state.predator.pos, L) < cfg.catch_distance) {
      events.caught.push_back(a.id);
      const Vec2 spawn{state.rng.uniform(0.0, L), state.rng.uniform(0.0, L)};
      events.catches.push_back({a.id, a.pos, a.orientation_deg, spawn});
      a.pos = spawn;
      a.orientation_deg = state.rng.uniform(0.0, 360.0);
      a.alive_steps = 0;
      if (state.predator.target_id == a.id) {
        // The locked target is gone; re-select next frame.
        state.predator.target_id = -1;
        state.predator.lock_remaining = 0;
      }
    } else {
      ++a.alive_steps;
    }
  }
  ++state.frame;
  return events;
}

Observation build_observation(const WorldState& state, int agent_id, int n,
                              const WorldConfig& cfg) {
  if (n < 0 || n > static_cast<int>(state.agents.size()) - 1)
    throw std::invalid_argument("build_observation: need n <= num_agents - 1");

  const double L = cfg.edge_length;
  const double max_dist = max_torus_distance(L);
  const AgentState& self = state.agents[agent_id];

  Observation obs;
  obs.neighbors = n;
  obs.values.reserve(3 * (n + 2));

  auto push_row = [&](const Vec2& pos, double orientation_deg) {
    const double dist = torus_distance(self.pos, pos, L);
    const double dir = torus_direction_deg(self.pos, self.orientation_deg, pos, L);
    obs.values.push_back(dist / max_dist);
    obs.values.push_back((dir + 180.0) / 360.0);
    obs.values.push_back(wrap_angle_360(orientation_deg) / 360.0);
  };

  push_row(state.predator.pos, state.predator.orientation_deg);

  obs.values.push_back(0.0);
  obs.values.push_back(0.0);
  obs.values.push_back(wrap_angle_360(self.orientation_deg) / 360.0);

  std::vector<std::pair<double, int>> others;  // (distance, id), ties by id
  others.reserve(state.agents.size() - 1);
  for (const AgentState& a : state.agents) {
    if (a.id == agent_id) continue;
    others.emplace_back(torus_distance(self.pos, a.pos, L), a.id);
  }
  std::sort(others.begin(), others.end());
  for (int k = 0; k < n; ++k) {
    const AgentState& a = state.agents[others[k].second];
    push_row(a.pos, a.orientation_deg);
  }
  return obs;
}

double reward_for(int agent_id, const StepEvents& events) {
  for (int id : events.caught)
    if (id == agent_id) return -1000.0;
  return 1.0;
}

}  // namespace selfish
