#include "selfish/policies.hpp"

#include <cmath>
#include <stdexcept>

namespace selfish {

double boids_action(const AgentState& self, std::span<const AgentState> all_agents,
                    const PredatorState& predator, const BoidsWeights& w,
                    const WorldConfig& cfg) {
  const double L = cfg.edge_length;

  Vec2 align_sum{};
  Vec2 cohere_sum{};
  Vec2 separate{};
  int neighbor_count = 0;

  for (const AgentState& other : all_agents) {
    if (other.id == self.id) continue;
    const double d = torus_distance(self.pos, other.pos, L);
    if (d > w.neighbor_radius) continue;
    ++neighbor_count;
    align_sum += heading_vec(other.orientation_deg);
    const Vec2 delta = torus_delta(self.pos, other.pos, L);
    cohere_sum += delta;
    if (d <= w.separation_radius && d > 0.0) {
      // unit vector away, scaled by 1/d
      separate += delta * (-1.0 / (d * d));
    }
  }

  Vec2 v{};
  if (neighbor_count > 0) {
    // mean of neighbor heading unit vectors; magnitude reflects coherence
    v += align_sum * (w.w_align / neighbor_count);
    // center of mass of neighbors = self + mean displacement
    if (cohere_sum.norm() > 0.0) v += cohere_sum * (w.w_cohere / cohere_sum.norm());
    v += separate * w.w_separate;
  }
  const Vec2 from_pred = torus_delta(predator.pos, self.pos, L);
  if (from_pred.norm() > 0.0) v += from_pred * (w.w_avoid / from_pred.norm());

  if (v.norm() == 0.0) return 0.0;
  const double desired_deg = rad_to_deg(std::atan2(v.y, v.x));
  return wrap_angle_signed(desired_deg - self.orientation_deg);
}

double turnaway_action(const AgentState& self, const PredatorState& predator,
                       const WorldConfig& cfg) {
  const Vec2 d = torus_delta(self.pos, predator.pos, cfg.edge_length);
  if (d.x == 0.0 && d.y == 0.0) return 0.0;
  const double bearing =
      torus_direction_deg(self.pos, self.orientation_deg, predator.pos, cfg.edge_length);
  return wrap_angle_signed(bearing + 180.0);
}

int dqn_action_index(std::span<const double> q_values) {
  int best = 0;
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    if (!std::isfinite(q_values[i]))
      throw std::runtime_error("dqn_action: non-finite Q value");
    if (q_values[i] > q_values[best]) best = static_cast<int>(i);
  }
  return best;
}

double dqn_action(const Observation& obs, const MlpParams& q_net) {
  const std::vector<double> q = mlp_forward(q_net, obs.values);
  if (q.size() != kDiscreteActionsDeg.size())
    throw std::runtime_error("dqn_action: Q network must have 5 outputs");
  return kDiscreteActionsDeg[dqn_action_index(q)];
}

double ddpg_action(const Observation& obs, const MlpParams& actor) {
  const std::vector<double> out = mlp_forward(actor, obs.values);
  if (out.size() != 1)
    throw std::runtime_error("ddpg_action: actor must have 1 output");
  if (!std::isfinite(out[0]))
    throw std::runtime_error("ddpg_action: non-finite actor output");
  return wrap_angle_signed(out[0]);
}

double policy_action(const PolicyKind& policy, const WorldState& state, int agent_id,
                     const WorldConfig& cfg, SplitMix64& rng) {
  const AgentState& self = state.agents[agent_id];
  if (const auto* b = std::get_if<BoidsWeights>(&policy))
    return boids_action(self, state.agents, state.predator, *b, cfg);
  if (std::get_if<TurnAwayPolicy>(&policy))
    return turnaway_action(self, state.predator, cfg);
  if (const auto* p = std::get_if<DqnPolicy>(&policy))
    return dqn_action(build_observation(state, agent_id, p->neighbors, cfg), p->net);
  if (const auto* p = std::get_if<DdpgPolicy>(&policy))
    return ddpg_action(build_observation(state, agent_id, p->neighbors, cfg), p->actor);
  return kDiscreteActionsDeg[rng.uniform_int(kDiscreteActionsDeg.size())];
}

int policy_observation_neighbors(const PolicyKind& policy) {
  if (const auto* p = std::get_if<DqnPolicy>(&policy)) return p->neighbors;
  if (const auto* p = std::get_if<DdpgPolicy>(&policy)) return p->neighbors;
  return 0;
}

}  // namespace selfish
