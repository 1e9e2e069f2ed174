#pragma once

#include <array>
#include <span>
#include <variant>

#include "selfish/mlp.hpp"
#include "selfish/world.hpp"

namespace selfish {

// Fixed action set for the discrete learner; index = network output index.
inline constexpr std::array<double, 5> kDiscreteActionsDeg = {-90.0, -45.0, 0.0,
                                                              45.0, 90.0};

struct BoidsWeights {
  double w_align = 1.0;
  double w_cohere = 1.0;
  double w_separate = 1.0;
  double w_avoid = 1.0;
  double neighbor_radius = 10.0;
  double separation_radius = 3.0;
};

// Steering turn from the weighted force sum:
//   w_align    * mean of neighbor heading unit vectors
// + w_cohere   * unit vector toward the neighbors' torus center of mass
// + w_separate * sum over neighbors within separation_radius of unit vectors
//                away, each scaled by 1/distance
// + w_avoid    * unit vector away from the predator (shortest displacement)
// Neighbors are the other agents within neighbor_radius. Returns the signed,
// unclamped turn toward the sum's direction; 0 when the sum vanishes.
double boids_action(const AgentState& self, std::span<const AgentState> all_agents,
                    const PredatorState& predator, const BoidsWeights& w,
                    const WorldConfig& cfg);

// Turn that points exactly opposite the predator's bearing.
double turnaway_action(const AgentState& self, const PredatorState& predator,
                       const WorldConfig& cfg);

// Greedy discrete action; ties break to the lowest index. Throws
// std::runtime_error on non-finite network output.
double dqn_action(const Observation& obs, const MlpParams& q_net);
int dqn_action_index(std::span<const double> q_values);

// Continuous action: raw actor output in degrees wrapped into (-180, 180].
double ddpg_action(const Observation& obs, const MlpParams& actor);

struct TurnAwayPolicy {};
struct RandomPolicy {};  // uniform over kDiscreteActionsDeg; baseline
struct DqnPolicy {
  MlpParams net;
  int neighbors = 5;
};
struct DdpgPolicy {
  MlpParams actor;
  int neighbors = 1;
};

using PolicyKind =
    std::variant<BoidsWeights, TurnAwayPolicy, DqnPolicy, DdpgPolicy, RandomPolicy>;

// Evaluates one agent's turn under the given policy. rng is only consumed by
// RandomPolicy. Pure in (policy, world) otherwise.
double policy_action(const PolicyKind& policy, const WorldState& state, int agent_id,
                     const WorldConfig& cfg, SplitMix64& rng);

// Neighbor count a policy needs in its observation (0 for non-neural ones).
int policy_observation_neighbors(const PolicyKind& policy);

}  // namespace selfish
