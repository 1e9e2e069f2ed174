#pragma once

#include <functional>
#include <span>

#include "selfish/mlp.hpp"
#include "selfish/replay.hpp"
#include "selfish/rng.hpp"

namespace selfish {

struct DdpgConfig {
  long training_steps = 500000;
  double gamma = 0.999999;
  double learning_rate = 0.001;  // both actor and critic
  std::size_t buffer_size = 100000;
  int batch_size = 512;
  double ou_theta = 0.15;
  double ou_mu = 0.0;
  double ou_sigma = 0.3;
  int observable_neighbors = 1;
  int actor_hidden_layers = 5;
  int actor_hidden_width = 16;
  int critic_hidden_layers = 5;
  int critic_hidden_width = 32;
  double tau = 0.001;
  long warmup_steps = 1000;
  double noise_scale_deg = 90.0;  // degrees of turn per unit of OU noise
  long checkpoint_interval_episodes = 100;

  void validate() const;  // throws std::invalid_argument
};

// Discrete Ornstein-Uhlenbeck recursion x <- x + theta*(mu - x) + sigma*N(0,1).
struct OuNoise {
  double theta = 0.15;
  double mu = 0.0;
  double sigma = 0.3;
  double x = 0.0;

  double step(SplitMix64& rng) {
    x += theta * (mu - x) + sigma * rng.gaussian();
    return x;
  }
  void reset() { x = mu; }
};

// Actor/critic pair with their targets and optimizers. The critic consumes
// [obs, action/180]; actions are kept in degrees everywhere else.
struct DdpgNets {
  MlpParams actor;
  MlpParams critic;
  MlpParams target_actor;
  MlpParams target_critic;
  AdamState actor_adam;
  AdamState critic_adam;
};

DdpgNets make_ddpg_nets(int obs_width, const DdpgConfig& cfg, SplitMix64& rng);

inline constexpr double kCriticActionScale = 180.0;

// dQ/da supplier for the actor update: given an observation and the raw actor
// output (degrees), returns the critic's action gradient.
using ActionGradFn = std::function<double(std::span<const double> obs, double action)>;

// One ascent step on mean_i Q(s_i, mu(s_i)): chains the supplied dQ/da
// through the actor and applies Adam. Factored out so a frozen analytic
// critic can drive the same code path as the learned one.
void ddpg_actor_update(MlpParams& actor, AdamState& adam,
                       std::span<const std::vector<double>* const> obs_batch,
                       const ActionGradFn& dq_da);

struct DdpgStepResult {
  bool applied = false;
  double critic_loss = 0.0;
};

// Critic regression toward r + gamma * Qt(s', mu_t(s')) (r when terminal),
// then the actor ascent step, then soft target updates with tau.
DdpgStepResult ddpg_train_step(DdpgNets& nets, const ReplayBuffer& buffer,
                               const DdpgConfig& cfg, SplitMix64& rng);

}  // namespace selfish
