#pragma once

#include <span>

#include "selfish/mlp.hpp"
#include "selfish/replay.hpp"
#include "selfish/rng.hpp"

namespace selfish {

struct DqnConfig {
  long training_steps = 500000;
  double gamma = 0.999999;
  double learning_rate = 0.001;
  std::size_t buffer_size = 50000;
  int batch_size = 64;
  double epsilon = 0.1;
  int observable_neighbors = 5;
  int hidden_layers = 10;
  int hidden_width = 16;
  long warmup_steps = 1000;
  long target_update_interval = 500;  // gradient steps between hard copies; 0 disables targets
  long checkpoint_interval_episodes = 100;

  void validate() const;  // throws std::invalid_argument
};

// r when terminal, else r + gamma * max(next_q).
double q_target(double reward, bool terminal, std::span<const double> next_q,
                double gamma);

// With probability epsilon a uniform index (the argmax included), else the
// greedy index with lowest-index tie breaking.
int epsilon_greedy(std::span<const double> q_values, double epsilon, SplitMix64& rng);

struct TrainStepResult {
  bool applied = false;  // false: buffer below batch size, step skipped
  double loss = 0.0;
};

// One Adam step on the mean squared TD error of a uniformly sampled batch.
// Targets come from `target` (pass the live net itself to train without a
// target network). Gradients flow only through the taken-action outputs.
// When batch_size >= buffer.size() the whole buffer is used exactly once,
// which makes small-buffer fitting deterministic.
TrainStepResult dqn_train_step(MlpParams& q_net, const MlpParams& target,
                               const ReplayBuffer& buffer, AdamState& adam,
                               const DqnConfig& cfg, SplitMix64& rng);

// Mean squared TD error over the whole buffer, no update. Divergence guard
// and test hook.
double dqn_loss(const MlpParams& q_net, const MlpParams& target,
                const ReplayBuffer& buffer, double gamma);

}  // namespace selfish
