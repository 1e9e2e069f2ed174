#include "selfish/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "selfish/policies.hpp"

namespace selfish {

void DqnConfig::validate() const {
  if (training_steps < 1) throw std::invalid_argument("dqn: training_steps must be >= 1");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("dqn: gamma must lie in [0, 1]");
  if (learning_rate <= 0.0) throw std::invalid_argument("dqn: learning_rate must be > 0");
  if (buffer_size < 1) throw std::invalid_argument("dqn: buffer_size must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("dqn: batch_size must be >= 1");
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("dqn: epsilon must lie in [0, 1]");
  if (observable_neighbors < 0) throw std::invalid_argument("dqn: observable_neighbors must be >= 0");
  if (hidden_layers < 1) throw std::invalid_argument("dqn: hidden_layers must be >= 1");
  if (hidden_width < 1) throw std::invalid_argument("dqn: hidden_width must be >= 1");
  if (warmup_steps < 0) throw std::invalid_argument("dqn: warmup_steps must be >= 0");
  if (target_update_interval < 0)
    throw std::invalid_argument("dqn: target_update_interval must be >= 0");
  if (checkpoint_interval_episodes < 0)
    throw std::invalid_argument("dqn: checkpoint_interval_episodes must be >= 0");
}

double q_target(double reward, bool terminal, std::span<const double> next_q,
                double gamma) {
  if (next_q.empty()) throw std::invalid_argument("q_target: empty next_q");
  if (terminal) return reward;
  return reward + gamma * *std::max_element(next_q.begin(), next_q.end());
}

int epsilon_greedy(std::span<const double> q_values, double epsilon, SplitMix64& rng) {
  if (epsilon > 0.0 && rng.next_double() < epsilon)
    return static_cast<int>(rng.uniform_int(q_values.size()));
  return dqn_action_index(q_values);
}

TrainStepResult dqn_train_step(MlpParams& q_net, const MlpParams& target,
                               const ReplayBuffer& buffer, AdamState& adam,
                               const DqnConfig& cfg, SplitMix64& rng) {
  const std::size_t n = buffer.size();
  if (n < static_cast<std::size_t>(cfg.batch_size)) return {};

  const bool full_batch = static_cast<std::size_t>(cfg.batch_size) >= n;
  const int batch = full_batch ? static_cast<int>(n) : cfg.batch_size;
  const double inv_batch = 1.0 / batch;

  MlpGrads grads = MlpGrads::zeros_like(q_net);
  ForwardCache cache;
  ForwardCache target_cache;
  std::vector<double> out_grad(q_net.spec.output_width(), 0.0);
  double loss = 0.0;

  for (int b = 0; b < batch; ++b) {
    const Transition& tr =
        buffer[full_batch ? static_cast<std::size_t>(b) : rng.uniform_int(n)];
    const std::vector<double>& next_q = mlp_forward(target, tr.next_obs, target_cache);
    const double y = q_target(tr.reward, tr.terminal, next_q, cfg.gamma);
    const std::vector<double>& q = mlp_forward(q_net, tr.obs, cache);
    const int a = static_cast<int>(tr.action);
    const double delta = q[a] - y;
    loss += delta * delta * inv_batch;
    out_grad[a] = 2.0 * delta * inv_batch;
    mlp_backward(q_net, cache, out_grad, grads);
    out_grad[a] = 0.0;
  }

  adam_update(q_net, grads, adam);
  return {true, loss};
}

double dqn_loss(const MlpParams& q_net, const MlpParams& target,
                const ReplayBuffer& buffer, double gamma) {
  ForwardCache cache;
  ForwardCache target_cache;
  double loss = 0.0;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const Transition& tr = buffer[i];
    const std::vector<double>& next_q = mlp_forward(target, tr.next_obs, target_cache);
    const double y = q_target(tr.reward, tr.terminal, next_q, gamma);
    const std::vector<double>& q = mlp_forward(q_net, tr.obs, cache);
    const double delta = q[static_cast<int>(tr.action)] - y;
    loss += delta * delta;
  }
  return buffer.size() ? loss / static_cast<double>(buffer.size()) : 0.0;
}

}  // namespace selfish
