#include "selfish/ddpg.hpp"

#include <cmath>
#include <stdexcept>

#include "selfish/geometry.hpp"

namespace selfish {

void DdpgConfig::validate() const {
  if (training_steps < 1) throw std::invalid_argument("ddpg: training_steps must be >= 1");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("ddpg: gamma must lie in [0, 1]");
  if (learning_rate <= 0.0) throw std::invalid_argument("ddpg: learning_rate must be > 0");
  if (buffer_size < 1) throw std::invalid_argument("ddpg: buffer_size must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("ddpg: batch_size must be >= 1");
  if (ou_theta < 0.0 || ou_theta > 1.0)
    throw std::invalid_argument("ddpg: ou_theta must lie in [0, 1]");
  if (ou_sigma < 0.0) throw std::invalid_argument("ddpg: ou_sigma must be >= 0");
  if (observable_neighbors < 0)
    throw std::invalid_argument("ddpg: observable_neighbors must be >= 0");
  if (actor_hidden_layers < 1 || critic_hidden_layers < 1)
    throw std::invalid_argument("ddpg: hidden layer counts must be >= 1");
  if (actor_hidden_width < 1 || critic_hidden_width < 1)
    throw std::invalid_argument("ddpg: hidden widths must be >= 1");
  if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("ddpg: tau must lie in (0, 1]");
  if (warmup_steps < 0) throw std::invalid_argument("ddpg: warmup_steps must be >= 0");
  if (noise_scale_deg < 0.0)
    throw std::invalid_argument("ddpg: noise_scale_deg must be >= 0");
  if (checkpoint_interval_episodes < 0)
    throw std::invalid_argument("ddpg: checkpoint_interval_episodes must be >= 0");
}

DdpgNets make_ddpg_nets(int obs_width, const DdpgConfig& cfg, SplitMix64& rng) {
  DdpgNets nets;
  const MlpSpec actor_spec =
      MlpSpec::make(obs_width, cfg.actor_hidden_layers, cfg.actor_hidden_width, 1);
  const MlpSpec critic_spec = MlpSpec::make(
      obs_width + 1, cfg.critic_hidden_layers, cfg.critic_hidden_width, 1);
  nets.actor = init_params(actor_spec, rng);
  nets.critic = init_params(critic_spec, rng);
  nets.target_actor = nets.actor;
  nets.target_critic = nets.critic;
  nets.actor_adam = AdamState::make(nets.actor, cfg.learning_rate);
  nets.critic_adam = AdamState::make(nets.critic, cfg.learning_rate);
  return nets;
}

void ddpg_actor_update(MlpParams& actor, AdamState& adam,
                       std::span<const std::vector<double>* const> obs_batch,
                       const ActionGradFn& dq_da) {
  MlpGrads grads = MlpGrads::zeros_like(actor);
  ForwardCache cache;
  const double inv_batch = 1.0 / static_cast<double>(obs_batch.size());
  std::vector<double> out_grad(1);

  for (const std::vector<double>* obs : obs_batch) {
    const double a = mlp_forward(actor, *obs, cache)[0];
    // descent on -Q  <=>  ascent on Q
    out_grad[0] = -dq_da(*obs, a) * inv_batch;
    mlp_backward(actor, cache, out_grad, grads);
  }
  adam_update(actor, grads, adam);
}

DdpgStepResult ddpg_train_step(DdpgNets& nets, const ReplayBuffer& buffer,
                               const DdpgConfig& cfg, SplitMix64& rng) {
  const std::size_t n = buffer.size();
  if (n < static_cast<std::size_t>(cfg.batch_size)) return {};

  const bool full_batch = static_cast<std::size_t>(cfg.batch_size) >= n;
  const int batch = full_batch ? static_cast<int>(n) : cfg.batch_size;
  const double inv_batch = 1.0 / batch;

  std::vector<const Transition*> sample(batch);
  for (int b = 0; b < batch; ++b)
    sample[b] =
        &buffer[full_batch ? static_cast<std::size_t>(b) : rng.uniform_int(n)];

  // Critic regression.
  MlpGrads critic_grads = MlpGrads::zeros_like(nets.critic);
  ForwardCache cache;
  ForwardCache aux_cache;
  std::vector<double> critic_in;
  std::vector<double> out_grad(1);
  double loss = 0.0;

  auto fill_critic_in = [&](std::span<const double> obs, double action_deg) {
    critic_in.assign(obs.begin(), obs.end());
    critic_in.push_back(action_deg / kCriticActionScale);
  };

  for (const Transition* tr : sample) {
    double y = tr->reward;
    if (!tr->terminal) {
      const double next_a = mlp_forward(nets.target_actor, tr->next_obs, aux_cache)[0];
      fill_critic_in(tr->next_obs, next_a);
      y += cfg.gamma * mlp_forward(nets.target_critic, critic_in, aux_cache)[0];
    }
    fill_critic_in(tr->obs, tr->action);
    const double q = mlp_forward(nets.critic, critic_in, cache)[0];
    const double delta = q - y;
    loss += delta * delta * inv_batch;
    out_grad[0] = 2.0 * delta * inv_batch;
    mlp_backward(nets.critic, cache, out_grad, critic_grads);
  }
  adam_update(nets.critic, critic_grads, nets.critic_adam);

  // Actor ascent along the critic's action gradient.
  std::vector<const std::vector<double>*> obs_batch(batch);
  for (int b = 0; b < batch; ++b) obs_batch[b] = &sample[b]->obs;

  MlpGrads scratch = MlpGrads::zeros_like(nets.critic);
  std::vector<double> input_grad;
  ActionGradFn dq_da = [&](std::span<const double> obs, double a) {
    fill_critic_in(obs, a);
    mlp_forward(nets.critic, critic_in, cache);
    scratch.set_zero();
    out_grad[0] = 1.0;
    mlp_backward(nets.critic, cache, out_grad, scratch, &input_grad);
    return input_grad.back() / kCriticActionScale;
  };
  ddpg_actor_update(nets.actor, nets.actor_adam, obs_batch, dq_da);

  soft_update(nets.target_actor, nets.actor, cfg.tau);
  soft_update(nets.target_critic, nets.critic, cfg.tau);
  return {true, loss};
}

}  // namespace selfish
