#include "selfish/training.hpp"

#include <cmath>
#include <stdexcept>

#include "selfish/policies.hpp"

namespace selfish {

namespace {

void check_population(const WorldConfig& world_cfg, int neighbors) {
  if (world_cfg.num_agents < neighbors + 1)
    throw std::invalid_argument(
        "training: num-agents must be at least observable-neighbors + 1");
}

struct EpisodeTracker {
  long episode = 0;
  long length = 0;
  double ret = 0.0;

  void step(double reward) {
    ++length;
    ret += reward;
  }
  void reset() {
    ++episode;
    length = 0;
    ret = 0.0;
  }
};

bool learner_caught(const StepEvents& events) {
  for (int id : events.caught)
    if (id == 0) return true;
  return false;
}

}  // namespace

TrainRun run_training_dqn(const WorldConfig& world_cfg, const DqnConfig& cfg,
                          std::uint64_t seed, const CheckpointFn& on_checkpoint) {
  world_cfg.validate();
  check_population(world_cfg, cfg.observable_neighbors);

  SplitMix64 master(seed);
  SplitMix64 train_rng = master.split();
  WorldState world = init_world(world_cfg, master.split().next_u64());

  const int n = cfg.observable_neighbors;
  const int obs_width = 3 * (n + 2);
  const MlpSpec spec = MlpSpec::make(obs_width, cfg.hidden_layers, cfg.hidden_width,
                                     static_cast<int>(kDiscreteActionsDeg.size()));
  MlpParams q_net = init_params(spec, train_rng);
  MlpParams target_net = q_net;
  MlpParams shared_policy = q_net;  // what the non-learners play
  MlpParams last_good = q_net;
  AdamState adam = AdamState::make(q_net, cfg.learning_rate);

  ReplayBuffer buffer(cfg.buffer_size);
  TrainRun run;
  run.algo = "dqn";
  run.seed = seed;
  run.observable_neighbors = n;

  EpisodeTracker ep;
  ForwardCache cache;
  std::vector<double> actions(world_cfg.num_agents, 0.0);
  Observation obs = build_observation(world, 0, n, world_cfg);
  long grad_steps = 0;

  for (long step = 0; step < cfg.training_steps; ++step) {
    int action_index;
    if (step < cfg.warmup_steps) {
      action_index = static_cast<int>(train_rng.uniform_int(kDiscreteActionsDeg.size()));
    } else {
      const std::vector<double>& q = mlp_forward(q_net, obs.values, cache);
      for (double v : q)
        if (!std::isfinite(v)) {
          if (on_checkpoint) on_checkpoint(-1, last_good);  // last good becomes final
          throw TrainingDiverged("dqn: Q values became non-finite");
        }
      action_index = epsilon_greedy(q, cfg.epsilon, train_rng);
    }
    actions[0] = kDiscreteActionsDeg[action_index];
    for (int i = 1; i < world_cfg.num_agents; ++i) {
      const Observation other = build_observation(world, i, n, world_cfg);
      actions[i] = dqn_action(other, shared_policy);
    }

    const StepEvents events = step_world(world, actions, world_cfg);
    const double reward = reward_for(0, events);
    const bool terminal = learner_caught(events);
    Observation next_obs = build_observation(world, 0, n, world_cfg);

    buffer.push({obs.values, static_cast<double>(action_index), reward,
                 next_obs.values, terminal});
    obs = std::move(next_obs);

    if (step >= cfg.warmup_steps) {
      const TrainStepResult r = dqn_train_step(
          q_net, cfg.target_update_interval > 0 ? target_net : q_net, buffer, adam,
          cfg, train_rng);
      if (r.applied) {
        if (!std::isfinite(r.loss)) {
          if (on_checkpoint) on_checkpoint(-1, last_good);  // last good becomes final
          throw TrainingDiverged("dqn: loss became non-finite");
        }
        ++grad_steps;
        if (cfg.target_update_interval > 0 &&
            grad_steps % cfg.target_update_interval == 0)
          target_net = q_net;
        if (grad_steps % 1000 == 0 && !q_net.all_finite()) {
          if (on_checkpoint) on_checkpoint(-1, last_good);  // last good becomes final
          throw TrainingDiverged("dqn: parameters became non-finite");
        }
      }
    }

    ep.step(reward);
    if (terminal || ep.length >= world_cfg.max_episode_steps ||
        step + 1 == cfg.training_steps) {
      run.episodes.push_back({ep.episode, ep.length, ep.ret, cfg.epsilon, step + 1});
      shared_policy = q_net;
      last_good = q_net;
      if (on_checkpoint && cfg.checkpoint_interval_episodes > 0 &&
          (ep.episode + 1) % cfg.checkpoint_interval_episodes == 0) {
        on_checkpoint(ep.episode, q_net);
        run.checkpoint_episodes.push_back(ep.episode);
      }
      ep.reset();
    }
  }

  run.policy = q_net;
  run.copied_policy = shared_policy;
  if (on_checkpoint) on_checkpoint(-1, q_net);  // -1: final
  return run;
}

TrainRun run_training_ddpg(const WorldConfig& world_cfg, const DdpgConfig& cfg,
                           std::uint64_t seed, const CheckpointFn& on_checkpoint) {
  world_cfg.validate();
  check_population(world_cfg, cfg.observable_neighbors);

  SplitMix64 master(seed);
  SplitMix64 train_rng = master.split();
  WorldState world = init_world(world_cfg, master.split().next_u64());

  const int n = cfg.observable_neighbors;
  const int obs_width = 3 * (n + 2);
  DdpgNets nets = make_ddpg_nets(obs_width, cfg, train_rng);
  MlpParams shared_policy = nets.actor;
  MlpParams last_good = nets.actor;
  OuNoise noise{cfg.ou_theta, cfg.ou_mu, cfg.ou_sigma, cfg.ou_mu};

  ReplayBuffer buffer(cfg.buffer_size);
  TrainRun run;
  run.algo = "ddpg";
  run.seed = seed;
  run.observable_neighbors = n;

  EpisodeTracker ep;
  ForwardCache cache;
  std::vector<double> actions(world_cfg.num_agents, 0.0);
  Observation obs = build_observation(world, 0, n, world_cfg);

  for (long step = 0; step < cfg.training_steps; ++step) {
    double action_deg;
    if (step < cfg.warmup_steps) {
      action_deg = train_rng.uniform(-180.0, 180.0);
    } else {
      const double raw = mlp_forward(nets.actor, obs.values, cache)[0];
      if (!std::isfinite(raw)) {
        if (on_checkpoint) on_checkpoint(-1, last_good);  // last good becomes final
        throw TrainingDiverged("ddpg: actor output became non-finite");
      }
      action_deg = wrap_angle_signed(raw + cfg.noise_scale_deg * noise.step(train_rng));
    }
    actions[0] = action_deg;
    for (int i = 1; i < world_cfg.num_agents; ++i) {
      const Observation other = build_observation(world, i, n, world_cfg);
      actions[i] = ddpg_action(other, shared_policy);
    }

    const StepEvents events = step_world(world, actions, world_cfg);
    const double reward = reward_for(0, events);
    const bool terminal = learner_caught(events);
    Observation next_obs = build_observation(world, 0, n, world_cfg);

    buffer.push({obs.values, action_deg, reward, next_obs.values, terminal});
    obs = std::move(next_obs);

    if (step >= cfg.warmup_steps) {
      const DdpgStepResult r = ddpg_train_step(nets, buffer, cfg, train_rng);
      if (r.applied && !std::isfinite(r.critic_loss)) {
        if (on_checkpoint) on_checkpoint(-1, last_good);  // last good becomes final
        throw TrainingDiverged("ddpg: critic loss became non-finite");
      }
    }

    ep.step(reward);
    if (terminal || ep.length >= world_cfg.max_episode_steps ||
        step + 1 == cfg.training_steps) {
      run.episodes.push_back({ep.episode, ep.length, ep.ret, cfg.ou_sigma, step + 1});
      shared_policy = nets.actor;
      last_good = nets.actor;
      noise.reset();
      if (on_checkpoint && cfg.checkpoint_interval_episodes > 0 &&
          (ep.episode + 1) % cfg.checkpoint_interval_episodes == 0) {
        on_checkpoint(ep.episode, nets.actor);
        run.checkpoint_episodes.push_back(ep.episode);
      }
      ep.reset();
    }
  }

  run.policy = nets.actor;
  run.copied_policy = shared_policy;
  if (on_checkpoint) on_checkpoint(-1, nets.actor);
  return run;
}

}  // namespace selfish
