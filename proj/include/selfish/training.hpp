#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "selfish/ddpg.hpp"
#include "selfish/dqn.hpp"
#include "selfish/world.hpp"

namespace selfish {

struct EpisodeRecord {
  long episode = 0;
  long length = 0;
  double ret = 0.0;            // accumulated learner reward
  double explore_param = 0.0;  // epsilon (DQN) or OU sigma (DDPG)
  long wall_steps = 0;         // environment steps completed so far
};

struct TrainRun {
  std::string algo;  // "dqn" or "ddpg"
  std::uint64_t seed = 0;
  int observable_neighbors = 0;
  std::vector<EpisodeRecord> episodes;
  MlpParams policy;         // final learner network (Q-net or actor)
  MlpParams copied_policy;  // parameters the non-learners ended up playing
  std::vector<long> checkpoint_episodes;
};

// Called every checkpoint interval and once for the final policy.
using CheckpointFn = std::function<void(long episode, const MlpParams& policy)>;

// Thrown when the loss or the parameters stop being finite. The run's
// last-good policy has already been handed to the checkpoint callback.
struct TrainingDiverged : std::runtime_error {
  explicit TrainingDiverged(const std::string& what) : std::runtime_error(what) {}
};

// Single-learner protocol: agent 0 learns while every other agent plays the
// policy copied at the last episode boundary (the initial network before the
// first copy). An episode ends when the learner is caught or after
// max_episode_steps; the world itself is never reset, the replay buffer
// persists, and the learner's parameters are copied to the others at every
// episode boundary. Runs exactly cfg.training_steps environment steps.
TrainRun run_training_dqn(const WorldConfig& world_cfg, const DqnConfig& cfg,
                          std::uint64_t seed, const CheckpointFn& on_checkpoint = {});

TrainRun run_training_ddpg(const WorldConfig& world_cfg, const DdpgConfig& cfg,
                           std::uint64_t seed, const CheckpointFn& on_checkpoint = {});

}  // namespace selfish
