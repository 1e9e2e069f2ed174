#include "selfish/eval.hpp"

#include <stdexcept>
#include <vector>

namespace selfish {

EvalEpisode run_episode(const WorldConfig& cfg, const PolicyKind& policy,
                        std::uint64_t seed, const FrameCallback& on_frame) {
  cfg.validate();
  if (cfg.num_agents < policy_observation_neighbors(policy) + 1)
    throw std::invalid_argument(
        "run_episode: num-agents must be at least observable-neighbors + 1");

  SplitMix64 rng(seed);
  WorldState world = init_world(cfg, rng.next_u64());
  SplitMix64 policy_rng = rng.split();

  if (on_frame) on_frame(world, nullptr);

  EvalEpisode ep;
  std::vector<double> actions(cfg.num_agents, 0.0);
  for (long t = 0; t < cfg.max_episode_steps; ++t) {
    for (int i = 0; i < cfg.num_agents; ++i)
      actions[i] = policy_action(policy, world, i, cfg, policy_rng);
    const StepEvents events = step_world(world, actions, cfg);
    ep.total_catches += static_cast<long>(events.caught.size());
    ep.length = t + 1;
    if (on_frame) on_frame(world, &events);
    for (int id : events.caught)
      if (id == 0) ep.tracked_caught = true;
    if (ep.tracked_caught) break;
  }
  return ep;
}

}  // namespace selfish
