#pragma once

#include <cstdint>
#include <functional>

#include "selfish/policies.hpp"
#include "selfish/world.hpp"

namespace selfish {

struct EvalEpisode {
  long length = 0;  // steps until the tracked agent was caught, capped
  long total_catches = 0;  // catch events across all agents
  bool tracked_caught = false;
};

// Fires once for the initial state (events null), then once per step.
using FrameCallback = std::function<void(const WorldState&, const StepEvents*)>;

// One evaluation episode with every agent playing `policy`. Survival is
// scored for agent 0: the episode ends when it is caught or after
// cfg.max_episode_steps steps. Other agents respawn and keep playing.
EvalEpisode run_episode(const WorldConfig& cfg, const PolicyKind& policy,
                        std::uint64_t seed, const FrameCallback& on_frame = {});

}  // namespace selfish
