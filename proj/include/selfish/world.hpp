#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "selfish/geometry.hpp"
#include "selfish/rng.hpp"

namespace selfish {

struct WorldConfig {
  double edge_length = 40.0;
  double agent_radius = 1.0;
  double catch_distance = 2.0;  // must equal 2 * agent_radius
  int num_agents = 10;
  double agent_speed = 0.5;
  double predator_speed = 0.5;
  double predator_max_turn_deg = 45.0;
  double distraction_radius = 8.0;
  int lock_duration = 30;
  double leap_speed_factor = 2.0;
  int leap_duration = 10;
  int leap_cooldown = 50;
  long max_episode_steps = 10000;
  std::uint64_t rng_seed = 1;
  bool pinned_predator = false;  // predator never moves; still observed, still catches
  double prey_max_turn_deg = 0.0;  // 0: prey turns unclamped; >0: per-frame clamp (ablation)

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

struct AgentState {
  int id = 0;
  Vec2 pos;
  double orientation_deg = 0.0;  // [0, 360)
  long alive_steps = 0;
};

struct PredatorState {
  Vec2 pos;
  double orientation_deg = 0.0;
  int target_id = -1;  // -1: no target
  int lock_remaining = 0;
  int leap_remaining = 0;
  int leap_cooldown_remaining = 0;
};

struct CatchEvent {
  int id = 0;
  Vec2 death_pos;  // where the agent was caught, before respawn
  double death_orientation_deg = 0.0;
  Vec2 respawn_pos;
};

struct StepEvents {
  std::vector<int> caught;  // ids, same order as catches
  std::vector<CatchEvent> catches;
};

struct WorldState {
  std::vector<AgentState> agents;
  PredatorState predator;
  long frame = 0;
  SplitMix64 rng{1};
};

// The (n+2)x3 observation matrix, flattened row-major. Row 0 is the predator,
// row 1 is the observer itself, rows 2..n+1 the n nearest neighbors in
// non-decreasing distance order. All entries lie in [0, 1].
struct Observation {
  int neighbors = 0;
  std::vector<double> values;

  int rows() const { return neighbors + 2; }
  double operator()(int row, int col) const { return values[3 * row + col]; }
};

// Uniform random placement of all agents and the predator. Draw order: per
// agent (x, y, orientation) in id order, then the predator.
WorldState init_world(const WorldConfig& cfg, std::uint64_t seed);

// One predator decision + move. Keeps a locked, living target; otherwise
// picks uniformly among agents within the distraction radius (single rng
// draw), falling back to the closest agent. Turning is clamped to
// +/- predator_max_turn_deg; speed is multiplied by leap_speed_factor while a
// leap is active. Leaps recur on a fixed cooldown that only counts down
// between leaps.
PredatorState predator_step(const WorldState& state, const WorldConfig& cfg,
                            SplitMix64& rng);

// Advances one frame: every agent turns by its action and moves on the stale
// state, then the predator moves, then catches are resolved. A caught agent
// respawns the same frame at a uniform position with a fresh uniform
// orientation (draws x, y, orientation in agent index order). Throws
// std::invalid_argument if the action count does not match the population.
StepEvents step_world(WorldState& state, std::span<const double> actions_deg,
                      const WorldConfig& cfg);

// Distances are normalized by the maximal torus distance L*sqrt(2)/2,
// relative directions affinely from (-180, 180] to (0, 1], orientations from
// [0, 360) to [0, 1). The self row is literally (0, 0, orientation/360).
Observation build_observation(const WorldState& state, int agent_id, int n,
                              const WorldConfig& cfg);

// +1 for surviving the frame, -1000 when caught.
double reward_for(int agent_id, const StepEvents& events);

}  // namespace selfish
