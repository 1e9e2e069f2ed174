#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "selfish/world.hpp"

namespace selfish {

// Trajectory CSV. Provenance comments, then a header row, then one row per
// entity per frame:
//
//   # edge_length=40
//   # seed=7
//   # config_hash=9e3779b97f4a7c15
//   # policy=turnaway
//   frame,kind,id,x,y,orientation_deg,caught_flag
//   0,prey,0,12.5,3.25,90,0
//   ...
//   0,predator,0,20,20,0,0
//
// On a catch frame the caught prey's row carries the position of death
// (pre-respawn) with caught_flag=1; the respawned position first shows up,
// moved once, in the next frame.

struct TrajectoryHeader {
  double edge_length = 40.0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string policy;
};

class TrajectoryWriter {
 public:
  TrajectoryWriter(std::ostream& out, const TrajectoryHeader& header);

  // One row per prey plus the predator row. Pass the step's events so caught
  // rows log the death position; pass nullptr for the initial frame.
  void write_frame(const WorldState& state, const StepEvents* events);

 private:
  std::ostream& out_;
};

struct TrajectoryRow {
  long frame = 0;
  bool predator = false;
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double orientation_deg = 0.0;
  bool caught = false;
};

struct Trajectory {
  TrajectoryHeader header;
  std::vector<TrajectoryRow> rows;

  // Dense per-frame views, filled by read_trajectory. Frames are validated
  // to be contiguous from 0 with every agent and the predator present.
  int num_agents = 0;
  long num_frames = 0;
  std::vector<std::vector<Vec2>> prey_pos;       // [frame][agent]
  std::vector<std::vector<double>> prey_orient;  // [frame][agent]
  std::vector<Vec2> predator_pos;                // [frame]
  std::vector<std::pair<long, int>> catches;     // (frame, agent), frame order
};

// Throws std::runtime_error naming the offending line on any malformed or
// inconsistent input.
Trajectory read_trajectory(const std::string& path);

}  // namespace selfish
