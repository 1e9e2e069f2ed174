#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfish/config.hpp"

namespace selfish {

// Shared plumbing for the CLI verbs. Each returns a process exit code and
// reports problems on stderr rather than throwing across main().

struct CommonOptions {
  std::string config_path;  // empty: defaults only
  std::optional<std::uint64_t> seed;  // overrides rng_seed and the seeds list
  std::string out_dir = "out";
};

// Loads the config file (if any), applies SELFISH_* environment overrides,
// then the --seed override. Throws on any config problem.
RunConfig load_config_for(const CommonOptions& common);

// Trains per the config's algo, writing checkpoints, the final model,
// training_curve.csv, and manifest.txt into out_dir. Exit 2 on divergence.
int cmd_train(const CommonOptions& common);

struct EvalOptions {
  bool write_trajectories = true;
};

// Runs episodes for every seed in the config, writing per-episode trajectory
// CSVs plus episodes.csv and manifest.txt.
int cmd_eval(const CommonOptions& common, const EvalOptions& opt);

struct AnalyzeOptions {
  std::vector<std::string> trajectories;
  double dbscan_eps = 4.0;
  int dbscan_min_pts = 3;
  double kde_bandwidth = 2.0;
  int frame_stride = 1;
  std::string out_dir = "out";
};

// Emits the six figure CSVs from the given trajectory files.
int cmd_analyze(const AnalyzeOptions& opt);

struct RenderOptions2 {
  std::string trajectory;
  std::string out_dir = "out";
  int pixels_per_unit = 8;
  bool kde_layer = false;
  double kde_bandwidth = 2.0;
  double agent_radius = 1.0;
};

// One PPM per frame, frame_NNNNNN.ppm.
int cmd_render(const RenderOptions2& opt);

struct SweepOptions {
  int jobs = 1;
};

// Grid sweep. Axes come from sweep_<key> entries in the config file, whose
// comma-separated values expand over the base config. sweep_mode=eval scores
// the configured policy directly; sweep_mode=train trains per cell first.
// Writes sweep.csv (ranked by mean episode length) and best_config.cfg.
int cmd_sweep(const CommonOptions& common, const SweepOptions& opt);

}  // namespace selfish
