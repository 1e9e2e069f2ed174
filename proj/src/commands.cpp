#include "selfish/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "selfish/analysis.hpp"
#include "selfish/eval.hpp"
#include "selfish/model_io.hpp"
#include "selfish/render.hpp"
#include "selfish/trajectory.hpp"
#include "selfish/training.hpp"

namespace fs = std::filesystem;

namespace selfish {

namespace {

std::string fmt_hash(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

// manifest.txt doubles as a loadable config: comments carry the provenance,
// the body is the canonical key=value text.
void write_manifest(const fs::path& dir, const RunConfig& rc,
                    const std::string& command) {
  const FlatConfig canon = to_flat_config(rc);
  std::ofstream out = open_out(dir / "manifest.txt");
  out << "# command=" << command << "\n"
      << "# config_hash=" << fmt_hash(canon.hash()) << "\n"
      << "# seed=" << rc.world.rng_seed << "\n"
      << canon.canonical_text();
}

std::string algo_tag(const std::string& algo) {
  return algo == "ddpg" ? "ddpg_actor" : "dqn";
}

PolicyKind make_policy(const RunConfig& rc) {
  if (rc.policy == "boids") return rc.boids;
  if (rc.policy == "turnaway") return TurnAwayPolicy{};
  if (rc.policy == "random") return RandomPolicy{};
  if (rc.model_path.empty())
    throw std::invalid_argument("policy '" + rc.policy + "' needs model=<path>");
  ModelFile m = load_model(rc.model_path);
  const int obs_width = 3 * (m.observation_neighbors + 2);
  if (m.params.spec.input_width() != obs_width)
    throw std::runtime_error("model file " + rc.model_path +
                             ": input width does not match neighbor count");
  if (rc.policy == "dqn") {
    if (m.algo != "dqn")
      throw std::runtime_error("model file " + rc.model_path + ": algo tag '" +
                               m.algo + "', expected dqn");
    if (m.params.spec.output_width() != static_cast<int>(kDiscreteActionsDeg.size()))
      throw std::runtime_error("model file " + rc.model_path + ": bad output width");
    return DqnPolicy{std::move(m.params), m.observation_neighbors};
  }
  if (m.algo != "ddpg_actor")
    throw std::runtime_error("model file " + rc.model_path + ": algo tag '" + m.algo +
                             "', expected ddpg_actor");
  if (m.params.spec.output_width() != 1)
    throw std::runtime_error("model file " + rc.model_path + ": bad output width");
  return DdpgPolicy{std::move(m.params), m.observation_neighbors};
}

}  // namespace

RunConfig load_config_for(const CommonOptions& common) {
  FlatConfig cfg;
  if (!common.config_path.empty()) cfg = FlatConfig::load(common.config_path);
  cfg.apply_env_overrides();
  if (common.seed) {
    cfg.set("rng_seed", std::to_string(*common.seed));
    cfg.set("seeds", std::to_string(*common.seed));
  }
  return load_run_config(cfg);
}

int cmd_train(const CommonOptions& common) {
  RunConfig rc;
  try {
    rc = load_config_for(common);
  } catch (const std::exception& e) {
    std::cerr << "train: " << e.what() << "\n";
    return 1;
  }
  const fs::path out = common.out_dir;
  fs::create_directories(out);
  const FlatConfig canon = to_flat_config(rc);
  const std::uint64_t hash = canon.hash();
  const std::uint64_t seed = rc.world.rng_seed;
  const std::string tag = algo_tag(rc.algo);
  const int neighbors = rc.algo == "dqn" ? rc.dqn.observable_neighbors
                                         : rc.ddpg.observable_neighbors;

  const CheckpointFn checkpoint = [&](long episode, const MlpParams& params) {
    ModelFile m;
    m.algo = tag;
    m.observation_neighbors = neighbors;
    m.seed = seed;
    m.config_hash = hash;
    m.params = params;
    m.config_snapshot = canon.canonical_text();
    const fs::path path =
        episode < 0 ? out / "final.model"
                    : out / ("checkpoint_ep" + std::to_string(episode) + ".model");
    save_model(path.string(), m);
  };

  write_manifest(out, rc, "train");
  TrainRun run;
  bool diverged = false;
  try {
    run = rc.algo == "dqn" ? run_training_dqn(rc.world, rc.dqn, seed, checkpoint)
                           : run_training_ddpg(rc.world, rc.ddpg, seed, checkpoint);
  } catch (const TrainingDiverged& e) {
    std::cerr << "train: diverged: " << e.what()
              << " (last good parameters saved)\n";
    diverged = true;
  } catch (const std::exception& e) {
    std::cerr << "train: " << e.what() << "\n";
    return 1;
  }

  std::ofstream curve = open_out(out / "training_curve.csv");
  curve << "# config_hash=" << fmt_hash(hash) << "\n# seed=" << seed << "\n"
        << "episode,length,return,epsilon_or_noise_sigma,wall_steps\n";
  for (const EpisodeRecord& ep : run.episodes)
    curve << ep.episode << ',' << ep.length << ',' << fmt_g(ep.ret) << ','
          << fmt_g(ep.explore_param) << ',' << ep.wall_steps << "\n";
  if (diverged) return 2;
  std::cout << "trained " << run.episodes.size() << " episodes -> "
            << (out / "final.model").string() << "\n";
  return 0;
}

int cmd_eval(const CommonOptions& common, const EvalOptions& opt) {
  RunConfig rc;
  PolicyKind policy;
  try {
    rc = load_config_for(common);
    policy = make_policy(rc);
    if (rc.world.num_agents < policy_observation_neighbors(policy) + 1)
      throw std::invalid_argument("num_agents must be at least observable neighbors + 1");
  } catch (const std::exception& e) {
    std::cerr << "eval: " << e.what() << "\n";
    return 1;
  }
  const fs::path out = common.out_dir;
  fs::create_directories(out);
  write_manifest(out, rc, "eval");
  const FlatConfig canon = to_flat_config(rc);
  const std::uint64_t hash = canon.hash();

  std::ofstream summary = open_out(out / "episodes.csv");
  summary << "# config_hash=" << fmt_hash(hash) << "\n"
          << "seed,episode,length,total_catches,tracked_caught\n";

  try {
    for (std::uint64_t seed : rc.seeds) {
      SplitMix64 seq(seed);
      for (long e = 0; e < rc.episodes; ++e) {
        const std::uint64_t ep_seed = seq.next_u64();
        EvalEpisode episode;
        if (opt.write_trajectories) {
          char name[64];
          std::snprintf(name, sizeof name, "traj_s%" PRIu64 "_e%ld.csv", seed, e);
          std::ofstream traj_out = open_out(out / name);
          TrajectoryWriter writer(traj_out,
                                  {rc.world.edge_length, ep_seed, hash, rc.policy});
          episode = run_episode(rc.world, policy, ep_seed,
                                [&](const WorldState& s, const StepEvents* ev) {
                                  writer.write_frame(s, ev);
                                });
        } else {
          episode = run_episode(rc.world, policy, ep_seed);
        }
        summary << seed << ',' << e << ',' << episode.length << ','
                << episode.total_catches << ',' << (episode.tracked_caught ? 1 : 0)
                << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "eval: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_analyze(const AnalyzeOptions& opt) {
  const fs::path out = opt.out_dir;
  try {
    fs::create_directories(out);
    std::ofstream fig4 = open_out(out / "fig4_angle_deviation.csv");
    std::ofstream fig5 = open_out(out / "fig5_cluster_sizes.csv");
    std::ofstream fig7 = open_out(out / "fig7_pairwise.csv");
    std::ofstream fig8 = open_out(out / "fig8_episode_length.csv");
    std::ofstream fig9 = open_out(out / "fig9_caught_per_frame.csv");
    std::ofstream fig10 = open_out(out / "fig10_density.csv");
    const std::string flags =
        "# dbscan_eps=" + fmt_g(opt.dbscan_eps) +
        " dbscan_min_pts=" + std::to_string(opt.dbscan_min_pts) +
        " kde_bandwidth=" + fmt_g(opt.kde_bandwidth) +
        " frame_stride=" + std::to_string(opt.frame_stride) + "\n";
    for (std::ofstream* f : {&fig4, &fig5, &fig7, &fig8, &fig9, &fig10}) *f << flags;
    fig4 << "trajectory,frame,global_deviation_deg,degenerate,mean_cluster_deviation_deg\n";
    fig5 << "trajectory,rank,mean_size,frames_with_rank\n";
    fig7 << "trajectory,frame,global_pairwise,mean_cluster_pairwise,"
            "pooled_intra_cluster_pairwise,num_clusters,noise_count\n";
    fig8 << "trajectory,episode_length,total_catches\n";
    fig9 << "trajectory,episode_length,total_catches,caught_per_frame,included\n";
    fig10 << "index,steps_before_death,mean_density,deaths_used,deaths_skipped\n";

    std::vector<double> pooled_trace(kDeathTraceLen, 0.0);
    long pooled_deaths = 0, pooled_skipped = 0;

    for (const std::string& path : opt.trajectories) {
      const Trajectory t = read_trajectory(path);
      const std::string name = fs::path(path).filename().string();
      for (std::ofstream* f : {&fig4, &fig5, &fig7, &fig8, &fig9, &fig10})
        *f << "# source=" << name << " seed=" << t.header.seed
           << " config_hash=" << fmt_hash(t.header.config_hash) << "\n";
      if (t.num_frames == 0) continue;

      const long episode_length = t.num_frames - 1;  // steps, frame 0 is initial
      const long total_catches = static_cast<long>(t.catches.size());
      fig8 << name << ',' << episode_length << ',' << total_catches << "\n";
      const double rate = caught_per_frame(total_catches, episode_length);
      fig9 << name << ',' << episode_length << ',' << total_catches << ','
           << fmt_g(rate) << ',' << (std::isnan(rate) ? 0 : 1) << "\n";

      std::vector<std::vector<int>> frame_sizes;
      std::vector<int> frame_noise;
      for (long f = 0; f < t.num_frames; f += opt.frame_stride) {
        const FrameMetrics m =
            compute_frame_metrics(t.prey_pos[f], t.prey_orient[f],
                                  t.header.edge_length, opt.dbscan_eps,
                                  opt.dbscan_min_pts);
        fig4 << name << ',' << f << ',' << fmt_g(m.global_angle.mean_abs_deg) << ','
             << (m.global_angle.degenerate ? 1 : 0) << ','
             << fmt_g(m.mean_cluster_angle_dev) << "\n";
        fig7 << name << ',' << f << ',' << fmt_g(m.global_pairwise) << ','
             << fmt_g(m.mean_cluster_pairwise) << ','
             << fmt_g(m.pooled_intra_pairwise) << ','
             << m.cluster_sizes.size() << ',' << m.noise_count << "\n";
        frame_sizes.push_back(m.cluster_sizes);
        frame_noise.push_back(m.noise_count);
      }
      const ClusterSizeTable table = cluster_size_table(frame_sizes, frame_noise);
      for (size_t r = 0; r < table.mean_sizes.size(); ++r)
        fig5 << name << ',' << r << ',' << fmt_g(table.mean_sizes[r]) << ','
             << table.rank_frames[r] << "\n";
      fig5 << name << ",noise," << fmt_g(table.mean_noise) << ',' << table.frames
           << "\n";

      const DeathTraceResult dt = density_before_death(
          t.prey_pos, t.catches, opt.kde_bandwidth, t.header.edge_length);
      if (dt.deaths_used > 0)
        for (long k = 0; k < kDeathTraceLen; ++k)
          pooled_trace[k] += dt.mean_trace[k] * static_cast<double>(dt.deaths_used);
      pooled_deaths += dt.deaths_used;
      pooled_skipped += dt.deaths_skipped;
    }

    for (long k = 0; k < kDeathTraceLen; ++k) {
      const double v = pooled_deaths > 0
                           ? pooled_trace[k] / static_cast<double>(pooled_deaths)
                           : std::numeric_limits<double>::quiet_NaN();
      fig10 << k << ',' << (kDeathTraceLen - 1 - k) << ',' << fmt_g(v) << ','
            << pooled_deaths << ',' << pooled_skipped << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "analyze: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_render(const RenderOptions2& opt) {
  try {
    const Trajectory t = read_trajectory(opt.trajectory);
    fs::create_directories(opt.out_dir);
    RenderOptions ro;
    ro.pixels_per_unit = opt.pixels_per_unit;
    ro.kde_layer = opt.kde_layer;
    ro.kde_bandwidth = opt.kde_bandwidth;
    for (long f = 0; f < t.num_frames; ++f) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%06ld.ppm", f);
      render_frame_ppm((fs::path(opt.out_dir) / name).string(), t.prey_pos[f],
                       t.predator_pos[f], t.header.edge_length, opt.agent_radius,
                       ro);
    }
    std::cout << "rendered " << t.num_frames << " frames\n";
  } catch (const std::exception& e) {
    std::cerr << "render: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

namespace {

struct SweepCell {
  long index = 0;
  std::vector<std::pair<std::string, std::string>> assignment;  // axis -> value
  double mean_length = std::numeric_limits<double>::quiet_NaN();
  long episodes_run = 0;
  long failures = 0;
  std::string status = "ok";
  std::string config_text;  // canonical, for best_config.cfg
};

// Mean episode length of the cell's policy; trains first in train mode.
void run_sweep_cell(SweepCell& cell, const FlatConfig& cfg, const std::string& mode) {
  try {
    const RunConfig rc = load_run_config(cfg);
    cell.config_text = to_flat_config(rc).canonical_text();
    double sum = 0.0;
    long count = 0;
    for (const std::uint64_t seed : rc.seeds) {
      PolicyKind policy;
      try {
        if (mode == "train") {
          if (rc.algo == "dqn") {
            const TrainRun run = run_training_dqn(rc.world, rc.dqn, seed);
            policy = DqnPolicy{run.policy, rc.dqn.observable_neighbors};
          } else {
            const TrainRun run = run_training_ddpg(rc.world, rc.ddpg, seed);
            policy = DdpgPolicy{run.policy, rc.ddpg.observable_neighbors};
          }
        } else {
          policy = make_policy(rc);
        }
      } catch (const std::exception&) {
        ++cell.failures;
        continue;
      }
      SplitMix64 seq(seed);
      for (long e = 0; e < rc.episodes; ++e) {
        const std::uint64_t ep_seed = seq.next_u64();
        try {
          const EvalEpisode ep = run_episode(rc.world, policy, ep_seed);
          sum += static_cast<double>(ep.length);
          ++count;
        } catch (const std::exception&) {
          ++cell.failures;
        }
      }
    }
    cell.episodes_run = count;
    if (count > 0) cell.mean_length = sum / static_cast<double>(count);
    if (cell.failures > 0) cell.status = "partial";
    if (count == 0) cell.status = "failed";
  } catch (const std::exception& e) {
    cell.status = std::string("error: ") + e.what();
  }
}

}  // namespace

int cmd_sweep(const CommonOptions& common, const SweepOptions& opt) {
  FlatConfig raw;
  try {
    if (!common.config_path.empty()) raw = FlatConfig::load(common.config_path);
    raw.apply_env_overrides();
  } catch (const std::exception& e) {
    std::cerr << "sweep: " << e.what() << "\n";
    return 1;
  }

  std::map<std::string, std::string> base;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  std::string mode = "eval";
  for (const auto& [key, value] : raw.entries()) {
    if (key == "sweep_mode") {
      mode = value;
      continue;
    }
    if (key.rfind("sweep_", 0) == 0) {
      std::vector<std::string> values;
      std::istringstream in(value);
      std::string item;
      while (std::getline(in, item, ',')) values.push_back(item);
      if (values.empty()) {
        std::cerr << "sweep: axis " << key << " has no values\n";
        return 1;
      }
      axes.emplace_back(key.substr(6), std::move(values));
      continue;
    }
    base[key] = value;
  }
  if (mode != "eval" && mode != "train") {
    std::cerr << "sweep: sweep_mode must be eval or train\n";
    return 1;
  }

  long total = 1;
  for (const auto& [k, values] : axes) total *= static_cast<long>(values.size());

  std::vector<SweepCell> cells(total);
  std::vector<FlatConfig> cell_cfgs(total);
  for (long i = 0; i < total; ++i) {
    cells[i].index = i;
    FlatConfig cfg;
    for (const auto& [k, v] : base) cfg.set(k, v);
    long rem = i;
    for (const auto& [k, values] : axes) {
      const std::string& v = values[rem % values.size()];
      rem /= static_cast<long>(values.size());
      cfg.set(k, v);
      cells[i].assignment.emplace_back(k, v);
    }
    if (common.seed) {
      cfg.set("rng_seed", std::to_string(*common.seed));
      cfg.set("seeds", std::to_string(*common.seed));
    }
    cell_cfgs[i] = std::move(cfg);
  }

  const int jobs = std::max(1, opt.jobs);
  std::atomic<long> next{0};
  auto worker = [&] {
    while (true) {
      const long i = next.fetch_add(1);
      if (i >= total) return;
      run_sweep_cell(cells[i], cell_cfgs[i], mode);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  const fs::path out = common.out_dir;
  try {
    fs::create_directories(out);
    std::vector<long> order(total);
    for (long i = 0; i < total; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](long a, long b) {
      const double va = cells[a].mean_length, vb = cells[b].mean_length;
      const bool na = std::isnan(va), nb = std::isnan(vb);
      if (na != nb) return nb;  // defined objectives first
      if (!na && va != vb) return va > vb;
      return a < b;
    });

    std::ofstream csv = open_out(out / "sweep.csv");
    csv << "# mode=" << mode << " cells=" << total << "\n";
    csv << "cell";
    for (const auto& [k, values] : axes) csv << ',' << k;
    csv << ",mean_episode_length,episodes,failures,status\n";
    for (long i : order) {
      const SweepCell& c = cells[i];
      csv << c.index;
      for (const auto& [k, v] : c.assignment) csv << ',' << v;
      csv << ',' << fmt_g(c.mean_length) << ',' << c.episodes_run << ','
          << c.failures << ',' << c.status << "\n";
    }

    const SweepCell& best = cells[order.front()];
    if (!std::isnan(best.mean_length)) {
      std::ofstream bc = open_out(out / "best_config.cfg");
      bc << "# mean_episode_length=" << fmt_g(best.mean_length) << "\n"
         << best.config_text;
    } else {
      std::cerr << "sweep: no cell produced a defined objective\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "sweep: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace selfish
