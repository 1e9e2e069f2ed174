#include <cstdint>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfish/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"selfish: torus predator-prey swarm simulator and analysis toolkit"};
  app.require_subcommand(1);

  selfish::CommonOptions common;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", common.config_path, "flat key=value config file");
    cmd->add_option("--seed", seed_value, "override rng_seed and the seeds list")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", common.out_dir, "output directory (default: out)");
  };

  CLI::App* train = app.add_subcommand("train", "train a policy, write model + curve");
  add_common(train);

  CLI::App* eval = app.add_subcommand("eval", "run evaluation episodes, log trajectories");
  add_common(eval);
  selfish::EvalOptions eval_opt;
  eval->add_flag("--no-trajectories{false}", eval_opt.write_trajectories,
                 "skip per-episode trajectory CSVs");

  CLI::App* analyze = app.add_subcommand("analyze", "figure CSVs from trajectory logs");
  selfish::AnalyzeOptions an;
  analyze->add_option("trajectories", an.trajectories, "trajectory CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--out", an.out_dir, "output directory (default: out)");
  analyze->add_option("--eps", an.dbscan_eps, "DBSCAN neighborhood radius");
  analyze->add_option("--min-pts", an.dbscan_min_pts, "DBSCAN core threshold");
  analyze->add_option("--bandwidth", an.kde_bandwidth, "KDE bandwidth");
  analyze->add_option("--stride", an.frame_stride, "analyze every k-th frame");

  CLI::App* render = app.add_subcommand("render", "PPM image per trajectory frame");
  selfish::RenderOptions2 rn;
  render->add_option("trajectory", rn.trajectory, "trajectory CSV file")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--out", rn.out_dir, "output directory (default: out)");
  render->add_option("--ppu", rn.pixels_per_unit, "pixels per world unit");
  render->add_flag("--kde", rn.kde_layer, "density heat-map background");
  render->add_option("--bandwidth", rn.kde_bandwidth, "KDE bandwidth");
  render->add_option("--agent-radius", rn.agent_radius, "disc radius in world units");

  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over sweep_* config axes");
  add_common(sweep);
  selfish::SweepOptions sw;
  sweep->add_option("--jobs", sw.jobs, "parallel sweep cells")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  for (CLI::App* cmd : {train, eval, sweep})
    if (cmd->parsed() && cmd->count("--seed") > 0) common.seed = seed_value;

  if (train->parsed()) return selfish::cmd_train(common);
  if (eval->parsed()) return selfish::cmd_eval(common, eval_opt);
  if (analyze->parsed()) return selfish::cmd_analyze(an);
  if (render->parsed()) return selfish::cmd_render(rn);
  return selfish::cmd_sweep(common, sw);
}
