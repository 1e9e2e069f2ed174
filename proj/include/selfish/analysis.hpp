#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "selfish/geometry.hpp"

// Swarm measurement suite: circular statistics, torus DBSCAN, pairwise
// distances, wrapped-Gaussian KDE, and the derived per-run statistics
// (cluster-size tables, caught-per-frame rates, density-before-death traces).
// Everything here is a pure function of its inputs so saved trajectory logs
// can be re-analyzed at will.

namespace selfish {

inline constexpr int kNoise = -1;

// Transient cut applied to per-episode rates, in frames.
inline constexpr long kTransientFrames = 100;

// Length of the density-before-death window, in frames. Index
// kDeathTraceLen-1 is the catch frame itself.
inline constexpr long kDeathTraceLen = 100;

struct CircularMean {
  double mean_deg = 0.0;  // [0, 360); 0 when degenerate
  bool degenerate = false;  // resultant vector ~ zero, mean direction undefined
};

// Direction of the resultant of unit vectors. Empty input is a logic error.
CircularMean circular_mean(std::span<const double> angles_deg);

struct AngleDeviation {
  double mean_abs_deg = 0.0;
  bool degenerate = false;  // carried over from the underlying circular mean
};

// Mean over entries of |shortest signed difference to the circular mean|.
// For antipodal (degenerate) inputs the value is still well defined; the
// flag just records that the mean direction itself was arbitrary.
AngleDeviation mean_angle_deviation(std::span<const double> angles_deg);

// DBSCAN under the torus metric. A point is core when at least min_pts
// points (itself included) lie within eps. Clusters are the connected
// components of core points under eps-adjacency; a non-core point within eps
// of some core joins the cluster of the nearest such core (this keeps the
// partition independent of input order); everything else is kNoise.
// Labels are contiguous 0..k-1 in order of first core appearance.
std::vector<int> dbscan(std::span<const Vec2> points, double edge_length,
                        double eps, int min_pts);

// Relabel clusters by order of first appearance in the label vector, for
// comparing partitions that may differ only in label naming.
std::vector<int> canonical_labels(std::span<const int> labels);

// Mean torus distance over unordered pairs, on the unit torus (distances
// divided by edge_length, so the result lies in [0, sqrt(2)/2]).
// Fewer than two points -> NaN (missing value).
double avg_pairwise_distance(std::span<const Vec2> points, double edge_length);

// Wrapped-Gaussian kernel density estimate evaluated at query: sum over
// points of 1/(2 pi h^2) exp(-d^2 / (2 h^2)) with d the torus distance.
// Shortest-image approximation, adequate for h well below edge_length.
// Query and points may lie outside [0, edge_length); they are wrapped, so
// the estimate is periodic in every coordinate.
// Unnormalized convention: the integral over the torus is the point count.
double kde_density(std::span<const Vec2> points, Vec2 query, double bandwidth,
                   double edge_length);

// Everything measured on a single frame.
struct FrameMetrics {
  std::vector<int> labels;
  std::vector<int> cluster_sizes;  // indexed by cluster id
  int noise_count = 0;
  AngleDeviation global_angle;            // over all agents
  double global_pairwise = 0.0;           // over all pairs
  std::vector<double> cluster_angle_dev;  // per cluster (all same-cluster agents)
  std::vector<double> cluster_pairwise;   // per cluster; NaN for singleton clusters
  double mean_cluster_angle_dev = 0.0;    // unweighted mean over clusters; NaN if none
  double mean_cluster_pairwise = 0.0;     // mean of per-cluster means; NaN if none
  double pooled_intra_pairwise = 0.0;     // all intra-cluster pairs pooled; NaN if none
};

FrameMetrics compute_frame_metrics(std::span<const Vec2> positions,
                                   std::span<const double> orientations_deg,
                                   double edge_length, double eps, int min_pts);

// Rank-based aggregation of cluster sizes across frames: sizes are sorted
// descending per frame, then averaged per rank with absent ranks counting as
// zero, so sum(mean_sizes) + mean_noise equals the mean agent count.
struct ClusterSizeTable {
  std::vector<double> mean_sizes;  // by rank, largest first
  std::vector<long> rank_frames;   // frames in which the rank was present
  double mean_noise = 0.0;
  long frames = 0;
};

ClusterSizeTable cluster_size_table(
    const std::vector<std::vector<int>>& frame_cluster_sizes,
    const std::vector<int>& frame_noise_counts);

// Catches divided by (episode length - kTransientFrames). Episodes no longer
// than the transient have no defined rate -> NaN (callers drop and log them).
double caught_per_frame(long total_catches, long episode_frames);

struct DeathTraceResult {
  std::vector<double> mean_trace;  // kDeathTraceLen entries; last = catch frame
  long deaths_used = 0;
  long deaths_skipped = 0;  // caught agents with under kDeathTraceLen frames of life
};

// Mean density at a caught agent's own position (excluding itself) over its
// final kDeathTraceLen frames, averaged across catch events and aligned on
// time-to-death. frame_positions[t][a] is agent a's logged position at frame
// t; for the catch frame that is the position of death, pre-respawn.
// catches holds (frame, agent) pairs.
DeathTraceResult density_before_death(
    const std::vector<std::vector<Vec2>>& frame_positions,
    const std::vector<std::pair<long, int>>& catches, double bandwidth,
    double edge_length);

// Spearman rank correlation (average ranks on ties). Returns NaN for fewer
// than two points or zero rank variance.
double spearman_rho(std::span<const double> x, std::span<const double> y);

// One-sided p-value for the hypothesis rho < 0, via the t approximation
// t = rho sqrt((n-2)/(1-rho^2)) with n-2 degrees of freedom.
double spearman_pvalue_less(double rho, long n);

// Regularized incomplete beta I_x(a, b), exposed for the statistics tests.
double incomplete_beta(double a, double b, double x);

}  // namespace selfish
