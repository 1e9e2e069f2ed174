#include "selfish/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace selfish {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

CircularMean circular_mean(std::span<const double> angles_deg) {
  if (angles_deg.empty())
    throw std::invalid_argument("circular_mean: empty input");
  double sx = 0.0, sy = 0.0;
  for (double a : angles_deg) {
    const double r = deg_to_rad(a);
    sx += std::cos(r);
    sy += std::sin(r);
  }
  const double resultant = std::hypot(sx, sy) / static_cast<double>(angles_deg.size());
  CircularMean out;
  if (resultant < 1e-9) {
    out.degenerate = true;
    out.mean_deg = 0.0;
    return out;
  }
  out.mean_deg = wrap_angle_360(rad_to_deg(std::atan2(sy, sx)));
  return out;
}

AngleDeviation mean_angle_deviation(std::span<const double> angles_deg) {
  const CircularMean cm = circular_mean(angles_deg);
  double sum = 0.0;
  for (double a : angles_deg)
    sum += std::abs(wrap_angle_signed(a - cm.mean_deg));
  return {sum / static_cast<double>(angles_deg.size()), cm.degenerate};
}

std::vector<int> dbscan(std::span<const Vec2> points, double edge_length,
                        double eps, int min_pts) {
  if (eps <= 0.0) throw std::invalid_argument("dbscan: eps must be positive");
  if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<int>> nbrs(n);  // within eps, self included
  for (int i = 0; i < n; ++i) {
    nbrs[i].push_back(i);
    for (int j = i + 1; j < n; ++j) {
      if (torus_distance(points[i], points[j], edge_length) <= eps) {
        nbrs[i].push_back(j);
        nbrs[j].push_back(i);
      }
    }
  }
  std::vector<bool> core(n);
  for (int i = 0; i < n; ++i)
    core[i] = static_cast<int>(nbrs[i].size()) >= min_pts;

  std::vector<int> labels(n, kNoise);
  int next = 0;
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (!core[i] || labels[i] != kNoise) continue;
    const int cluster = next++;
    labels[i] = cluster;
    stack.assign(1, i);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      for (int q : nbrs[p]) {
        if (!core[q] || labels[q] != kNoise) continue;
        labels[q] = cluster;
        stack.push_back(q);
      }
    }
  }
  // Border points: adopt the nearest core's cluster so the result does not
  // depend on expansion order.
  for (int i = 0; i < n; ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (int q : nbrs[i]) {
      if (q == i || !core[q]) continue;
      const double d = torus_distance(points[i], points[q], edge_length);
      if (d < best) {
        best = d;
        labels[i] = labels[q];
      }
    }
  }
  return labels;
}

std::vector<int> canonical_labels(std::span<const int> labels) {
  std::vector<int> out(labels.size(), kNoise);
  std::unordered_map<int, int> remap;
  int next = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kNoise) continue;
    const auto [it, inserted] = remap.try_emplace(labels[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

double avg_pairwise_distance(std::span<const Vec2> points, double edge_length) {
  const size_t n = points.size();
  if (n < 2) return kNaN;
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      sum += torus_distance(points[i], points[j], edge_length);
  return sum / (edge_length * 0.5 * static_cast<double>(n) *
                static_cast<double>(n - 1));
}

double kde_density(std::span<const Vec2> points, Vec2 query, double bandwidth,
                   double edge_length) {
  if (bandwidth <= 0.0)
    throw std::invalid_argument("kde_density: bandwidth must be positive");
  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  const double norm = inv2h2 / std::numbers::pi;  // 1 / (2 pi h^2)
  query = wrap_position(query, edge_length);
  double sum = 0.0;
  for (const Vec2& p : points) {
    const double d = torus_distance(wrap_position(p, edge_length), query, edge_length);
    sum += std::exp(-d * d * inv2h2);
  }
  return norm * sum;
}

FrameMetrics compute_frame_metrics(std::span<const Vec2> positions,
                                   std::span<const double> orientations_deg,
                                   double edge_length, double eps, int min_pts) {
  if (positions.size() != orientations_deg.size())
    throw std::invalid_argument("compute_frame_metrics: size mismatch");
  FrameMetrics m;
  m.labels = dbscan(positions, edge_length, eps, min_pts);
  int num_clusters = 0;
  for (int l : m.labels) num_clusters = std::max(num_clusters, l + 1);
  m.cluster_sizes.assign(num_clusters, 0);
  for (int l : m.labels) {
    if (l == kNoise)
      ++m.noise_count;
    else
      ++m.cluster_sizes[l];
  }
  m.global_angle = mean_angle_deviation(orientations_deg);
  m.global_pairwise = avg_pairwise_distance(positions, edge_length);

  m.cluster_angle_dev.assign(num_clusters, kNaN);
  m.cluster_pairwise.assign(num_clusters, kNaN);
  double angle_sum = 0.0, pair_sum = 0.0;
  int pair_defined = 0;
  double pooled_sum = 0.0;
  long pooled_pairs = 0;
  std::vector<Vec2> pos;
  std::vector<double> ang;
  for (int c = 0; c < num_clusters; ++c) {
    pos.clear();
    ang.clear();
    for (size_t i = 0; i < positions.size(); ++i) {
      if (m.labels[i] != c) continue;
      pos.push_back(positions[i]);
      ang.push_back(orientations_deg[i]);
    }
    m.cluster_angle_dev[c] = mean_angle_deviation(ang).mean_abs_deg;
    angle_sum += m.cluster_angle_dev[c];
    const double pw = avg_pairwise_distance(pos, edge_length);
    m.cluster_pairwise[c] = pw;
    if (!std::isnan(pw)) {
      pair_sum += pw;
      ++pair_defined;
      const long pairs =
          static_cast<long>(pos.size()) * (static_cast<long>(pos.size()) - 1) / 2;
      pooled_sum += pw * static_cast<double>(pairs);
      pooled_pairs += pairs;
    }
  }
  m.mean_cluster_angle_dev =
      num_clusters > 0 ? angle_sum / num_clusters : kNaN;
  m.mean_cluster_pairwise = pair_defined > 0 ? pair_sum / pair_defined : kNaN;
  m.pooled_intra_pairwise =
      pooled_pairs > 0 ? pooled_sum / static_cast<double>(pooled_pairs) : kNaN;
  return m;
}

ClusterSizeTable cluster_size_table(
    const std::vector<std::vector<int>>& frame_cluster_sizes,
    const std::vector<int>& frame_noise_counts) {
  if (frame_cluster_sizes.size() != frame_noise_counts.size())
    throw std::invalid_argument("cluster_size_table: size mismatch");
  ClusterSizeTable t;
  t.frames = static_cast<long>(frame_cluster_sizes.size());
  if (t.frames == 0) return t;
  size_t max_ranks = 0;
  for (const auto& sizes : frame_cluster_sizes)
    max_ranks = std::max(max_ranks, sizes.size());
  t.mean_sizes.assign(max_ranks, 0.0);
  t.rank_frames.assign(max_ranks, 0);
  double noise_sum = 0.0;
  std::vector<int> sorted;
  for (size_t f = 0; f < frame_cluster_sizes.size(); ++f) {
    sorted = frame_cluster_sizes[f];
    std::sort(sorted.begin(), sorted.end(), std::greater<int>());
    for (size_t r = 0; r < sorted.size(); ++r) {
      t.mean_sizes[r] += sorted[r];
      ++t.rank_frames[r];
    }
    noise_sum += frame_noise_counts[f];
  }
  for (double& s : t.mean_sizes) s /= static_cast<double>(t.frames);
  t.mean_noise = noise_sum / static_cast<double>(t.frames);
  return t;
}

double caught_per_frame(long total_catches, long episode_frames) {
  if (episode_frames <= kTransientFrames) return kNaN;
  return static_cast<double>(total_catches) /
         static_cast<double>(episode_frames - kTransientFrames);
}

DeathTraceResult density_before_death(
    const std::vector<std::vector<Vec2>>& frame_positions,
    const std::vector<std::pair<long, int>>& catches, double bandwidth,
    double edge_length) {
  DeathTraceResult out;
  out.mean_trace.assign(kDeathTraceLen, 0.0);
  if (frame_positions.empty()) return out;
  const int agents = static_cast<int>(frame_positions.front().size());
  // Birth frame per agent: the frame after its previous catch, or 0.
  std::vector<long> born(agents, 0);
  std::vector<Vec2> others(agents > 0 ? agents - 1 : 0);
  for (const auto& [frame, agent] : catches) {
    if (agent < 0 || agent >= agents || frame < 0 ||
        frame >= static_cast<long>(frame_positions.size()))
      throw std::invalid_argument("density_before_death: catch out of range");
    const long life = frame - born[agent] + 1;
    if (life >= kDeathTraceLen && frame - (kDeathTraceLen - 1) >= 0) {
      for (long k = 0; k < kDeathTraceLen; ++k) {
        const long t = frame - (kDeathTraceLen - 1) + k;
        const auto& pos = frame_positions[t];
        others.clear();
        for (int a = 0; a < agents; ++a)
          if (a != agent) others.push_back(pos[a]);
        out.mean_trace[k] +=
            kde_density(others, pos[agent], bandwidth, edge_length);
      }
      ++out.deaths_used;
    } else {
      ++out.deaths_skipped;
    }
    born[agent] = frame + 1;
  }
  if (out.deaths_used > 0)
    for (double& v : out.mean_trace) v /= static_cast<double>(out.deaths_used);
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  const size_t n = v.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("spearman_rho: size mismatch");
  const size_t n = x.size();
  if (n < 2) return kNaN;
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  // I_x(a,b) via the continued fraction (Lentz), using the symmetry that
  // keeps the fraction in its fast-converging region.
  if (x > (a + 1.0) / (a + b + 2.0))
    return 1.0 - incomplete_beta(b, a, 1.0 - x);
  const double ln_front = a * std::log(x) + b * std::log(1.0 - x) -
                          std::log(a) - std::lgamma(a) - std::lgamma(b) +
                          std::lgamma(a + b);
  const double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m <= 300; ++m) {
    const double dm = static_cast<double>(m);
    double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    f *= d * c;
    num = -(a + dm) * (a + b + dm) * x /
          ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-12) break;
  }
  return std::exp(ln_front) * f;
}

double spearman_pvalue_less(double rho, long n) {
  if (n < 3 || std::isnan(rho)) return kNaN;
  const double df = static_cast<double>(n - 2);
  const double denom = 1.0 - rho * rho;
  if (denom <= 0.0) return rho < 0.0 ? 0.0 : 1.0;
  const double t = rho * std::sqrt(df / denom);
  // Student-t CDF at t with df degrees of freedom.
  const double ib = incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t <= 0.0 ? 0.5 * ib : 1.0 - 0.5 * ib;
}

}  // namespace selfish
