#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "selfish/rng.hpp"

namespace selfish {

// Dense feed-forward network, ReLU hidden layers, linear output. Everything
// is double precision; the networks here are tiny.
struct MlpSpec {
  std::vector<int> widths;  // input, hidden..., output

  int input_width() const { return widths.front(); }
  int output_width() const { return widths.back(); }
  int num_layers() const { return static_cast<int>(widths.size()) - 1; }
  void validate() const;  // >= 1 hidden layer, all widths >= 1

  static MlpSpec make(int input, int hidden_layers, int hidden_width, int output);

  bool operator==(const MlpSpec&) const = default;
};

struct MlpParams {
  MlpSpec spec;
  std::vector<std::vector<double>> weights;  // per layer, row-major out x in
  std::vector<std::vector<double>> biases;   // per layer, out

  std::size_t param_count() const;
  bool all_finite() const;
  bool operator==(const MlpParams&) const = default;
};

// Gradients (or any per-parameter quantity) with the same shapes as params.
struct MlpGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static MlpGrads zeros_like(const MlpParams& p);
  void set_zero();
  void scale(double s);
};

// Post-activation values per layer; acts[0] is the input copy, acts.back()
// the linear output. ReLU derivative is recovered from post > 0.
struct ForwardCache {
  std::vector<std::vector<double>> acts;
};

// Forward pass; returns a reference into the cache. Throws on width mismatch.
const std::vector<double>& mlp_forward(const MlpParams& p, std::span<const double> x,
                                       ForwardCache& cache);

// Convenience overload without gradient bookkeeping.
std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x);

// Reverse-mode gradients for a cached forward pass. Accumulates into `grads`
// (callers zero it when starting a batch) and returns dL/dx via `input_grad`
// when non-null. ReLU subgradient at 0 is 0.
void mlp_backward(const MlpParams& p, const ForwardCache& cache,
                  std::span<const double> output_grad, MlpGrads& grads,
                  std::vector<double>* input_grad = nullptr);

struct AdamState {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long t = 0;
  MlpGrads m;  // first moment
  MlpGrads v;  // second moment

  static AdamState make(const MlpParams& p, double lr);
};

// One Adam step with bias correction.
void adam_update(MlpParams& p, const MlpGrads& grads, AdamState& state);

// He-uniform fan-in init for hidden layers (zero biases); small uniform
// +/-3e-3 for the output layer weights and biases. Deterministic in seed.
MlpParams init_params(const MlpSpec& spec, SplitMix64& rng);

// target := tau * live + (1 - tau) * target. tau = 1 is a hard copy.
void soft_update(MlpParams& target, const MlpParams& live, double tau);

}  // namespace selfish
