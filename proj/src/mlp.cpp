#include "selfish/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace selfish {

void MlpSpec::validate() const {
  if (widths.size() < 3)
    throw std::invalid_argument("mlp spec needs at least one hidden layer");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("mlp layer widths must be >= 1");
}

MlpSpec MlpSpec::make(int input, int hidden_layers, int hidden_width, int output) {
  MlpSpec s;
  s.widths.push_back(input);
  for (int i = 0; i < hidden_layers; ++i) s.widths.push_back(hidden_width);
  s.widths.push_back(output);
  s.validate();
  return s;
}

std::size_t MlpParams::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += weights[l].size() + biases[l].size();
  return n;
}

bool MlpParams::all_finite() const {
  for (const auto& layer : weights)
    for (double w : layer)
      if (!std::isfinite(w)) return false;
  for (const auto& layer : biases)
    for (double b : layer)
      if (!std::isfinite(b)) return false;
  return true;
}

MlpGrads MlpGrads::zeros_like(const MlpParams& p) {
  MlpGrads g;
  g.weights.resize(p.weights.size());
  g.biases.resize(p.biases.size());
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    g.weights[l].assign(p.weights[l].size(), 0.0);
    g.biases[l].assign(p.biases[l].size(), 0.0);
  }
  return g;
}

void MlpGrads::set_zero() {
  for (auto& layer : weights) std::fill(layer.begin(), layer.end(), 0.0);
  for (auto& layer : biases) std::fill(layer.begin(), layer.end(), 0.0);
}

void MlpGrads::scale(double s) {
  for (auto& layer : weights)
    for (double& w : layer) w *= s;
  for (auto& layer : biases)
    for (double& b : layer) b *= s;
}

const std::vector<double>& mlp_forward(const MlpParams& p, std::span<const double> x,
                                       ForwardCache& cache) {
  const int layers = p.spec.num_layers();
  if (static_cast<int>(x.size()) != p.spec.input_width())
    throw std::invalid_argument("mlp_forward: input width mismatch");

  cache.acts.resize(layers + 1);
  cache.acts[0].assign(x.begin(), x.end());

  for (int l = 0; l < layers; ++l) {
    const int in = p.spec.widths[l];
    const int out = p.spec.widths[l + 1];
    const std::vector<double>& a = cache.acts[l];
    std::vector<double>& next = cache.acts[l + 1];
    next.resize(out);
    const double* W = p.weights[l].data();
    const bool last = (l == layers - 1);
    for (int j = 0; j < out; ++j) {
      const double* row = W + static_cast<std::size_t>(j) * in;
      double s = p.biases[l][j];
      for (int i = 0; i < in; ++i) s += row[i] * a[i];
      next[j] = last ? s : (s > 0.0 ? s : 0.0);
    }
  }
  return cache.acts.back();
}

std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x) {
  ForwardCache cache;
  return mlp_forward(p, x, cache);
}

void mlp_backward(const MlpParams& p, const ForwardCache& cache,
                  std::span<const double> output_grad, MlpGrads& grads,
                  std::vector<double>* input_grad) {
  const int layers = p.spec.num_layers();
  if (static_cast<int>(output_grad.size()) != p.spec.output_width())
    throw std::invalid_argument("mlp_backward: output gradient width mismatch");
  if (static_cast<int>(cache.acts.size()) != layers + 1)
    throw std::invalid_argument("mlp_backward: cache does not match network");

  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> prev_delta;

  for (int l = layers - 1; l >= 0; --l) {
    const int in = p.spec.widths[l];
    const int out = p.spec.widths[l + 1];
    const std::vector<double>& a = cache.acts[l];
    const double* W = p.weights[l].data();
    double* gW = grads.weights[l].data();
    double* gb = grads.biases[l].data();

    for (int j = 0; j < out; ++j) {
      const double d = delta[j];
      gb[j] += d;
      double* grow = gW + static_cast<std::size_t>(j) * in;
      for (int i = 0; i < in; ++i) grow[i] += d * a[i];
    }

    const bool need_input = (l > 0) || (input_grad != nullptr);
    if (!need_input) break;
    prev_delta.assign(in, 0.0);
    for (int j = 0; j < out; ++j) {
      const double d = delta[j];
      const double* row = W + static_cast<std::size_t>(j) * in;
      for (int i = 0; i < in; ++i) prev_delta[i] += d * row[i];
    }
    if (l > 0) {
      // ReLU gate of the producing layer; post > 0 iff pre > 0.
      for (int i = 0; i < in; ++i)
        if (a[i] <= 0.0) prev_delta[i] = 0.0;
    }
    delta.swap(prev_delta);
  }
  if (input_grad) *input_grad = std::move(delta);
}

AdamState AdamState::make(const MlpParams& p, double lr) {
  AdamState s;
  s.learning_rate = lr;
  s.m = MlpGrads::zeros_like(p);
  s.v = MlpGrads::zeros_like(p);
  return s;
}

namespace {

void adam_apply(std::vector<double>& theta, const std::vector<double>& g,
                std::vector<double>& m, std::vector<double>& v,
                const AdamState& s, double bc1, double bc2) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    theta[i] -= s.learning_rate * mhat / (std::sqrt(vhat) + s.epsilon);
  }
}

}  // namespace

void adam_update(MlpParams& p, const MlpGrads& grads, AdamState& state) {
  ++state.t;
  const double bc1 = 1.0 - std::pow(state.beta1, state.t);
  const double bc2 = 1.0 - std::pow(state.beta2, state.t);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    adam_apply(p.weights[l], grads.weights[l], state.m.weights[l],
               state.v.weights[l], state, bc1, bc2);
    adam_apply(p.biases[l], grads.biases[l], state.m.biases[l],
               state.v.biases[l], state, bc1, bc2);
  }
}

MlpParams init_params(const MlpSpec& spec, SplitMix64& rng) {
  spec.validate();
  MlpParams p;
  p.spec = spec;
  const int layers = spec.num_layers();
  p.weights.resize(layers);
  p.biases.resize(layers);
  for (int l = 0; l < layers; ++l) {
    const int in = spec.widths[l];
    const int out = spec.widths[l + 1];
    const bool last = (l == layers - 1);
    const double limit = last ? 3e-3 : std::sqrt(6.0 / in);
    p.weights[l].resize(static_cast<std::size_t>(out) * in);
    for (double& w : p.weights[l]) w = rng.uniform(-limit, limit);
    p.biases[l].assign(out, 0.0);
    if (last)
      for (double& b : p.biases[l]) b = rng.uniform(-limit, limit);
  }
  return p;
}

void soft_update(MlpParams& target, const MlpParams& live, double tau) {
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    for (std::size_t i = 0; i < target.weights[l].size(); ++i)
      target.weights[l][i] = tau * live.weights[l][i] + (1.0 - tau) * target.weights[l][i];
    for (std::size_t i = 0; i < target.biases[l].size(); ++i)
      target.biases[l][i] = tau * live.biases[l][i] + (1.0 - tau) * target.biases[l][i];
  }
}

}  // namespace selfish
