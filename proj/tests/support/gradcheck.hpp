#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gaitmind/layers.hpp"
#include "gaitmind/loss.hpp"

namespace gaitmind::testing {

inline constexpr double kFdStep = 1e-5;

/// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose true
/// gradient is zero from dividing round-off by round-off.
inline double rel_error(double analytic, double numeric, double floor = 1e-6) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

inline double dot(const Tensor64& a, const Tensor64& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Central-difference check of a layer under J = sum(r * layer(x)).
///
/// Every forward call gets a fresh copy of `rng`, so dropout draws the same
/// mask each time. Returns the largest relative error over all input and
/// parameter entries.
inline double check_layer(Layer<double>& layer, const Tensor64& x, const Rng& rng, Rng& probe_rng) {
  Rng r0 = rng;
  const Tensor64 y0 = layer.forward(x, Phase::Train, r0);
  const Tensor64 r = uniform<double>(probe_rng, y0.shape(), -1.0, 1.0);

  layer.zero_grad();
  Rng r1 = rng;
  layer.forward(x, Phase::Train, r1);
  const Tensor64 dx = layer.backward(r);
  std::vector<Tensor64> dparams;
  for (const auto& p : layer.parameters()) dparams.push_back(p.grad);

  const auto objective = [&](const Tensor64& input) {
    Rng rr = rng;
    return dot(r, layer.forward(input, Phase::Train, rr));
  };

  double worst = 0.0;
  Tensor64 xp = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = xp[i];
    xp[i] = orig + kFdStep;
    const double jp = objective(xp);
    xp[i] = orig - kFdStep;
    const double jm = objective(xp);
    xp[i] = orig;
    worst = std::max(worst, rel_error(dx[i], (jp - jm) / (2.0 * kFdStep)));
  }
  auto params = layer.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& value = params[k].value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double orig = value[i];
      value[i] = orig + kFdStep;
      const double jp = objective(x);
      value[i] = orig - kFdStep;
      const double jm = objective(x);
      value[i] = orig;
      worst = std::max(worst, rel_error(dparams[k][i], (jp - jm) / (2.0 * kFdStep)));
    }
  }
  return worst;
}

/// Central-difference check of the weighted cross-entropy gradient.
inline double check_loss(const Tensor64& logits, const std::vector<int>& targets,
                         const ClassWeights& weights) {
  const auto res = weighted_cross_entropy(logits, targets, weights);
  double worst = 0.0;
  Tensor64 z = logits;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double orig = z[i];
    z[i] = orig + kFdStep;
    const double lp = weighted_cross_entropy(z, targets, weights).loss;
    z[i] = orig - kFdStep;
    const double lm = weighted_cross_entropy(z, targets, weights).loss;
    z[i] = orig;
    worst = std::max(worst, rel_error(res.dlogits[i], (lp - lm) / (2.0 * kFdStep)));
  }
  return worst;
}

/// Input whose entries are at least `gap` away from each other's pooling
/// partner and from zero, so a step of kFdStep never flips a max or a ReLU.
inline Tensor64 well_separated(Rng& rng, const Shape& shape, double gap = 1e-3) {
  Tensor64 x = uniform<double>(rng, shape, -1.0, 1.0);
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
    if (std::abs(x[i] - x[i + 1]) < gap) x[i + 1] = x[i] + (x[i] < 0 ? 2 * gap : -2 * gap);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) < gap) x[i] = x[i] < 0 ? -gap : gap;
  }
  return x;
}

}  // namespace gaitmind::testing
