#include "gaitmind/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gaitmind/error.hpp"

namespace gaitmind {

ClassWeights::ClassWeights(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) fail(ErrorKind::InvalidInput, "class weights must not be empty");
  bool any_positive = false;
  for (double w : w_) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::InvalidInput, "class weights must be finite and >= 0");
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) fail(ErrorKind::InvalidInput, "at least one class weight must be positive");
}

ClassWeights ClassWeights::uniform(std::size_t classes) {
  return ClassWeights(std::vector<double>(classes, 1.0));
}

ClassWeights class_weights_from_counts(std::span<const std::size_t> counts) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (total == 0) fail(ErrorKind::InvalidInput, "class counts are all zero");
  const auto present = static_cast<double>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t n) { return n > 0; }));
  std::vector<double> w(counts.size(), 0.0);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) w[c] = static_cast<double>(total) / (present * static_cast<double>(counts[c]));
  }
  return ClassWeights(std::move(w));
}

template <typename T>
LossResult<T> weighted_cross_entropy(const BasicTensor<T>& logits, std::span<const int> targets,
                                     const ClassWeights& weights) {
  if (logits.rank() != 2) fail(ErrorKind::InvalidShape, "logits must be [B,C]");
  const std::size_t B = logits.dim(0), C = logits.dim(1);
  if (targets.size() != B) fail(ErrorKind::InvalidShape, "targets length must equal batch size");
  if (weights.size() != C) fail(ErrorKind::InvalidShape, "class weight count must equal logit width");
  for (int y : targets) {
    if (y < 0 || static_cast<std::size_t>(y) >= C) {
      fail(ErrorKind::InvalidLabel, "target " + std::to_string(y) + " outside [0," +
                                        std::to_string(C) + ")");
    }
  }

  LossResult<T> out{0.0, BasicTensor<T>(logits.shape())};
  double weight_sum = 0.0;
  for (int y : targets) weight_sum += weights[static_cast<std::size_t>(y)];
  if (weight_sum == 0.0) return out;

  std::vector<double> prob(C);
  double total = 0.0;
  for (std::size_t i = 0; i < B; ++i) {
    const T* row = logits.data().data() + i * C;
    const auto y = static_cast<std::size_t>(targets[i]);
    const double wy = weights[y];
    std::size_t top = 0;
    for (std::size_t c = 1; c < C; ++c)
      if (row[c] > row[top]) top = c;
    const double mx = row[top];
    double rest = 0.0;  // sum of exp(z - max) without the max term, for log1p
    for (std::size_t c = 0; c < C; ++c) {
      prob[c] = std::exp(static_cast<double>(row[c]) - mx);
      if (c != top) rest += prob[c];
    }
    const double z = 1.0 + rest;
    total += wy * ((mx - static_cast<double>(row[y])) + std::log1p(rest));
    T* g = out.dlogits.data().data() + i * C;
    const double coef = wy / weight_sum;
    for (std::size_t c = 0; c < C; ++c) {
      const double p = prob[c] / z;
      g[c] = static_cast<T>(coef * (p - (c == y ? 1.0 : 0.0)));
    }
  }
  out.loss = total / weight_sum;
  return out;
}

template LossResult<float> weighted_cross_entropy<float>(const BasicTensor<float>&,
                                                         std::span<const int>, const ClassWeights&);
template LossResult<double> weighted_cross_entropy<double>(const BasicTensor<double>&,
                                                           std::span<const int>, const ClassWeights&);

}  // namespace gaitmind
