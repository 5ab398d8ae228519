#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gaitmind/tensor.hpp"

namespace gaitmind {

/// Per-class loss weights. Nonnegative with at least one positive entry.
class ClassWeights {
 public:
  explicit ClassWeights(std::vector<double> weights);
  static ClassWeights uniform(std::size_t classes);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t c) const { return w_[c]; }
  const std::vector<double>& values() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

/// Inverse-frequency weights normalized to mean one over present classes:
/// w_c = N / (C_present * n_c) for n_c > 0, otherwise 0.
ClassWeights class_weights_from_counts(std::span<const std::size_t> counts);

template <typename T>
struct LossResult {
  double loss = 0.0;
  BasicTensor<T> dlogits;
};

/// Class-weighted softmax cross-entropy over a batch.
///
/// Sample i contributes w[y_i] * (logsumexp(x_i) - x_i[y_i]); the batch value
/// is the sum of those divided by the sum of w[y_i] (weighted mean). dlogits
/// is the exact gradient of the reduced value. A batch whose selected weights
/// are all zero yields loss 0 and a zero gradient.
template <typename T>
LossResult<T> weighted_cross_entropy(const BasicTensor<T>& logits, std::span<const int> targets,
                                     const ClassWeights& weights);

}  // namespace gaitmind
