#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "gaitmind/layers.hpp"

namespace gaitmind {

enum class OptimizerKind { Sgd, Adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view text);

/// Updates trainable parameters in place from their accumulated grads.
/// Parameters with trainable == false are never written.
template <typename T>
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual OptimizerKind kind() const = 0;
  virtual void step(std::span<Parameter<T>* const> params) = 0;

  double learning_rate() const noexcept { return lr_; }

 protected:
  explicit Optimizer(double lr);
  double lr_;
};

/// Plain SGD: p <- p - lr * g. No momentum, no weight decay.
template <typename T>
class Sgd final : public Optimizer<T> {
 public:
  explicit Sgd(double lr) : Optimizer<T>(lr) {}
  OptimizerKind kind() const override { return OptimizerKind::Sgd; }
  void step(std::span<Parameter<T>* const> params) override;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias-corrected moments (Kingma & Ba).
template <typename T>
class Adam final : public Optimizer<T> {
 public:
  explicit Adam(AdamConfig config);
  OptimizerKind kind() const override { return OptimizerKind::Adam; }
  void step(std::span<Parameter<T>* const> params) override;

  std::uint64_t steps() const noexcept { return t_; }
  const std::vector<BasicTensor<T>>& first_moments() const noexcept { return m_; }
  const std::vector<BasicTensor<T>>& second_moments() const noexcept { return v_; }

 private:
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<BasicTensor<T>> m_;
  std::vector<BasicTensor<T>> v_;
};

template <typename T>
std::unique_ptr<Optimizer<T>> make_optimizer(OptimizerKind kind, double lr);

}  // namespace gaitmind
