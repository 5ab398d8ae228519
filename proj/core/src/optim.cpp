#include "gaitmind/optim.hpp"

#include <cmath>
#include <string>

#include "gaitmind/error.hpp"

namespace gaitmind {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::Sgd ? "sgd" : "adam";
}

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "sgd" || text == "SGD") return OptimizerKind::Sgd;
  if (text == "adam" || text == "Adam") return OptimizerKind::Adam;
  fail(ErrorKind::InvalidConfig, "unknown optimizer '" + std::string(text) + "'");
}

template <typename T>
Optimizer<T>::Optimizer(double lr) : lr_(lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) fail(ErrorKind::InvalidConfig, "learning rate must be > 0");
}

template <typename T>
void Sgd<T>::step(std::span<Parameter<T>* const> params) {
  const T lr = static_cast<T>(this->lr_);
  for (Parameter<T>* p : params) {
    if (!p->trainable) continue;
    require_same_shape(p->grad.shape(), p->value.shape(), "sgd step");
    auto value = p->value.data();
    auto grad = p->grad.data();
    for (std::size_t i = 0; i < value.size(); ++i) value[i] -= lr * grad[i];
  }
}

template <typename T>
Adam<T>::Adam(AdamConfig config) : Optimizer<T>(config.lr), cfg_(config) {}

template <typename T>
void Adam<T>::step(std::span<Parameter<T>* const> params) {
  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (Parameter<T>* p : params) {
      m_.emplace_back(p->value.shape());
      v_.emplace_back(p->value.shape());
    }
  }
  if (m_.size() != params.size()) {
    fail(ErrorKind::InvalidState, "adam: parameter list changed between steps");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const T b1 = static_cast<T>(cfg_.beta1), b2 = static_cast<T>(cfg_.beta2);
  const T lr = static_cast<T>(cfg_.lr), eps = static_cast<T>(cfg_.eps);
  const T inv_bc1 = static_cast<T>(1.0 / bc1), inv_bc2 = static_cast<T>(1.0 / bc2);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter<T>& p = *params[k];
    require_same_shape(m_[k].shape(), p.value.shape(), "adam state");
    if (!p.trainable) continue;
    auto value = p.value.data();
    auto grad = p.grad.data();
    auto m = m_[k].data();
    auto v = v_[k].data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const T g = grad[i];
      m[i] = b1 * m[i] + (T{1} - b1) * g;
      v[i] = b2 * v[i] + (T{1} - b2) * g * g;
      const T m_hat = m[i] * inv_bc1;
      const T v_hat = v[i] * inv_bc2;
      value[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template <typename T>
std::unique_ptr<Optimizer<T>> make_optimizer(OptimizerKind kind, double lr) {
  if (kind == OptimizerKind::Sgd) return std::make_unique<Sgd<T>>(lr);
  return std::make_unique<Adam<T>>(AdamConfig{lr, 0.9, 0.999, 1e-8});
}

template class Optimizer<float>;
template class Optimizer<double>;
template class Sgd<float>;
template class Sgd<double>;
template class Adam<float>;
template class Adam<double>;
template std::unique_ptr<Optimizer<float>> make_optimizer<float>(OptimizerKind, double);
template std::unique_ptr<Optimizer<double>> make_optimizer<double>(OptimizerKind, double);

}  // namespace gaitmind
