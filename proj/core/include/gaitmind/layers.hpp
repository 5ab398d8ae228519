#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitmind/rng.hpp"
#include "gaitmind/tensor.hpp"

namespace gaitmind {

enum class LayerKind { Conv1d, MaxPool1d, ReLU, Dropout, Flatten, Dense };
enum class Phase { Train, Eval };

std::string_view to_string(LayerKind kind);

template <typename T>
struct Parameter {
  std::string name;
  BasicTensor<T> value;
  BasicTensor<T> grad;
  bool trainable = true;
};

// Pure kernels. Layer classes below wrap these with caching; they are exposed
// so tests can check them against brute-force loops.

inline constexpr std::size_t kConvKernel = 3;

/// Cross-correlation with kernel 3, zero padding 1, stride 1.
/// x [B,Cin,L], w [Cout,Cin,3], b [Cout] -> [B,Cout,L].
template <typename T>
BasicTensor<T> conv1d_forward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                              const BasicTensor<T>& b);

/// Returns dx; accumulates into dw and db.
template <typename T>
BasicTensor<T> conv1d_backward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                               const BasicTensor<T>& dy, BasicTensor<T>& dw, BasicTensor<T>& db);

/// Window 2, stride 2; a trailing odd element is dropped. argmax receives the
/// flat input index of each selected element (ties go to the earlier index).
template <typename T>
BasicTensor<T> maxpool1d_forward(const BasicTensor<T>& x, std::vector<std::size_t>& argmax);

template <typename T>
BasicTensor<T> maxpool1d_backward(const Shape& input_shape, const std::vector<std::size_t>& argmax,
                                  const BasicTensor<T>& dy);

/// x [B,n], w [n,m], b [m] -> [B,m].
template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                             const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> dense_backward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                              const BasicTensor<T>& dy, BasicTensor<T>& dw, BasicTensor<T>& db);

/// A differentiable layer. forward() in Train phase caches what backward()
/// needs; Eval forward leaves no cache.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  virtual BasicTensor<T> forward(const BasicTensor<T>& x, Phase phase, Rng& rng) = 0;
  virtual BasicTensor<T> backward(const BasicTensor<T>& dy) = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;

  std::span<Parameter<T>> parameters() noexcept { return params_; }
  std::span<const Parameter<T>> parameters() const noexcept { return params_; }
  Parameter<T>& parameter(std::string_view name);
  const Parameter<T>& parameter(std::string_view name) const;

  bool has_parameters() const noexcept { return !params_.empty(); }
  /// True when every parameter is trainable (vacuously true without parameters).
  bool trainable() const noexcept;
  void set_trainable(bool trainable) noexcept;
  void zero_grad() noexcept;

 protected:
  Layer() = default;
  Layer(const Layer&) = default;
  Layer& operator=(const Layer&) = default;

  void require_cache(bool valid, const char* layer) const;

  std::vector<Parameter<T>> params_;
};

template <typename T>
class Conv1d final : public Layer<T> {
 public:
  /// Glorot-uniform weights, zero bias.
  Conv1d(std::size_t in_channels, std::size_t out_channels, Rng& rng);
  Conv1d(BasicTensor<T> weight, BasicTensor<T> bias);

  LayerKind kind() const override { return LayerKind::Conv1d; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Phase phase, Rng& rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& dy) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Conv1d>(*this); }

  std::size_t in_channels() const { return this->params_[0].value.dim(1); }
  std::size_t out_channels() const { return this->params_[0].value.dim(0); }

 private:
  BasicTensor<T> input_;
  bool cached_ = false;
};

template <typename T>
class MaxPool1d final : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::MaxPool1d; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Phase phase, Rng& rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& dy) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<MaxPool1d>(*this); }

 private:
  Shape input_shape_;
  std::vector<std::size_t> argmax_;
  bool cached_ = false;
};

template <typename T>
class ReLU final : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::ReLU; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Phase phase, Rng& rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& dy) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ReLU>(*this); }

 private:
  std::vector<unsigned char> positive_;
  Shape shape_;
  bool cached_ = false;
};

/// Inverted dropout: survivors are scaled by 1/(1-p) in Train, identity in Eval.
template <typename T>
class Dropout final : public Layer<T> {
 public:
  explicit Dropout(double p);

  LayerKind kind() const override { return LayerKind::Dropout; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Phase phase, Rng& rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& dy) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Dropout>(*this); }

  double probability() const { return p_; }

 private:
  double p_;
  BasicTensor<T> mask_;
  bool cached_ = false;
};

/// [B,C,L] -> [B,C*L], channel-major.
template <typename T>
class Flatten final : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::Flatten; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Phase phase, Rng& rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& dy) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Flatten>(*this); }

 private:
  Shape input_shape_;
  bool cached_ = false;
};

template <typename T>
class Dense final : public Layer<T> {
 public:
  /// Glorot-uniform weights, zero bias.
  Dense(std::size_t inputs, std::size_t outputs, Rng& rng);
  Dense(BasicTensor<T> weight, BasicTensor<T> bias);

  LayerKind kind() const override { return LayerKind::Dense; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Phase phase, Rng& rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& dy) override;
  std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Dense>(*this); }

  std::size_t inputs() const { return this->params_[0].value.dim(0); }
  std::size_t outputs() const { return this->params_[0].value.dim(1); }

 private:
  BasicTensor<T> input_;
  bool cached_ = false;
};

/// Glorot-uniform bound sqrt(6 / (fan_in + fan_out)).
double glorot_limit(std::size_t fan_in, std::size_t fan_out);

}  // namespace gaitmind
