#include "gaitmind/layers.hpp"

#include <cmath>

#include "gaitmind/error.hpp"

namespace gaitmind {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv1d: return "conv1d";
    case LayerKind::MaxPool1d: return "maxpool1d";
    case LayerKind::ReLU: return "relu";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::Dense: return "dense";
  }
  return "unknown";
}

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

// ---------------------------------------------------------------------------
// kernels

template <typename T>
BasicTensor<T> conv1d_forward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                              const BasicTensor<T>& b) {
  if (x.rank() != 3 || w.rank() != 3 || b.rank() != 1 || w.dim(2) != kConvKernel ||
      w.dim(1) != x.dim(1) || b.dim(0) != w.dim(0)) {
    fail(ErrorKind::InvalidShape, "conv1d: input " + shape_string(x.shape()) + ", weight " +
                                      shape_string(w.shape()) + ", bias " +
                                      shape_string(b.shape()));
  }
  const std::size_t B = x.dim(0), Cin = x.dim(1), L = x.dim(2), Cout = w.dim(0);
  BasicTensor<T> y({B, Cout, L});
  const T* X = x.data().data();
  const T* W = w.data().data();
  T* Y = y.data().data();
  for (std::size_t bi = 0; bi < B; ++bi) {
    for (std::size_t co = 0; co < Cout; ++co) {
      T* yr = Y + (bi * Cout + co) * L;
      const T bias = b[co];
      for (std::size_t t = 0; t < L; ++t) yr[t] = bias;
      for (std::size_t ci = 0; ci < Cin; ++ci) {
        const T* xr = X + (bi * Cin + ci) * L;
        const T* wk = W + (co * Cin + ci) * kConvKernel;
        const T w0 = wk[0], w1 = wk[1], w2 = wk[2];
        for (std::size_t t = 0; t < L; ++t) yr[t] += w1 * xr[t];
        for (std::size_t t = 1; t < L; ++t) yr[t] += w0 * xr[t - 1];
        for (std::size_t t = 0; t + 1 < L; ++t) yr[t] += w2 * xr[t + 1];
      }
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> conv1d_backward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                               const BasicTensor<T>& dy, BasicTensor<T>& dw, BasicTensor<T>& db) {
  const std::size_t B = x.dim(0), Cin = x.dim(1), L = x.dim(2), Cout = w.dim(0);
  require_same_shape(dy.shape(), Shape{B, Cout, L}, "conv1d backward");
  require_same_shape(dw.shape(), w.shape(), "conv1d weight grad");
  require_same_shape(db.shape(), Shape{Cout}, "conv1d bias grad");
  BasicTensor<T> dx(x.shape());
  const T* X = x.data().data();
  const T* W = w.data().data();
  const T* DY = dy.data().data();
  T* DX = dx.data().data();
  T* DW = dw.data().data();
  for (std::size_t bi = 0; bi < B; ++bi) {
    for (std::size_t co = 0; co < Cout; ++co) {
      const T* g = DY + (bi * Cout + co) * L;
      T gsum = 0;
      for (std::size_t t = 0; t < L; ++t) gsum += g[t];
      db[co] += gsum;
      for (std::size_t ci = 0; ci < Cin; ++ci) {
        const T* xr = X + (bi * Cin + ci) * L;
        T* dxr = DX + (bi * Cin + ci) * L;
        const T* wk = W + (co * Cin + ci) * kConvKernel;
        T* dwk = DW + (co * Cin + ci) * kConvKernel;
        const T w0 = wk[0], w1 = wk[1], w2 = wk[2];
        T s0 = 0, s1 = 0, s2 = 0;
        for (std::size_t t = 0; t < L; ++t) {
          s1 += g[t] * xr[t];
          dxr[t] += w1 * g[t];
        }
        for (std::size_t t = 1; t < L; ++t) {
          s0 += g[t] * xr[t - 1];
          dxr[t - 1] += w0 * g[t];
        }
        for (std::size_t t = 0; t + 1 < L; ++t) {
          s2 += g[t] * xr[t + 1];
          dxr[t + 1] += w2 * g[t];
        }
        dwk[0] += s0;
        dwk[1] += s1;
        dwk[2] += s2;
      }
    }
  }
  return dx;
}

template <typename T>
BasicTensor<T> maxpool1d_forward(const BasicTensor<T>& x, std::vector<std::size_t>& argmax) {
  if (x.rank() != 3 || x.dim(2) < 2) {
    fail(ErrorKind::InvalidShape, "maxpool1d needs [B,C,L] with L >= 2, got " +
                                      shape_string(x.shape()));
  }
  const std::size_t rows = x.dim(0) * x.dim(1), L = x.dim(2), Lo = L / 2;
  BasicTensor<T> y({x.dim(0), x.dim(1), Lo});
  argmax.resize(rows * Lo);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t t = 0; t < Lo; ++t) {
      const std::size_t i0 = r * L + 2 * t;
      const std::size_t pick = x[i0 + 1] > x[i0] ? i0 + 1 : i0;
      y[r * Lo + t] = x[pick];
      argmax[r * Lo + t] = pick;
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> maxpool1d_backward(const Shape& input_shape, const std::vector<std::size_t>& argmax,
                                  const BasicTensor<T>& dy) {
  if (dy.size() != argmax.size()) fail(ErrorKind::InvalidShape, "maxpool1d backward size");
  BasicTensor<T> dx(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) dx[argmax[i]] += dy[i];
  return dx;
}

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                             const BasicTensor<T>& b) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 || x.dim(1) != w.dim(0) ||
      b.dim(0) != w.dim(1)) {
    fail(ErrorKind::InvalidShape, "dense: input " + shape_string(x.shape()) + ", weight " +
                                      shape_string(w.shape()) + ", bias " +
                                      shape_string(b.shape()));
  }
  const std::size_t B = x.dim(0), n = w.dim(0), m = w.dim(1);
  BasicTensor<T> y({B, m});
  const T* X = x.data().data();
  const T* W = w.data().data();
  T* Y = y.data().data();
  for (std::size_t bi = 0; bi < B; ++bi) {
    T* yr = Y + bi * m;
    for (std::size_t j = 0; j < m; ++j) yr[j] = b[j];
    const T* xr = X + bi * n;
    for (std::size_t i = 0; i < n; ++i) {
      const T xi = xr[i];
      if (xi == T{0}) continue;
      const T* wr = W + i * m;
      for (std::size_t j = 0; j < m; ++j) yr[j] += xi * wr[j];
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> dense_backward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                              const BasicTensor<T>& dy, BasicTensor<T>& dw, BasicTensor<T>& db) {
  const std::size_t B = x.dim(0), n = w.dim(0), m = w.dim(1);
  require_same_shape(dy.shape(), Shape{B, m}, "dense backward");
  require_same_shape(dw.shape(), w.shape(), "dense weight grad");
  require_same_shape(db.shape(), Shape{m}, "dense bias grad");
  BasicTensor<T> dx(x.shape());
  const T* X = x.data().data();
  const T* W = w.data().data();
  const T* G = dy.data().data();
  T* DX = dx.data().data();
  T* DW = dw.data().data();
  for (std::size_t bi = 0; bi < B; ++bi) {
    const T* g = G + bi * m;
    for (std::size_t j = 0; j < m; ++j) db[j] += g[j];
    const T* xr = X + bi * n;
    T* dxr = DX + bi * n;
    for (std::size_t i = 0; i < n; ++i) {
      const T* wr = W + i * m;
      T* dwr = DW + i * m;
      const T xi = xr[i];
      T acc = 0;
      for (std::size_t j = 0; j < m; ++j) {
        acc += g[j] * wr[j];
        dwr[j] += xi * g[j];
      }
      dxr[i] = acc;
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Layer base

template <typename T>
Parameter<T>& Layer<T>::parameter(std::string_view name) {
  for (auto& p : params_)
    if (p.name == name) return p;
  fail(ErrorKind::InvalidInput, "no parameter named " + std::string(name));
}

template <typename T>
const Parameter<T>& Layer<T>::parameter(std::string_view name) const {
  for (const auto& p : params_)
    if (p.name == name) return p;
  fail(ErrorKind::InvalidInput, "no parameter named " + std::string(name));
}

template <typename T>
bool Layer<T>::trainable() const noexcept {
  for (const auto& p : params_)
    if (!p.trainable) return false;
  return true;
}

template <typename T>
void Layer<T>::set_trainable(bool trainable) noexcept {
  for (auto& p : params_) p.trainable = trainable;
}

template <typename T>
void Layer<T>::zero_grad() noexcept {
  for (auto& p : params_) p.grad.fill(T{0});
}

template <typename T>
void Layer<T>::require_cache(bool valid, const char* layer) const {
  if (!valid) fail(ErrorKind::InvalidState, std::string(layer) + " backward without Train forward");
}

namespace {

template <typename T>
Parameter<T> make_param(std::string name, BasicTensor<T> value) {
  BasicTensor<T> grad(value.shape());
  return Parameter<T>{std::move(name), std::move(value), std::move(grad), true};
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv1d

template <typename T>
Conv1d<T>::Conv1d(std::size_t in_channels, std::size_t out_channels, Rng& rng) {
  const double limit = glorot_limit(in_channels * kConvKernel, out_channels * kConvKernel);
  this->params_.push_back(
      make_param("weight", uniform<T>(rng, {out_channels, in_channels, kConvKernel}, -limit, limit)));
  this->params_.push_back(make_param("bias", BasicTensor<T>({out_channels})));
}

template <typename T>
Conv1d<T>::Conv1d(BasicTensor<T> weight, BasicTensor<T> bias) {
  if (weight.rank() != 3 || weight.dim(2) != kConvKernel || bias.rank() != 1 ||
      bias.dim(0) != weight.dim(0)) {
    fail(ErrorKind::InvalidShape, "conv1d parameters " + shape_string(weight.shape()) + " / " +
                                      shape_string(bias.shape()));
  }
  this->params_.push_back(make_param("weight", std::move(weight)));
  this->params_.push_back(make_param("bias", std::move(bias)));
}

template <typename T>
BasicTensor<T> Conv1d<T>::forward(const BasicTensor<T>& x, Phase phase, Rng&) {
  auto y = conv1d_forward(x, this->params_[0].value, this->params_[1].value);
  cached_ = phase == Phase::Train;
  if (cached_) input_ = x;
  return y;
}

template <typename T>
BasicTensor<T> Conv1d<T>::backward(const BasicTensor<T>& dy) {
  this->require_cache(cached_, "conv1d");
  return conv1d_backward(input_, this->params_[0].value, dy, this->params_[0].grad,
                         this->params_[1].grad);
}

// ---------------------------------------------------------------------------
// MaxPool1d

template <typename T>
BasicTensor<T> MaxPool1d<T>::forward(const BasicTensor<T>& x, Phase phase, Rng&) {
  auto y = maxpool1d_forward(x, argmax_);
  cached_ = phase == Phase::Train;
  input_shape_ = x.shape();
  return y;
}

template <typename T>
BasicTensor<T> MaxPool1d<T>::backward(const BasicTensor<T>& dy) {
  this->require_cache(cached_, "maxpool1d");
  return maxpool1d_backward(input_shape_, argmax_, dy);
}

// ---------------------------------------------------------------------------
// ReLU

template <typename T>
BasicTensor<T> ReLU<T>::forward(const BasicTensor<T>& x, Phase phase, Rng&) {
  BasicTensor<T> y = x;
  cached_ = phase == Phase::Train;
  if (cached_) {
    positive_.resize(x.size());
    shape_ = x.shape();
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool pos = y[i] > T{0};
    if (!pos) y[i] = T{0};
    if (cached_) positive_[i] = pos;
  }
  return y;
}

template <typename T>
BasicTensor<T> ReLU<T>::backward(const BasicTensor<T>& dy) {
  this->require_cache(cached_, "relu");
  require_same_shape(dy.shape(), shape_, "relu backward");
  BasicTensor<T> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!positive_[i]) dx[i] = T{0};
  return dx;
}

// ---------------------------------------------------------------------------
// Dropout

template <typename T>
Dropout<T>::Dropout(double p) : p_(p) {
  if (!(p >= 0.0 && p < 1.0)) fail(ErrorKind::InvalidRange, "dropout probability must be in [0,1)");
}

template <typename T>
BasicTensor<T> Dropout<T>::forward(const BasicTensor<T>& x, Phase phase, Rng& rng) {
  if (phase == Phase::Eval || p_ == 0.0) {
    cached_ = phase == Phase::Train;
    if (cached_) mask_ = BasicTensor<T>::ones(x.shape());
    return x;
  }
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p_));
  mask_ = BasicTensor<T>(x.shape());
  BasicTensor<T> y = x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const T m = rng.next_double() < p_ ? T{0} : keep_scale;
    mask_[i] = m;
    y[i] *= m;
  }
  cached_ = true;
  return y;
}

template <typename T>
BasicTensor<T> Dropout<T>::backward(const BasicTensor<T>& dy) {
  this->require_cache(cached_, "dropout");
  return mul(dy, mask_);
}

// ---------------------------------------------------------------------------
// Flatten

template <typename T>
BasicTensor<T> Flatten<T>::forward(const BasicTensor<T>& x, Phase phase, Rng&) {
  if (x.rank() < 2) fail(ErrorKind::InvalidShape, "flatten needs a batch axis");
  input_shape_ = x.shape();
  cached_ = phase == Phase::Train;
  return x.reshaped({x.dim(0), x.size() / x.dim(0)});
}

template <typename T>
BasicTensor<T> Flatten<T>::backward(const BasicTensor<T>& dy) {
  this->require_cache(cached_, "flatten");
  return dy.reshaped(input_shape_);
}

// ---------------------------------------------------------------------------
// Dense

template <typename T>
Dense<T>::Dense(std::size_t inputs, std::size_t outputs, Rng& rng) {
  const double limit = glorot_limit(inputs, outputs);
  this->params_.push_back(make_param("weight", uniform<T>(rng, {inputs, outputs}, -limit, limit)));
  this->params_.push_back(make_param("bias", BasicTensor<T>({outputs})));
}

template <typename T>
Dense<T>::Dense(BasicTensor<T> weight, BasicTensor<T> bias) {
  if (weight.rank() != 2 || bias.rank() != 1 || bias.dim(0) != weight.dim(1)) {
    fail(ErrorKind::InvalidShape, "dense parameters " + shape_string(weight.shape()) + " / " +
                                      shape_string(bias.shape()));
  }
  this->params_.push_back(make_param("weight", std::move(weight)));
  this->params_.push_back(make_param("bias", std::move(bias)));
}

template <typename T>
BasicTensor<T> Dense<T>::forward(const BasicTensor<T>& x, Phase phase, Rng&) {
  auto y = dense_forward(x, this->params_[0].value, this->params_[1].value);
  cached_ = phase == Phase::Train;
  if (cached_) input_ = x;
  return y;
}

template <typename T>
BasicTensor<T> Dense<T>::backward(const BasicTensor<T>& dy) {
  this->require_cache(cached_, "dense");
  return dense_backward(input_, this->params_[0].value, dy, this->params_[0].grad,
                        this->params_[1].grad);
}

#define GAITMIND_INSTANTIATE(T)                                                                  \
  template BasicTensor<T> conv1d_forward<T>(const BasicTensor<T>&, const BasicTensor<T>&,        \
                                            const BasicTensor<T>&);                              \
  template BasicTensor<T> conv1d_backward<T>(const BasicTensor<T>&, const BasicTensor<T>&,       \
                                             const BasicTensor<T>&, BasicTensor<T>&,             \
                                             BasicTensor<T>&);                                   \
  template BasicTensor<T> maxpool1d_forward<T>(const BasicTensor<T>&, std::vector<std::size_t>&); \
  template BasicTensor<T> maxpool1d_backward<T>(const Shape&, const std::vector<std::size_t>&,   \
                                                const BasicTensor<T>&);                          \
  template BasicTensor<T> dense_forward<T>(const BasicTensor<T>&, const BasicTensor<T>&,         \
                                           const BasicTensor<T>&);                               \
  template BasicTensor<T> dense_backward<T>(const BasicTensor<T>&, const BasicTensor<T>&,        \
                                            const BasicTensor<T>&, BasicTensor<T>&,              \
                                            BasicTensor<T>&);                                    \
  template class Layer<T>;                                                                       \
  template class Conv1d<T>;                                                                      \
  template class MaxPool1d<T>;                                                                   \
  template class ReLU<T>;                                                                        \
  template class Dropout<T>;                                                                     \
  template class Flatten<T>;                                                                     \
  template class Dense<T>;

GAITMIND_INSTANTIATE(float)
GAITMIND_INSTANTIATE(double)

#undef GAITMIND_INSTANTIATE

}  // namespace gaitmind
