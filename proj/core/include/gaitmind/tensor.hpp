#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "gaitmind/rng.hpp"

namespace gaitmind {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major n-dimensional array.
///
/// The last axis is contiguous: element (i0, i1, ..., ik) lives at
/// ((i0 * d1 + i1) * d2 + ...) * dk + ik. The weight-file format relies on
/// this ordering. Training uses Tensor (float); gradient checks use
/// Tensor64 (double).
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;
  /// Zero-filled. Every extent must be >= 1.
  explicit BasicTensor(Shape shape);
  BasicTensor(Shape shape, std::vector<T> data);

  static BasicTensor zeros(Shape shape);
  static BasicTensor ones(Shape shape);
  static BasicTensor full(Shape shape, T value);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(std::initializer_list<std::size_t> index);
  const T& at(std::initializer_list<std::size_t> index) const;

  /// Same data, new shape with equal element count.
  BasicTensor reshaped(Shape shape) const;

  void fill(T value);
  T sum() const;

  template <typename U>
  BasicTensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return BasicTensor<U>(shape_, std::move(out));
  }

  friend bool operator==(const BasicTensor& a, const BasicTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

template <typename T>
BasicTensor<T> zeros(Shape shape) {
  return BasicTensor<T>::zeros(std::move(shape));
}

template <typename T>
BasicTensor<T> ones(Shape shape) {
  return BasicTensor<T>::ones(std::move(shape));
}

/// i.i.d. uniform entries on [lo, hi), consuming rng.
template <typename T>
BasicTensor<T> uniform(Rng& rng, Shape shape, double lo, double hi);

/// [m,k] x [k,n] -> [m,n].
template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b);

/// 2-D transpose.
template <typename T>
BasicTensor<T> transpose(const BasicTensor<T>& a);

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor);

void require_same_shape(const Shape& a, const Shape& b, const char* what);

}  // namespace gaitmind
