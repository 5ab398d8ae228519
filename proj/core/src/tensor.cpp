#include "gaitmind/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gaitmind/error.hpp"

namespace gaitmind {

std::size_t shape_size(const Shape& shape) {
  if (shape.empty()) fail(ErrorKind::InvalidShape, "tensor shape must have at least one axis");
  std::size_t n = 1;
  for (auto extent : shape) {
    if (extent == 0) fail(ErrorKind::InvalidShape, "zero extent in shape " + shape_string(shape));
    n *= extent;
  }
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    fail(ErrorKind::InvalidShape,
         std::string(what) + ": shape " + shape_string(a) + " vs " + shape_string(b));
  }
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape) : shape_(std::move(shape)), data_(shape_size(shape_), T{0}) {}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size()) {
    fail(ErrorKind::InvalidShape, "shape " + shape_string(shape_) + " does not match " +
                                      std::to_string(data_.size()) + " values");
  }
}

template <typename T>
BasicTensor<T> BasicTensor<T>::zeros(Shape shape) {
  return BasicTensor(std::move(shape));
}

template <typename T>
BasicTensor<T> BasicTensor<T>::ones(Shape shape) {
  return full(std::move(shape), T{1});
}

template <typename T>
BasicTensor<T> BasicTensor<T>::full(Shape shape, T value) {
  BasicTensor t(std::move(shape));
  t.fill(value);
  return t;
}

template <typename T>
std::size_t BasicTensor<T>::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    fail(ErrorKind::InvalidShape, "index rank does not match tensor rank");
  }
  std::size_t off = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= shape_[axis]) fail(ErrorKind::InvalidShape, "index out of bounds");
    off = off * shape_[axis] + i;
    ++axis;
  }
  return off;
}

template <typename T>
T& BasicTensor<T>::at(std::initializer_list<std::size_t> index) {
  return data_[offset(index)];
}

template <typename T>
const T& BasicTensor<T>::at(std::initializer_list<std::size_t> index) const {
  return data_[offset(index)];
}

template <typename T>
BasicTensor<T> BasicTensor<T>::reshaped(Shape shape) const {
  return BasicTensor(std::move(shape), data_);
}

template <typename T>
void BasicTensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
T BasicTensor<T>::sum() const {
  return std::accumulate(data_.begin(), data_.end(), T{0});
}

template <typename T>
BasicTensor<T> uniform(Rng& rng, Shape shape, double lo, double hi) {
  if (!(lo < hi)) fail(ErrorKind::InvalidRange, "uniform requires lo < hi");
  BasicTensor<T> t(std::move(shape));
  for (auto& v : t.data()) {
    v = static_cast<T>(rng.uniform(lo, hi));
    // float rounding of a double just below hi can produce hi itself
    if (!(v < static_cast<T>(hi))) v = std::nextafter(static_cast<T>(hi), static_cast<T>(lo));
  }
  return t;
}

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    fail(ErrorKind::InvalidShape,
         "matmul " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  BasicTensor<T> c({m, n});
  auto A = a.data();
  auto B = b.data();
  auto C = c.data();
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = C.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = A[i * k + p];
      const T* brow = B.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  return c;
}

template <typename T>
BasicTensor<T> transpose(const BasicTensor<T>& a) {
  if (a.rank() != 2) fail(ErrorKind::InvalidShape, "transpose needs a 2-D tensor");
  const std::size_t r = a.dim(0), c = a.dim(1);
  BasicTensor<T> t({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) t[j * r + i] = a[i * c + j];
  return t;
}

template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "add");
  BasicTensor<T> out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "mul");
  BasicTensor<T> out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor) {
  BasicTensor<T> out = a;
  for (auto& v : out.data()) v *= factor;
  return out;
}

#define GAITMIND_INSTANTIATE(T)                                                          \
  template class BasicTensor<T>;                                                         \
  template BasicTensor<T> uniform<T>(Rng&, Shape, double, double);                       \
  template BasicTensor<T> matmul<T>(const BasicTensor<T>&, const BasicTensor<T>&);       \
  template BasicTensor<T> transpose<T>(const BasicTensor<T>&);                           \
  template BasicTensor<T> add<T>(const BasicTensor<T>&, const BasicTensor<T>&);          \
  template BasicTensor<T> mul<T>(const BasicTensor<T>&, const BasicTensor<T>&);          \
  template BasicTensor<T> scale<T>(const BasicTensor<T>&, T);

GAITMIND_INSTANTIATE(float)
GAITMIND_INSTANTIATE(double)

#undef GAITMIND_INSTANTIATE

}  // namespace gaitmind
