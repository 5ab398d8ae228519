#include <gtest/gtest.h>

#include "gaitmind/error.hpp"
#include "gaitmind/layers.hpp"
#include "support/gradcheck.hpp"

using namespace gaitmind;
using gaitmind::testing::check_layer;
using gaitmind::testing::well_separated;

namespace {

/// Direct definition of zero-padded cross-correlation.
Tensor64 conv_oracle(const Tensor64& x, const Tensor64& w, const Tensor64& b) {
  const std::size_t B = x.dim(0), Ci = x.dim(1), L = x.dim(2), Co = w.dim(0);
  Tensor64 y({B, Co, L});
  for (std::size_t n = 0; n < B; ++n)
    for (std::size_t o = 0; o < Co; ++o)
      for (std::size_t t = 0; t < L; ++t) {
        double s = b[o];
        for (std::size_t c = 0; c < Ci; ++c)
          for (std::size_t k = 0; k < 3; ++k) {
            const long pos = static_cast<long>(t) + static_cast<long>(k) - 1;
            if (pos < 0 || pos >= static_cast<long>(L)) continue;
            s += w.at({o, c, k}) * x.at({n, c, static_cast<std::size_t>(pos)});
          }
        y.at({n, o, t}) = s;
      }
  return y;
}

}  // namespace

TEST(Conv1d, ForwardMatchesDirectLoops) {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t B = 1 + rng.below(3), Ci = 1 + rng.below(4), Co = 1 + rng.below(5), L = 1 + rng.below(12);
    const auto x = uniform<double>(rng, {B, Ci, L}, -1, 1);
    const auto w = uniform<double>(rng, {Co, Ci, 3}, -1, 1);
    const auto b = uniform<double>(rng, {Co}, -1, 1);
    const auto y = conv1d_forward(x, w, b);
    const auto ref = conv_oracle(x, w, b);
    ASSERT_EQ(y.shape(), ref.shape());
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-12);
  }
}

TEST(Conv1d, HandExample) {
  // One channel, kernel [1, 2, 3], bias 0.5, input [1, 2, 3, 4].
  const Tensor64 x({1, 1, 4}, {1, 2, 3, 4});
  const Tensor64 w({1, 1, 3}, {1, 2, 3});
  const Tensor64 b({1}, {0.5});
  const auto y = conv1d_forward(x, w, b);
  EXPECT_EQ(y.values(), (std::vector<double>{8.5, 14.5, 20.5, 11.5}));
}

TEST(Conv1d, GlorotInitBoundsAndZeroBias) {
  Rng rng(2);
  Conv1d<float> conv(6, 64, rng);
  const float limit = static_cast<float>(glorot_limit(6 * 3, 64 * 3));
  for (float v : conv.parameter("weight").value.values()) EXPECT_LE(std::abs(v), limit);
  for (float v : conv.parameter("bias").value.values()) EXPECT_EQ(v, 0.0f);
  EXPECT_EQ(conv.parameter("weight").value.shape(), (Shape{64, 6, 3}));
}

TEST(MaxPool1d, FloorLengthAndTies) {
  const Tensor64 x({1, 1, 5}, {3, 3, 1, 2, 9});
  std::vector<std::size_t> argmax;
  const auto y = maxpool1d_forward(x, argmax);
  EXPECT_EQ(y.shape(), (Shape{1, 1, 2}));
  EXPECT_EQ(y.values(), (std::vector<double>{3, 2}));
  EXPECT_EQ(argmax, (std::vector<std::size_t>{0, 3}));
  const auto dx = maxpool1d_backward(x.shape(), argmax, Tensor64({1, 1, 2}, {10, 20}));
  EXPECT_EQ(dx.values(), (std::vector<double>{10, 0, 0, 20, 0}));
}

TEST(Dropout, IdentityInEvalAndAtZero) {
  Rng rng(3);
  const auto x = uniform<double>(rng, {4, 8}, -1, 1);
  Dropout<double> d(0.5);
  EXPECT_EQ(d.forward(x, Phase::Eval, rng), x);
  Dropout<double> zero(0.0);
  EXPECT_EQ(zero.forward(x, Phase::Train, rng), x);
  EXPECT_THROW(Dropout<double>(1.0), Error);
  EXPECT_THROW(Dropout<double>(-0.1), Error);
}

TEST(Dropout, InvertedScalingKeepsMean) {
  Rng rng(4);
  const auto x = Tensor64::ones({100000});
  Dropout<double> d(0.2);
  const auto y = d.forward(x, Phase::Train, rng);
  std::size_t zeros = 0;
  for (double v : y.values()) {
    if (v == 0.0) ++zeros;
    else EXPECT_DOUBLE_EQ(v, 1.25);
  }
  EXPECT_NEAR(zeros / 100000.0, 0.2, 0.01);
  EXPECT_NEAR(y.sum() / 100000.0, 1.0, 0.02);
}

TEST(Layers, BackwardWithoutTrainForwardIsAnError) {
  Rng rng(5);
  const auto x = uniform<double>(rng, {1, 2, 4}, -1, 1);
  ReLU<double> relu;
  try {
    relu.backward(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidState);
  }
  relu.forward(x, Phase::Eval, rng);
  EXPECT_THROW(relu.backward(x), Error);
  Conv1d<double> conv(2, 3, rng);
  conv.forward(x, Phase::Eval, rng);
  EXPECT_THROW(conv.backward(Tensor64({1, 3, 4})), Error);
}

TEST(Layers, ShapeErrors) {
  Rng rng(6);
  Conv1d<double> conv(2, 3, rng);
  EXPECT_THROW(conv.forward(Tensor64({1, 3, 4}), Phase::Train, rng), Error);
  Dense<double> dense(4, 2, rng);
  EXPECT_THROW(dense.forward(Tensor64({2, 5}), Phase::Train, rng), Error);
}

TEST(Flatten, ChannelMajor) {
  Rng rng(7);
  const Tensor64 x({1, 2, 3}, {1, 2, 3, 4, 5, 6});
  Flatten<double> f;
  const auto y = f.forward(x, Phase::Train, rng);
  EXPECT_EQ(y.shape(), (Shape{1, 6}));
  EXPECT_EQ(y.values(), x.values());
  EXPECT_EQ(f.backward(y).shape(), x.shape());
}

TEST(Dense, HandExample) {
  const Tensor64 x({1, 2}, {1, 2});
  const Tensor64 w({2, 3}, {1, 0, -1, 2, 1, 0});
  const Tensor64 b({3}, {0, 0, 1});
  EXPECT_EQ(dense_forward(x, w, b).values(), (std::vector<double>{5, 2, 0}));
}

// Finite-difference agreement on random shapes. The acceptance binary runs
// the full sweep; these keep a fast version in the unit suite.

TEST(GradCheck, Conv1d) {
  Rng rng(10);
  for (int i = 0; i < 5; ++i) {
    const std::size_t B = 1 + rng.below(2), Ci = 1 + rng.below(3), Co = 1 + rng.below(3), L = 2 + rng.below(6);
    Conv1d<double> layer(Ci, Co, rng);
    for (auto& v : layer.parameter("bias").value.data()) v = rng.uniform(-0.5, 0.5);
    EXPECT_LT(check_layer(layer, uniform<double>(rng, {B, Ci, L}, -1, 1), Rng(i), rng), 1e-4);
  }
}

TEST(GradCheck, PoolReluDropoutDense) {
  Rng rng(11);
  for (int i = 0; i < 5; ++i) {
    const std::size_t B = 1 + rng.below(2), C = 1 + rng.below(3), L = 2 * (1 + rng.below(4));
    MaxPool1d<double> pool;
    EXPECT_LT(check_layer(pool, well_separated(rng, {B, C, L}), Rng(i), rng), 1e-4);
    ReLU<double> relu;
    EXPECT_LT(check_layer(relu, well_separated(rng, {B, C, L}), Rng(i), rng), 1e-4);
    Dropout<double> drop(0.3);
    EXPECT_LT(check_layer(drop, uniform<double>(rng, {B, C, L}, -1, 1), Rng(100 + i), rng), 1e-4);
    Dense<double> dense(C * L, 1 + rng.below(4), rng);
    EXPECT_LT(check_layer(dense, uniform<double>(rng, {B, C * L}, -1, 1), Rng(i), rng), 1e-4);
  }
}

TEST(Parameters, TrainableFlags) {
  Rng rng(12);
  Dense<float> d(3, 2, rng);
  EXPECT_TRUE(d.trainable());
  d.set_trainable(false);
  EXPECT_FALSE(d.trainable());
  for (const auto& p : d.parameters()) EXPECT_FALSE(p.trainable);
  EXPECT_THROW(d.parameter("nope"), Error);
  ReLU<float> relu;
  EXPECT_FALSE(relu.has_parameters());
}
