#include <gtest/gtest.h>

#include <cmath>

#include "gaitmind/error.hpp"
#include "gaitmind/loss.hpp"
#include "gaitmind/optim.hpp"
#include "support/gradcheck.hpp"

using namespace gaitmind;

TEST(Loss, LargeMarginIsStable) {
  // log(1 + e^-20)
  const Tensor64 z({1, 2}, {20.0, 0.0});
  const std::vector<int> y{0};
  const auto r = weighted_cross_entropy(z, y, ClassWeights::uniform(2));
  EXPECT_NEAR(r.loss, 2.061153620314381e-9, 1e-22);
  const Tensor64 big({1, 3}, {1000.0, -1000.0, 0.0});
  const std::vector<int> y2{1};
  const auto r2 = weighted_cross_entropy(big, y2, ClassWeights::uniform(3));
  EXPECT_NEAR(r2.loss, 2000.0, 1e-9);
  EXPECT_TRUE(std::isfinite(r2.dlogits[0]));
}

TEST(Loss, UniformLogitsGiveLogC) {
  const Tensor64 z({3, 10});
  const std::vector<int> y{0, 4, 9};
  EXPECT_NEAR(weighted_cross_entropy(z, y, ClassWeights::uniform(10)).loss, std::log(10.0), 1e-12);
}

TEST(Loss, WeightedMeanHandFixture) {
  // Row 0: [0, 0] -> ln 2 with weight 1. Row 1: [ln 3, 0], target 1 -> ln 4 with weight 3.
  const Tensor64 z({2, 2}, {0.0, 0.0, std::log(3.0), 0.0});
  const std::vector<int> y{0, 1};
  const auto r = weighted_cross_entropy(z, y, ClassWeights({1.0, 3.0}));
  EXPECT_NEAR(r.loss, 7.0 / 4.0 * std::log(2.0), 1e-12);
}

TEST(Loss, ZeroSelectedWeightsGiveZero) {
  const Tensor64 z({2, 2}, {1.0, 2.0, 3.0, 4.0});
  const std::vector<int> y{0, 0};
  const auto r = weighted_cross_entropy(z, y, ClassWeights({0.0, 1.0}));
  EXPECT_EQ(r.loss, 0.0);
  for (double g : r.dlogits.values()) EXPECT_EQ(g, 0.0);
}

TEST(Loss, InvalidInputs) {
  const Tensor64 z({1, 3});
  const std::vector<int> bad{3};
  try {
    weighted_cross_entropy(z, bad, ClassWeights::uniform(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidLabel);
  }
  const std::vector<int> neg{-1};
  EXPECT_THROW(weighted_cross_entropy(z, neg, ClassWeights::uniform(3)), Error);
  const std::vector<int> ok{0};
  EXPECT_THROW(weighted_cross_entropy(z, ok, ClassWeights::uniform(2)), Error);
  EXPECT_THROW(ClassWeights({-1.0, 1.0}), Error);
  EXPECT_THROW(ClassWeights({0.0, 0.0}), Error);
}

TEST(Loss, GradientMatchesFiniteDifferences) {
  Rng rng(21);
  for (int i = 0; i < 10; ++i) {
    const std::size_t B = 1 + rng.below(5), C = 2 + rng.below(9);
    const auto z = uniform<double>(rng, {B, C}, -3, 3);
    std::vector<int> y(B);
    for (auto& t : y) t = static_cast<int>(rng.below(C));
    std::vector<double> w(C);
    for (auto& v : w) v = rng.uniform(0.1, 3.0);
    EXPECT_LT(gaitmind::testing::check_loss(z, y, ClassWeights(w)), 1e-4);
  }
}

TEST(ClassWeights, InverseFrequency) {
  const std::vector<std::size_t> counts{45, 5};
  const auto w = class_weights_from_counts(counts);
  EXPECT_NEAR(w[0], 50.0 / 90.0, 1e-12);
  EXPECT_NEAR(w[1], 5.0, 1e-12);
  const std::vector<std::size_t> gaps{10, 0, 30};
  const auto g = class_weights_from_counts(gaps);
  EXPECT_NEAR(g[0], 2.0, 1e-12);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_NEAR(g[2], 40.0 / 60.0, 1e-12);
  // Weighted class totals are equal across present classes.
  EXPECT_NEAR(g[0] * 10, g[2] * 30, 1e-9);
}

TEST(Optim, SgdStepIsExact) {
  Parameter<double> p{"w", Tensor64({3}, {1, 2, 3}), Tensor64({3}, {0.5, -1, 2}), true};
  Parameter<double> frozen{"f", Tensor64({1}, {7}), Tensor64({1}, {100}), false};
  Sgd<double> sgd(0.1);
  std::vector<Parameter<double>*> ps{&p, &frozen};
  sgd.step(ps);
  EXPECT_NEAR(p.value[0], 0.95, 1e-15);
  EXPECT_NEAR(p.value[1], 2.1, 1e-15);
  EXPECT_NEAR(p.value[2], 2.8, 1e-15);
  EXPECT_EQ(frozen.value[0], 7.0);
}

TEST(Optim, AdamFirstStepIsSignedLr) {
  Parameter<double> p{"w", Tensor64({3}, {0, 0, 0}), Tensor64({3}, {0.3, -2.0, 1e-3}), true};
  Adam<double> adam(AdamConfig{0.01});
  std::vector<Parameter<double>*> ps{&p};
  adam.step(ps);
  EXPECT_EQ(adam.steps(), 1u);
  EXPECT_NEAR(p.value[0], -0.01, 1e-9);
  EXPECT_NEAR(p.value[1], 0.01, 1e-9);
  EXPECT_NEAR(p.value[2], -0.01 * 1e-3 / (1e-3 + 1e-8), 1e-12);
}

TEST(Optim, AdamTwoStepsByHand) {
  Parameter<double> p{"w", Tensor64({1}, {1.0}), Tensor64({1}, {1.0}), true};
  Adam<double> adam(AdamConfig{0.1});
  std::vector<Parameter<double>*> ps{&p};
  adam.step(ps);
  p.grad[0] = -1.0;
  adam.step(ps);
  // t=2: m = 0.9*0.1 - 0.1 = -0.01; v = 0.999*0.001 + 0.001 = 0.001999
  const double mhat = -0.01 / (1 - 0.81), vhat = 0.001999 / (1 - 0.998001);
  EXPECT_NEAR(p.value[0], 1.0 - 0.1 / (1.0 + 1e-8) - 0.1 * mhat / (std::sqrt(vhat) + 1e-8), 1e-12);
  EXPECT_EQ(adam.steps(), 2u);
}

TEST(Optim, AdamSkipsFrozenAndCountsOncePerStep) {
  Parameter<double> a{"a", Tensor64({2}, {1, 1}), Tensor64({2}, {1, 1}), true};
  Parameter<double> b{"b", Tensor64({2}, {1, 1}), Tensor64({2}, {1, 1}), false};
  Adam<double> adam(AdamConfig{0.1});
  std::vector<Parameter<double>*> ps{&a, &b};
  for (int i = 0; i < 3; ++i) adam.step(ps);
  EXPECT_EQ(adam.steps(), 3u);
  EXPECT_EQ(b.value[0], 1.0);
  EXPECT_LT(a.value[0], 1.0);
}

TEST(Optim, FactoryAndValidation) {
  EXPECT_EQ(make_optimizer<float>(OptimizerKind::Sgd, 0.1)->kind(), OptimizerKind::Sgd);
  EXPECT_EQ(make_optimizer<float>(OptimizerKind::Adam, 0.1)->kind(), OptimizerKind::Adam);
  EXPECT_THROW(make_optimizer<float>(OptimizerKind::Sgd, 0.0), Error);
  EXPECT_EQ(parse_optimizer("adam"), OptimizerKind::Adam);
  EXPECT_THROW(parse_optimizer("rmsprop"), Error);
}
