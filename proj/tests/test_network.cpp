#include <gtest/gtest.h>

#include <cstring>

#include "gaitmind/error.hpp"
#include "gaitmind/network.hpp"
#include "support/arch.hpp"
#include "support/fixtures.hpp"

using namespace gaitmind;
using gaitmind::testing::TempDir;

namespace {

NetworkSpec small_spec(Arch arch = Arch::Ind) {
  NetworkSpec s;
  s.arch = arch;
  s.in_channels = 3;
  s.window_len = 16;
  s.block_channels = {4, 8};
  s.hidden_width = 6;
  return s;
}

ErrorKind load_error(const std::filesystem::path& p, const std::optional<NetworkSpec>& expected = std::nullopt) {
  try {
    load_weights(p, expected);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidState;
}

}  // namespace

TEST(NetworkSpec, StandardTopologies) {
  const auto dep = NetworkSpec::standard(Arch::Dep, 6, 250);
  EXPECT_EQ(dep.block_channels, (std::vector<std::size_t>{64, 128, 256, 512}));
  EXPECT_EQ(dep.hidden_width, 1024u);
  EXPECT_EQ(dep.block_lengths(), (std::vector<std::size_t>{125, 62, 31, 15}));
  EXPECT_EQ(dep.flatten_width(), 7680u);
  EXPECT_EQ(dep.parameter_count(), 9443402u);

  const auto ind = NetworkSpec::standard(Arch::Ind, 6, 250);
  EXPECT_EQ(ind.block_channels, (std::vector<std::size_t>{64, 128, 256, 512, 1024}));
  EXPECT_EQ(ind.hidden_width, 2048u);
  EXPECT_EQ(ind.block_lengths(), (std::vector<std::size_t>{125, 62, 31, 15, 7}));
  EXPECT_EQ(ind.flatten_width(), 7168u);
  EXPECT_EQ(ind.parameter_count(), 20991050u);
}

TEST(NetworkSpec, TooShortWindowIsAConfigError) {
  auto s = NetworkSpec::standard(Arch::Ind, 6, 20);
  try {
    s.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
  }
}

TEST(Network, LayerSequenceMatchesRecipe) {
  Rng rng(1);
  const Network net(small_spec(), rng);
  EXPECT_EQ(gaitmind::testing::describe(net), gaitmind::testing::reference_layers(3, {4, 8}, 8 * 4, 6));
  EXPECT_EQ(net.parameter_count(), net.spec().parameter_count());
  EXPECT_EQ(net.parameter_names().front(), "block0.conv.weight");
  EXPECT_EQ(net.parameter_names().back(), "fc3.bias");
}

TEST(Network, ForwardShapesAndValidation) {
  Rng rng(2);
  Network net(small_spec(), rng);
  const auto x = uniform<float>(rng, {5, 3, 16}, -1, 1);
  EXPECT_EQ(net.predict(x).shape(), (Shape{5, 10}));
  EXPECT_EQ(net.forward(x, Phase::Train, rng).shape(), (Shape{5, 10}));
  try {
    net.predict(Tensor({1, 4, 16}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidShape);
  }
  EXPECT_THROW(net.predict(Tensor({1, 3, 15})), Error);
}

TEST(Network, EvalIsDeterministicAndBatchInvariant) {
  Rng rng(3);
  Network net(small_spec(), rng);
  const auto x = uniform<float>(rng, {4, 3, 16}, -1, 1);
  const auto all = net.predict(x);
  EXPECT_EQ(all, net.predict(x));
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<float> one(x.data().begin() + i * 48, x.data().begin() + (i + 1) * 48);
    const auto y = net.predict(Tensor({1, 3, 16}, one));
    for (std::size_t c = 0; c < 10; ++c) EXPECT_FLOAT_EQ(y[c], all[i * 10 + c]);
  }
}

TEST(Network, CopiesAreDeep) {
  Rng rng(4);
  Network a(small_spec(), rng);
  Network b = a;
  b.parameters()[0]->value[0] += 1.0f;
  EXPECT_NE(a.parameters()[0]->value[0], b.parameters()[0]->value[0]);
}

TEST(Network, SnapshotRestore) {
  Rng rng(5);
  Network net(small_spec(), rng);
  const auto snap = net.snapshot();
  for (auto* p : net.parameters()) p->value.fill(0.0f);
  net.restore(snap);
  const auto params = net.parameters();
  for (std::size_t i = 0; i < snap.size(); ++i) EXPECT_EQ(params[i]->value, snap[i]);
  EXPECT_THROW(net.restore({}), Error);
}

TEST(TransferSurgery, FreezesConvAndResetsHead) {
  Rng rng(6);
  const Network pre(small_spec(), rng);
  Rng r2(7);
  Network tl = transfer_surgery(pre, r2, true);
  const auto pc = pre.conv_parameters();
  const auto tc = tl.conv_parameters();
  ASSERT_EQ(pc.size(), tc.size());
  for (std::size_t i = 0; i < pc.size(); ++i) {
    EXPECT_EQ(pc[i]->value, tc[i]->value);
    EXPECT_FALSE(tc[i]->trainable);
  }
  bool head_differs = false;
  const auto ph = pre.head_parameters();
  const auto th = tl.head_parameters();
  for (std::size_t i = 0; i < ph.size(); ++i) {
    EXPECT_TRUE(th[i]->trainable);
    head_differs |= !(ph[i]->value == th[i]->value);
  }
  EXPECT_TRUE(head_differs);

  Rng r3(8);
  const Network keep = transfer_surgery(pre, r3, false);
  for (std::size_t i = 0; i < ph.size(); ++i) EXPECT_EQ(keep.head_parameters()[i]->value, ph[i]->value);

  Rng r4(9);
  const Network dep(small_spec(Arch::Dep), r4);
  EXPECT_THROW(transfer_surgery(dep, r4), Error);
}

TEST(TransferSurgery, BackwardLeavesFrozenGradientsZero) {
  Rng rng(10);
  const Network pre(small_spec(), rng);
  Network tl = transfer_surgery(pre, rng);
  tl.zero_grad();
  const auto x = uniform<float>(rng, {2, 3, 16}, -1, 1);
  const auto y = tl.forward(x, Phase::Train, rng);
  tl.backward(Tensor::ones(y.shape()));
  for (const auto* p : tl.conv_parameters())
    for (float g : p->grad.values()) EXPECT_EQ(g, 0.0f);
  float head_grad = 0.0f;
  for (const auto* p : tl.head_parameters())
    for (float g : p->grad.values()) head_grad += std::abs(g);
  EXPECT_GT(head_grad, 0.0f);
}

TEST(WeightsIo, RoundTripIsExact) {
  TempDir dir("weights");
  Rng rng(11);
  Network net(small_spec(), rng);
  Network tl = transfer_surgery(net, rng);
  save_weights(tl, dir / "m.gmwt");
  const Network back = load_weights(dir / "m.gmwt", tl.spec());
  EXPECT_EQ(back.spec(), tl.spec());
  const auto a = tl.parameters();
  const auto b = back.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->value, b[i]->value);
    EXPECT_EQ(a[i]->trainable, b[i]->trainable);
  }
  // Saving again gives the same bytes.
  save_weights(back, dir / "m2.gmwt");
  EXPECT_EQ(gaitmind::testing::slurp(dir / "m.gmwt"), gaitmind::testing::slurp(dir / "m2.gmwt"));
}

TEST(WeightsIo, CorruptFilesAreRejected) {
  TempDir dir("corrupt");
  Rng rng(12);
  Network net(small_spec(), rng);
  save_weights(net, dir / "ok.gmwt");
  const std::string good = gaitmind::testing::slurp(dir / "ok.gmwt");

  EXPECT_EQ(load_error(dir / "missing.gmwt"), ErrorKind::CorruptFile);

  std::string bad = good;
  bad[0] = 'X';
  gaitmind::testing::spit(dir / "magic.gmwt", bad);
  EXPECT_EQ(load_error(dir / "magic.gmwt"), ErrorKind::CorruptFile);

  gaitmind::testing::spit(dir / "short.gmwt", good.substr(0, good.size() - 3));
  EXPECT_EQ(load_error(dir / "short.gmwt"), ErrorKind::CorruptFile);

  gaitmind::testing::spit(dir / "long.gmwt", good + "xx");
  EXPECT_EQ(load_error(dir / "long.gmwt"), ErrorKind::CorruptFile);

  gaitmind::testing::spit(dir / "head.gmwt", good.substr(0, 10));
  EXPECT_EQ(load_error(dir / "head.gmwt"), ErrorKind::CorruptFile);

  std::string json_broken = good;
  json_broken[13] = '#';
  gaitmind::testing::spit(dir / "json.gmwt", json_broken);
  EXPECT_EQ(load_error(dir / "json.gmwt"), ErrorKind::CorruptFile);

  auto other = small_spec();
  other.hidden_width = 7;
  EXPECT_EQ(load_error(dir / "ok.gmwt", other), ErrorKind::CorruptFile);
}
