#include <gtest/gtest.h>

#include <cstring>

#include "gaitmind/error.hpp"
#include "gaitmind/protocols.hpp"
#include "gaitmind/synth.hpp"
#include "support/fixtures.hpp"

using namespace gaitmind;
using gaitmind::testing::make_sample;

namespace {

NetworkSpec toy_spec(Arch arch = Arch::Ind) {
  NetworkSpec s;
  s.arch = arch;
  s.in_channels = 2;
  s.window_len = 16;
  s.block_channels = {4, 8};
  s.hidden_width = 8;
  return s;
}

/// Two classes told apart by the sign of a noisy constant signal.
std::vector<WindowSample> separable(std::size_t trials, std::size_t per_trial, std::uint64_t seed,
                                    const std::string& subject = "S0") {
  Rng rng(seed);
  std::vector<WindowSample> out;
  for (std::size_t t = 0; t < trials; ++t)
    for (std::size_t k = 0; k < per_trial; ++k) {
      const bool up = (t + k) % 2 == 0;
      auto s = make_sample(subject, "T" + std::to_string(t), up ? GaitMode::LW : GaitMode::S, 2, 16);
      for (auto& v : s.x.data()) v = (up ? 1.0f : -1.0f) + static_cast<float>(rng.uniform(-0.3, 0.3));
      out.push_back(std::move(s));
    }
  return out;
}

std::vector<const WindowSample*> ptrs(const std::vector<WindowSample>& v) {
  std::vector<const WindowSample*> out;
  for (const auto& s : v) out.push_back(&s);
  return out;
}

ExperimentPlan toy_plan(int epochs = 8) {
  auto plan = ExperimentPlan::defaults(Protocol::Dep);
  plan.epochs = epochs;
  plan.batch_size = 16;
  plan.lr = 1e-2;
  plan.seed = 3;
  return plan;
}

ErrorKind config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidState;
}

}  // namespace

TEST(Training, BatchesPerEpoch) {
  EXPECT_EQ(batches_per_epoch(1000, 512), 2u);
  EXPECT_EQ(batches_per_epoch(1024, 512), 2u);
  EXPECT_EQ(batches_per_epoch(1, 512), 1u);
  EXPECT_EQ(batches_per_epoch(0, 512), 0u);
}

TEST(Training, SeparableToyIsLearned) {
  const auto train_set = separable(8, 12, 1);
  const auto val_set = separable(2, 12, 2);
  Rng init(4);
  Network net(toy_spec(), init);
  Rng rng(5);
  const auto tp = ptrs(train_set), vp = ptrs(val_set);
  const auto result = train(net, toy_plan(), tp, vp, ClassWeights::uniform(10), rng);
  ASSERT_EQ(result.log.epochs.size(), 8u);
  EXPECT_EQ(result.log.epochs[result.log.best_epoch].val_error, 0.0);
  EXPECT_LT(result.log.epochs.back().train_loss, result.log.epochs.front().train_loss);
}

TEST(Training, BestCheckpointIsRestored) {
  const auto train_set = separable(6, 10, 6);
  const auto val_set = separable(2, 10, 7);
  Rng init(8);
  Network net(toy_spec(), init);
  Rng rng(9);
  const auto tp = ptrs(train_set), vp = ptrs(val_set);
  const auto weights = ClassWeights::uniform(10);
  auto result = train(net, toy_plan(6), tp, vp, weights, rng);
  const auto& epochs = result.log.epochs;
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    if (e < result.log.best_epoch) EXPECT_GT(epochs[e].val_loss, epochs[result.log.best_epoch].val_loss);
    else EXPECT_GE(epochs[e].val_loss, epochs[result.log.best_epoch].val_loss);
  }
  const auto check = evaluate_loss(result.model, vp, weights);
  EXPECT_EQ(check.loss, epochs[result.log.best_epoch].val_loss);
}

TEST(Training, RunsAreBitIdentical) {
  const auto train_set = separable(5, 9, 10);
  const auto val_set = separable(2, 9, 11);
  const auto tp = ptrs(train_set), vp = ptrs(val_set);
  auto once = [&] {
    Rng init(12);
    Network net(toy_spec(), init);
    Rng rng(13);
    return train(net, toy_plan(3), tp, vp, ClassWeights::uniform(10), rng);
  };
  auto a = once();
  auto b = once();
  const auto pa = a.model.parameters(), pb = b.model.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);
  for (std::size_t e = 0; e < a.log.epochs.size(); ++e)
    EXPECT_EQ(a.log.epochs[e].train_loss, b.log.epochs[e].train_loss);
}

TEST(Training, InputErrors) {
  Rng init(14);
  Network net(toy_spec(), init);
  Rng rng(15);
  const std::vector<const WindowSample*> none;
  try {
    train(net, toy_plan(), none, none, ClassWeights::uniform(10), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
  }
  const auto data = separable(2, 2, 16);
  const auto p = ptrs(data);
  EXPECT_THROW(train(net, toy_plan(), p, none, ClassWeights::uniform(3), rng), Error);
}

TEST(Protocols, DepFoldIsDeterministic) {
  const auto samples = separable(10, 8, 17);
  auto plan = toy_plan(3);
  ModelOverrides small;
  small.block_channels = std::vector<std::size_t>{4, 8};
  small.hidden_width = 8;
  const auto a = run_dep(samples, plan, small);
  const auto b = run_dep(samples, plan, small);
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.report.protocol, "dep");
  EXPECT_EQ(a.report.subject_id, "S0");
  EXPECT_GT(a.report.total(), 0u);
}

TEST(Protocols, TransferKeepsConvBitEqual) {
  Rng init(18);
  const Network pre(toy_spec(), init);
  const auto samples = separable(20, 5, 19, "S9");
  auto plan = ExperimentPlan::defaults(Protocol::Transfer);
  plan.epochs = 3;
  plan.batch_size = 8;
  plan.lr = 0.05;
  for (bool reinit : {true, false}) {
    plan.tl_reinit_head = reinit;
    for (int f : {5, 10, 15, 20}) {
      plan.tl_fraction = f;
      const auto fold = run_transfer(pre, samples, plan);
      EXPECT_TRUE(conv_parameters_equal(pre, fold.model));
      EXPECT_EQ(fold.report.tl_fraction, f);
      bool head_moved = false;
      const auto a = pre.head_parameters(), b = fold.model.head_parameters();
      for (std::size_t i = 0; i < a.size(); ++i) head_moved |= !(a[i]->value == b[i]->value);
      EXPECT_TRUE(head_moved);
    }
  }
  plan.tl_fraction.reset();
  EXPECT_THROW(run_transfer(pre, samples, plan), Error);
}

TEST(Protocols, ConvEqualityDetectsOneBit) {
  Rng init(20);
  const Network a(toy_spec(), init);
  Network b = a;
  EXPECT_TRUE(conv_parameters_equal(a, b));
  auto* p = b.conv_parameters().front();
  std::uint32_t bits;
  std::memcpy(&bits, &p->value[0], 4);
  bits ^= 1u;
  std::memcpy(&p->value[0], &bits, 4);
  EXPECT_FALSE(conv_parameters_equal(a, b));
}

TEST(Protocols, LosoFoldsCoverSubjects) {
  SynthDatasetOptions opt;
  opt.subjects = 3;
  opt.trials_per_subject = 3;
  opt.sample_rate_hz = 50.0;
  opt.time_scale = 0.3;
  const auto recs = gen_recordings(opt);
  WindowParams wp;
  wp.window_ms = 320;  // 16 samples
  const auto data = build_windows(recs, SensorSetup::UnilateralThigh, wp);
  EXPECT_EQ(data.window_len, 16u);
  EXPECT_EQ(data.subjects(), (std::vector<std::string>{"SYN01", "SYN02", "SYN03"}));
  for (const auto& id : data.subjects())
    for (const auto& s : data.subject(id)) EXPECT_EQ(s.subject_id, id);
  EXPECT_THROW(data.subject("SYN99"), Error);

  auto plan = ExperimentPlan::defaults(Protocol::Ind);
  plan.epochs = 1;
  plan.batch_size = 64;
  ModelOverrides small;
  small.block_channels = std::vector<std::size_t>{4};
  small.hidden_width = 8;
  const auto folds = run_loso(data, plan, small);
  ASSERT_EQ(folds.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(folds[i].subject_id, data.subjects()[i]);
    EXPECT_EQ(folds[i].report.total(), data.subject(folds[i].subject_id).size());
  }
}

TEST(Protocols, MixedSampleRatesRejected) {
  SynthDatasetOptions opt;
  opt.subjects = 1;
  opt.trials_per_subject = 1;
  opt.sample_rate_hz = 50.0;
  opt.time_scale = 0.2;
  auto recs = gen_recordings(opt);
  recs.push_back(recs.front());
  recs.back().sample_rate_hz = 100.0;
  recs.back().trial_id = "T02";
  try {
    build_windows(recs, SensorSetup::UnilateralThigh, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(ParallelMap, KeepsOrderAndRethrowsLowest) {
  const auto out = parallel_map<int>(20, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  try {
    parallel_map<int>(10, [](std::size_t i) -> int {
      if (i == 3 || i == 7) throw std::runtime_error("fail " + std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 3");
  }
  EXPECT_TRUE(parallel_map<int>(0, [](std::size_t) { return 1; }).empty());
}

TEST(Plan, DefaultsPerProtocol) {
  const auto dep = ExperimentPlan::defaults(Protocol::Dep);
  EXPECT_EQ(dep.epochs, 30);
  EXPECT_EQ(dep.batch_size, 512u);
  EXPECT_DOUBLE_EQ(dep.lr, 1e-4);
  const auto ind = ExperimentPlan::defaults(Protocol::Ind);
  EXPECT_EQ(ind.epochs, 35);
  EXPECT_EQ(ind.batch_size, 1024u);
  EXPECT_DOUBLE_EQ(ind.lr, 1.5e-4);
  const auto tl = ExperimentPlan::defaults(Protocol::Transfer);
  EXPECT_EQ(tl.epochs, 100);
  EXPECT_EQ(tl.batch_size, 256u);
  EXPECT_EQ(tl.optimizer, OptimizerKind::Sgd);
}

TEST(Config, ParsesAndResolves) {
  const auto c = parse_config(R"({"protocol": "ind", "sensor_config": "all", "dataset_root": "d",
                                  "epochs": 3, "seed": 9, "model": {"hidden_width": 32}})");
  EXPECT_EQ(c.protocol, Protocol::Ind);
  EXPECT_EQ(c.sensor_config, SensorSetup::All);
  const auto plan = c.plan();
  EXPECT_EQ(plan.epochs, 3);
  EXPECT_EQ(plan.batch_size, 1024u);
  EXPECT_EQ(plan.seed, 9u);
  EXPECT_EQ(c.plan_for(Protocol::Dep).batch_size, 512u);
  EXPECT_EQ(c.model.hidden_width, 32u);
  EXPECT_EQ(c.excluded_subjects, (std::vector<std::string>{"AB186"}));
  const auto again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Config, FailsClosed) {
  EXPECT_EQ(config_error(R"({"protocl": "dep"})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(config_error(R"({"epochs": "ten"})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(config_error(R"({"epochs": 0})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(config_error(R"({"sensor_config": "elbow"})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(config_error(R"({"protocol": "loso"})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(config_error(R"({"tl_fraction": 12})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(config_error(R"({"model": {"width": 3}})"), ErrorKind::InvalidConfig);
  EXPECT_EQ(config_error("[1, 2]"), ErrorKind::InvalidConfig);
  EXPECT_EQ(config_error("{not json"), ErrorKind::InvalidConfig);
  try {
    load_config("/nonexistent/gaitmind.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}
