#include <benchmark/benchmark.h>

#include "gaitmind/evaluation.hpp"
#include "gaitmind/layers.hpp"
#include "gaitmind/network.hpp"

using namespace gaitmind;

namespace {

void BM_Conv1dForward(benchmark::State& state) {
  const auto cin = static_cast<std::size_t>(state.range(0));
  const auto cout = static_cast<std::size_t>(state.range(1));
  const auto len = static_cast<std::size_t>(state.range(2));
  Rng rng(1);
  Conv1d<float> conv(cin, cout, rng);
  const auto x = uniform<float>(rng, {32, cin, len}, -1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x, Phase::Eval, rng));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_Conv1dForward)->Args({6, 64, 250})->Args({64, 128, 125})->Args({256, 512, 31});

void BM_Conv1dBackward(benchmark::State& state) {
  const auto cin = static_cast<std::size_t>(state.range(0));
  const auto cout = static_cast<std::size_t>(state.range(1));
  const auto len = static_cast<std::size_t>(state.range(2));
  Rng rng(2);
  Conv1d<float> conv(cin, cout, rng);
  const auto x = uniform<float>(rng, {32, cin, len}, -1, 1);
  const auto dy = uniform<float>(rng, {32, cout, len}, -1, 1);
  for (auto _ : state) {
    conv.forward(x, Phase::Train, rng);
    benchmark::DoNotOptimize(conv.backward(dy));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_Conv1dBackward)->Args({6, 64, 250})->Args({64, 128, 125});

void BM_DenseForward(benchmark::State& state) {
  const auto in = static_cast<std::size_t>(state.range(0));
  const auto out = static_cast<std::size_t>(state.range(1));
  Rng rng(3);
  Dense<float> dense(in, out, rng);
  const auto x = uniform<float>(rng, {64, in}, -1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dense.forward(x, Phase::Eval, rng));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_DenseForward)->Args({7680, 1024})->Args({1024, 1024});

NetworkSpec reduced(Arch arch) {
  auto spec = NetworkSpec::standard(arch, 6, 50);
  spec.block_channels = {16, 32};
  spec.hidden_width = 64;
  return spec;
}

void BM_NetworkTrainStep(benchmark::State& state) {
  Rng rng(4);
  Network net(reduced(Arch::Dep), rng);
  const auto x = uniform<float>(rng, {32, 6, 50}, -1, 1);
  for (auto _ : state) {
    net.zero_grad();
    const auto y = net.forward(x, Phase::Train, rng);
    net.backward(Tensor::ones(y.shape()));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_NetworkTrainStep);

void BM_StandardDepPredict(benchmark::State& state) {
  Rng rng(5);
  Network net(NetworkSpec::standard(Arch::Dep, 6, 250), rng);
  const auto x = uniform<float>(rng, {8, 6, 250}, -1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(x));
  state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(BM_StandardDepPredict)->Unit(benchmark::kMillisecond);

void BM_ComputeReport(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  std::vector<int> truth(n), pred(n);
  std::vector<StateTag> tags(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = static_cast<int>(rng.below(10));
    pred[i] = static_cast<int>(rng.below(10));
    tags[i] = ss_ts_tag(gait_mode_from_code(truth[i]));
  }
  for (auto _ : state) benchmark::DoNotOptimize(compute_report(truth, pred, tags));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ComputeReport)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
