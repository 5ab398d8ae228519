#include "gaitmind/training.hpp"

#include <chrono>
#include <numeric>

#include "gaitmind/error.hpp"
#include "gaitmind/evaluation.hpp"

namespace gaitmind {

std::size_t batches_per_epoch(std::size_t samples, std::size_t batch_size) {
  if (batch_size == 0) fail(ErrorKind::InvalidConfig, "batch_size must be positive");
  return (samples + batch_size - 1) / batch_size;
}

EvalLoss evaluate_loss(Network& net, std::span<const WindowSample* const> samples,
                       const ClassWeights& weights, std::size_t batch_size) {
  if (samples.empty()) fail(ErrorKind::InvalidInput, "cannot evaluate an empty set");
  double weighted_loss = 0.0, weight_sum = 0.0;
  std::size_t wrong = 0;
  std::vector<int> labels;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, samples.size() - start);
    const Tensor logits = net.predict(stack_windows(samples.subspan(start, n), &labels));
    const auto res = weighted_cross_entropy(logits, labels, weights);
    double w = 0.0;
    for (int y : labels) w += weights[static_cast<std::size_t>(y)];
    weighted_loss += res.loss * w;
    weight_sum += w;
    const std::size_t C = logits.dim(1);
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<int>(argmax(logits.data().subspan(i * C, C))) != labels[i]) ++wrong;
    }
  }
  return {weight_sum > 0.0 ? weighted_loss / weight_sum : 0.0,
          static_cast<double>(wrong) / static_cast<double>(samples.size())};
}

TrainResult train(Network net, const ExperimentPlan& plan,
                  std::span<const WindowSample* const> train_set,
                  std::span<const WindowSample* const> val_set, const ClassWeights& weights,
                  Rng& rng) {
  plan.validate();
  if (train_set.empty()) fail(ErrorKind::InsufficientData, "training set is empty");
  if (weights.size() != net.spec().classes) {
    fail(ErrorKind::InvalidConfig, "class weight count does not match the network");
  }
  const auto t0 = std::chrono::steady_clock::now();

  auto optimizer = make_optimizer<float>(plan.optimizer, plan.lr);
  auto params = net.parameters();

  TrainLog log;
  std::vector<Tensor> best;
  double best_loss = 0.0;

  std::vector<std::size_t> order(train_set.size());
  std::vector<const WindowSample*> batch;
  std::vector<int> labels;
  for (int epoch = 0; epoch < plan.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);
    double loss_sum = 0.0, weight_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += plan.batch_size) {
      const std::size_t n = std::min(plan.batch_size, order.size() - start);
      batch.clear();
      for (std::size_t i = 0; i < n; ++i) batch.push_back(train_set[order[start + i]]);
      const Tensor x = stack_windows(batch, &labels);
      net.zero_grad();
      const Tensor logits = net.forward(x, Phase::Train, rng);
      const auto res = weighted_cross_entropy(logits, labels, weights);
      net.backward(res.dlogits);
      optimizer->step(params);
      double w = 0.0;
      for (int y : labels) w += weights[static_cast<std::size_t>(y)];
      loss_sum += res.loss * w;
      weight_sum += w;
    }
    EpochRecord rec;
    rec.train_loss = weight_sum > 0.0 ? loss_sum / weight_sum : 0.0;
    if (!val_set.empty()) {
      const EvalLoss v = evaluate_loss(net, val_set, weights);
      rec.val_loss = v.loss;
      rec.val_error = v.error;
    } else {
      rec.val_loss = rec.train_loss;
      rec.val_error = 0.0;
    }
    if (log.epochs.empty() || rec.val_loss < best_loss) {
      best_loss = rec.val_loss;
      log.best_epoch = log.epochs.size();
      best = net.snapshot();
    }
    log.epochs.push_back(rec);
  }
  net.restore(best);
  log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(net), std::move(log)};
}

}  // namespace gaitmind
