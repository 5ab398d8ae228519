#pragma once

#include <span>
#include <string>
#include <vector>

#include "gaitmind/loss.hpp"
#include "gaitmind/network.hpp"
#include "gaitmind/plan.hpp"
#include "gaitmind/windows.hpp"

namespace gaitmind {

struct EpochRecord {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_error = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // zero-based
  double wall_seconds = 0.0;
  std::string model_path;
};

struct TrainResult {
  Network model;
  TrainLog log;
};

/// Number of batches in one epoch: full batches plus a final partial one.
std::size_t batches_per_epoch(std::size_t samples, std::size_t batch_size);

/// Weighted mean loss and error rate of `net` on `samples` in Eval phase.
struct EvalLoss {
  double loss = 0.0;
  double error = 0.0;
};
EvalLoss evaluate_loss(Network& net, std::span<const WindowSample* const> samples,
                       const ClassWeights& weights, std::size_t batch_size = 256);

/// Runs exactly plan.epochs epochs. Each epoch shuffles the training order
/// with `rng`, which also drives dropout. The returned model holds the
/// parameters of the epoch with the lowest validation loss (the earliest on
/// ties). With an empty validation set the training loss is used instead.
TrainResult train(Network net, const ExperimentPlan& plan,
                  std::span<const WindowSample* const> train_set,
                  std::span<const WindowSample* const> val_set, const ClassWeights& weights,
                  Rng& rng);

}  // namespace gaitmind
