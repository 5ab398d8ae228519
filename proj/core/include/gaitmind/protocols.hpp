#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "gaitmind/evaluation.hpp"
#include "gaitmind/plan.hpp"
#include "gaitmind/splits.hpp"
#include "gaitmind/training.hpp"

namespace gaitmind {

/// Windows of a whole dataset for one sensor setup, grouped by subject in
/// sorted order.
struct WindowedDataset {
  std::vector<WindowSample> samples;
  SensorConfig sensors;
  double sample_rate_hz = 0.0;
  std::size_t window_len = 0;

  std::vector<std::string> subjects() const { return subjects_of(samples); }
  /// Contiguous run of one subject's samples; InvalidConfig if absent.
  std::span<const WindowSample> subject(const std::string& id) const;
};

/// Throws InvalidInput when recordings disagree on sample rate.
WindowedDataset build_windows(std::span<const Recording> recordings, SensorSetup setup,
                              const WindowParams& params);

struct FoldResult {
  std::string subject_id;
  Network model;
  TrainLog log;
  EvalReport report;
};

/// Trains and tests on one subject's samples (80/10/10 by trial).
FoldResult run_dep(std::span<const WindowSample> subject_samples, const ExperimentPlan& plan,
                   const ModelOverrides& model = {});

/// Leave-one-subject-out fold for `test_subject`.
FoldResult run_loso_fold(std::span<const WindowSample> samples, const std::string& test_subject,
                         const ExperimentPlan& plan, const ModelOverrides& model = {});

/// Adapts a pretrained Ind model to one subject with plan.tl_fraction of that
/// subject's trials. Throws InvalidState if any convolutional parameter of
/// the result differs from the pretrained model.
FoldResult run_transfer(const Network& pretrained, std::span<const WindowSample> subject_samples,
                        const ExperimentPlan& plan);

/// One run_dep per subject, in subject order.
std::vector<FoldResult> run_dep_all(const WindowedDataset& data, const ExperimentPlan& plan,
                                    const ModelOverrides& model = {});

/// One fold per subject, in subject order. Needs >= 2 subjects.
std::vector<FoldResult> run_loso(const WindowedDataset& data, const ExperimentPlan& plan,
                                 const ModelOverrides& model = {});

/// True when every convolutional parameter of `a` and `b` is bitwise equal.
bool conv_parameters_equal(const Network& a, const Network& b);

/// Worker count: GAITMIND_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t thread_budget();

/// out[i] = fn(i) for i in [0, n), run on up to thread_budget() threads.
/// Results keep index order. If any call throws, the exception from the
/// lowest index is rethrown after all workers finish.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, F&& fn) {
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= n) return;
        i = next++;
      }
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(n, thread_budget());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace gaitmind
