#pragma once

#include <span>
#include <string>
#include <vector>

#include "gaitmind/rng.hpp"
#include "gaitmind/windows.hpp"

namespace gaitmind {

/// Index sets into the sample list a split was computed from.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Percentages of a held-out subject's data used for transfer training and
/// validation; the remainder is the transfer test set.
struct TransferFractions {
  int train_percent;
  int val_percent;
};

/// 5 -> 3/2, 10 -> 7/3, 15 -> 10/5, 20 -> 15/5. Anything else is a config error.
TransferFractions transfer_fractions(int fraction_percent);

// All splits are trial-granular: every (subject, trial) group lands wholly in
// one part. Groups are shuffled with rng, then cut where the cumulative sample
// count is closest to each target, so each part is within one trial of its
// target proportion. Every part receives at least one trial.

/// 80 / 10 / 10 of one subject's samples. Needs >= 3 trials.
SplitIndices split_dep(std::span<const WindowSample> samples, Rng& rng);

/// test = every sample of test_subject; the other subjects' trials go 80 / 20
/// to train / val.
SplitIndices split_loso(std::span<const WindowSample> samples, const std::string& test_subject,
                        Rng& rng);

/// Transfer split of one subject's samples per transfer_fractions().
SplitIndices split_transfer(std::span<const WindowSample> samples, int fraction_percent, Rng& rng);

/// Sorted distinct subject ids.
std::vector<std::string> subjects_of(std::span<const WindowSample> samples);

template <typename T>
std::vector<const T*> select(std::span<const T> items, const std::vector<std::size_t>& indices) {
  std::vector<const T*> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(&items[i]);
  return out;
}

}  // namespace gaitmind
