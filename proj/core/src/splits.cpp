#include "gaitmind/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gaitmind/error.hpp"

namespace gaitmind {

namespace {

using Group = std::vector<std::size_t>;

/// Groups indices by (subject, trial) in sorted key order.
std::vector<Group> group_by_trial(std::span<const WindowSample> samples,
                                  const std::string* skip_subject = nullptr) {
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (skip_subject && samples[i].subject_id == *skip_subject) continue;
    groups[{samples[i].subject_id, samples[i].trial_id}].push_back(i);
  }
  std::vector<Group> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

/// Picks a cut j in [lo, hi] minimizing |cum[j] - target|; ties go to the smaller j.
std::size_t best_cut(const std::vector<std::size_t>& cum, double target, std::size_t lo,
                     std::size_t hi) {
  std::size_t best = lo;
  double best_err = std::abs(static_cast<double>(cum[lo]) - target);
  for (std::size_t j = lo + 1; j <= hi; ++j) {
    const double err = std::abs(static_cast<double>(cum[j]) - target);
    if (err < best_err) {
      best = j;
      best_err = err;
    }
  }
  return best;
}

/// Shuffles groups and cuts them into parts at the cumulative fractions in
/// `bounds` (increasing, each in (0,1)). Returns parts.size() == bounds.size()+1.
std::vector<std::vector<std::size_t>> cut_groups(std::vector<Group> groups,
                                                 const std::vector<double>& bounds, Rng& rng) {
  const std::size_t parts = bounds.size() + 1;
  if (groups.size() < parts) {
    fail(ErrorKind::InsufficientData, "need at least " + std::to_string(parts) +
                                          " trials to split, have " + std::to_string(groups.size()));
  }
  shuffle(groups, rng);
  std::vector<std::size_t> cum(groups.size() + 1, 0);
  for (std::size_t i = 0; i < groups.size(); ++i) cum[i + 1] = cum[i] + groups[i].size();
  const double total = static_cast<double>(cum.back());

  std::vector<std::size_t> cuts{0};
  for (std::size_t b = 0; b < bounds.size(); ++b) {
    const std::size_t lo = cuts.back() + 1;
    const std::size_t hi = groups.size() - (bounds.size() - b);
    cuts.push_back(best_cut(cum, bounds[b] * total, lo, hi));
  }
  cuts.push_back(groups.size());

  std::vector<std::vector<std::size_t>> out(parts);
  for (std::size_t p = 0; p < parts; ++p) {
    for (std::size_t g = cuts[p]; g < cuts[p + 1]; ++g) {
      out[p].insert(out[p].end(), groups[g].begin(), groups[g].end());
    }
    std::sort(out[p].begin(), out[p].end());
  }
  return out;
}

}  // namespace

TransferFractions transfer_fractions(int fraction_percent) {
  switch (fraction_percent) {
    case 5: return {3, 2};
    case 10: return {7, 3};
    case 15: return {10, 5};
    case 20: return {15, 5};
    default:
      fail(ErrorKind::InvalidConfig,
           "transfer fraction must be one of 5, 10, 15, 20 (got " + std::to_string(fraction_percent) + ")");
  }
}

SplitIndices split_dep(std::span<const WindowSample> samples, Rng& rng) {
  auto parts = cut_groups(group_by_trial(samples), {0.8, 0.9}, rng);
  return {std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
}

SplitIndices split_loso(std::span<const WindowSample> samples, const std::string& test_subject,
                        Rng& rng) {
  const auto subjects = subjects_of(samples);
  if (std::find(subjects.begin(), subjects.end(), test_subject) == subjects.end()) {
    fail(ErrorKind::InvalidConfig, "unknown test subject '" + test_subject + "'");
  }
  if (subjects.size() < 2) {
    fail(ErrorKind::InsufficientData, "leave-one-subject-out needs at least two subjects");
  }
  auto parts = cut_groups(group_by_trial(samples, &test_subject), {0.8}, rng);
  SplitIndices out{std::move(parts[0]), std::move(parts[1]), {}};
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].subject_id == test_subject) out.test.push_back(i);
  return out;
}

SplitIndices split_transfer(std::span<const WindowSample> samples, int fraction_percent, Rng& rng) {
  const auto f = transfer_fractions(fraction_percent);
  const double train = f.train_percent / 100.0;
  const double val = (f.train_percent + f.val_percent) / 100.0;
  auto parts = cut_groups(group_by_trial(samples), {train, val}, rng);
  return {std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
}

std::vector<std::string> subjects_of(std::span<const WindowSample> samples) {
  std::set<std::string> ids;
  for (const auto& s : samples) ids.insert(s.subject_id);
  return {ids.begin(), ids.end()};
}

}  // namespace gaitmind
