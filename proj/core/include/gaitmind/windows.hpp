#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "gaitmind/modes.hpp"
#include "gaitmind/recording.hpp"
#include "gaitmind/tensor.hpp"

namespace gaitmind {

struct WindowParams {
  double window_ms = 500.0;
  double stride_ms = 100.0;
  /// Length of the labelled zone before each steady-mode change.
  double transition_ms = 500.0;

  std::size_t window_samples(double fs) const;
  std::size_t stride_samples(double fs) const;
  std::size_t transition_samples(double fs) const;
};

/// One input window and the mode at the sample right after it.
struct WindowSample {
  Tensor x;  // [C, W]
  GaitMode label = GaitMode::S;
  bool is_transition = false;
  std::string subject_id;
  std::string trial_id;
  std::size_t start = 0;

  int label_code() const noexcept { return code(label); }
};

/// Maps a raw track onto the ten-class space.
///
/// Raw modes are merged (St, RA, RD -> LW). For every change between merged
/// steady modes at sample k, the `transition_samples` samples before k are
/// relabelled with the source-to-destination class. A zone never reaches back
/// past the previous change point. Changes between pairs without a modelled
/// transition keep their steady labels.
std::vector<GaitMode> relabel(std::span<const RawMode> raw, std::size_t transition_samples);

/// Windows start at 0, stride, 2*stride, ...; window i covers [t, t+W) of the
/// configured channels and is labelled with the relabelled mode at t+W.
/// Windows whose label index falls past the end are dropped.
std::vector<WindowSample> extract_windows(const Recording& rec, const SensorConfig& cfg,
                                          const WindowParams& params = {});

/// Number of windows extract_windows produces for a recording of `length`.
std::size_t window_count(std::size_t length, std::size_t window, std::size_t stride);

using ClassCounts = std::array<std::size_t, kModeCount>;

ClassCounts class_counts(std::span<const WindowSample> samples);
ClassCounts class_counts(std::span<const WindowSample* const> samples);

}  // namespace gaitmind
