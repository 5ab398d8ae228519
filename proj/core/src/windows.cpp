#include "gaitmind/windows.hpp"

#include <algorithm>
#include <cmath>

#include "gaitmind/error.hpp"

namespace gaitmind {

namespace {

std::size_t ms_to_samples(double ms, double fs) {
  return static_cast<std::size_t>(std::llround(ms * fs / 1000.0));
}

}  // namespace

std::size_t WindowParams::window_samples(double fs) const {
  const auto w = ms_to_samples(window_ms, fs);
  if (w == 0) fail(ErrorKind::InvalidConfig, "window shorter than one sample");
  return w;
}

std::size_t WindowParams::stride_samples(double fs) const {
  return std::max<std::size_t>(1, ms_to_samples(stride_ms, fs));
}

std::size_t WindowParams::transition_samples(double fs) const {
  return ms_to_samples(transition_ms, fs);
}

std::vector<GaitMode> relabel(std::span<const RawMode> raw, std::size_t transition_samples) {
  std::vector<GaitMode> steady(raw.size());
  std::transform(raw.begin(), raw.end(), steady.begin(), merge_raw);
  std::vector<GaitMode> out = steady;
  std::size_t previous_change = 0;
  for (std::size_t k = 1; k < steady.size(); ++k) {
    if (steady[k] == steady[k - 1]) continue;
    if (const auto tr = transition_between(steady[k - 1], steady[k])) {
      const std::size_t zone_start =
          std::max(previous_change, k >= transition_samples ? k - transition_samples : 0);
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(zone_start),
                out.begin() + static_cast<std::ptrdiff_t>(k), *tr);
    }
    previous_change = k;
  }
  return out;
}

std::size_t window_count(std::size_t length, std::size_t window, std::size_t stride) {
  if (length < window + 1) return 0;
  return (length - 1 - window) / stride + 1;
}

std::vector<WindowSample> extract_windows(const Recording& rec, const SensorConfig& cfg,
                                          const WindowParams& params) {
  rec.validate();
  std::vector<const std::vector<float>*> sources;
  for (const auto& name : cfg.channel_names) sources.push_back(&rec.channel(name));

  const double fs = rec.sample_rate_hz;
  const std::size_t W = params.window_samples(fs);
  const std::size_t stride = params.stride_samples(fs);
  const auto labels = relabel(rec.mode_track, params.transition_samples(fs));
  const std::size_t n = window_count(rec.length(), W, stride);
  const std::size_t C = sources.size();

  std::vector<WindowSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = i * stride;
    WindowSample s;
    s.x = Tensor({C, W});
    auto dst = s.x.data();
    for (std::size_t c = 0; c < C; ++c) {
      const auto& src = *sources[c];
      std::copy(src.begin() + static_cast<std::ptrdiff_t>(t),
                src.begin() + static_cast<std::ptrdiff_t>(t + W), dst.begin() + static_cast<std::ptrdiff_t>(c * W));
    }
    s.label = labels[t + W];
    s.is_transition = is_transition(s.label);
    s.subject_id = rec.subject_id;
    s.trial_id = rec.trial_id;
    s.start = t;
    out.push_back(std::move(s));
  }
  return out;
}

ClassCounts class_counts(std::span<const WindowSample> samples) {
  ClassCounts counts{};
  for (const auto& s : samples) ++counts[static_cast<std::size_t>(s.label_code())];
  return counts;
}

ClassCounts class_counts(std::span<const WindowSample* const> samples) {
  ClassCounts counts{};
  for (const auto* s : samples) ++counts[static_cast<std::size_t>(s->label_code())];
  return counts;
}

}  // namespace gaitmind
