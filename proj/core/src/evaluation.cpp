#include "gaitmind/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaitmind/error.hpp"

namespace gaitmind {

std::size_t argmax(std::span<const float> values) {
  if (values.empty()) fail(ErrorKind::InvalidInput, "argmax of an empty row");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

Tensor stack_windows(std::span<const WindowSample* const> samples, std::vector<int>* labels) {
  if (samples.empty()) fail(ErrorKind::InvalidInput, "cannot stack zero windows");
  const Shape& s0 = samples.front()->x.shape();
  if (s0.size() != 2) fail(ErrorKind::InvalidShape, "window tensors must be [C,W]");
  const std::size_t per = samples.front()->x.size();
  std::vector<float> data;
  data.reserve(per * samples.size());
  if (labels) labels->clear();
  for (const auto* s : samples) {
    if (s->x.shape() != s0) fail(ErrorKind::InvalidShape, "windows of different shapes in one batch");
    data.insert(data.end(), s->x.data().begin(), s->x.data().end());
    if (labels) labels->push_back(s->label_code());
  }
  return Tensor({samples.size(), s0[0], s0[1]}, std::move(data));
}

std::vector<int> classify_samples(Network& net, std::span<const WindowSample* const> samples,
                                  std::size_t batch_size) {
  std::vector<int> out;
  out.reserve(samples.size());
  batch_size = std::max<std::size_t>(1, batch_size);
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, samples.size() - start);
    const Tensor logits = net.predict(stack_windows(samples.subspan(start, n)));
    const std::size_t C = logits.dim(1);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(static_cast<int>(argmax(logits.data().subspan(i * C, C))));
    }
  }
  return out;
}

EvalReport compute_report(std::span<const int> truth, std::span<const int> predicted,
                          std::span<const StateTag> tags) {
  if (truth.size() != predicted.size() || truth.size() != tags.size()) {
    fail(ErrorKind::InvalidInput, "truth, prediction and tag lengths differ");
  }
  if (truth.empty()) fail(ErrorKind::InvalidInput, "cannot evaluate an empty test set");
  EvalReport r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = static_cast<std::size_t>(code(gait_mode_from_code(truth[i])));
    const auto p = static_cast<std::size_t>(code(gait_mode_from_code(predicted[i])));
    ++r.confusion[t][p];
    const bool hit = t == p;
    if (tags[i] == StateTag::SS) {
      ++r.n_ss;
      r.ss_correct += hit;
    } else {
      ++r.n_ts;
      r.ts_correct += hit;
    }
  }
  r.overall_error = 1.0 - static_cast<double>(r.correct()) / static_cast<double>(r.total());
  if (r.n_ss > 0) r.ss_error = 1.0 - static_cast<double>(r.ss_correct) / static_cast<double>(r.n_ss);
  if (r.n_ts > 0) r.ts_error = 1.0 - static_cast<double>(r.ts_correct) / static_cast<double>(r.n_ts);
  return r;
}

EvalReport evaluate(Network& net, std::span<const WindowSample* const> samples) {
  const auto predicted = classify_samples(net, samples);
  std::vector<int> truth;
  std::vector<StateTag> tags;
  truth.reserve(samples.size());
  tags.reserve(samples.size());
  for (const auto* s : samples) {
    truth.push_back(s->label_code());
    tags.push_back(ss_ts_tag(s->label));
  }
  return compute_report(truth, predicted, tags);
}

MetricStats summarize(std::span<const double> values) {
  MetricStats m;
  m.n = values.size();
  if (m.n == 0) return m;
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(m.n - 1));
    m.sem = m.std / std::sqrt(static_cast<double>(m.n));
  }
  return m;
}

AggregateStats aggregate(std::span<const EvalReport> reports) {
  std::vector<double> overall, ss, ts;
  for (const auto& r : reports) {
    overall.push_back(r.overall_error);
    if (r.ss_error) ss.push_back(*r.ss_error);
    if (r.ts_error) ts.push_back(*r.ts_error);
  }
  return {summarize(overall), summarize(ss), summarize(ts), reports.size()};
}

}  // namespace gaitmind
