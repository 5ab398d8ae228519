#include "gaitmind/protocols.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>

#include "gaitmind/error.hpp"

namespace gaitmind {

namespace {

ClassWeights weights_for(std::span<const WindowSample* const> train_set) {
  const ClassCounts counts = class_counts(train_set);
  return class_weights_from_counts(counts);
}

EvalReport tagged_report(Network& net, std::span<const WindowSample* const> test_set,
                         const std::string& subject, const ExperimentPlan& plan) {
  if (test_set.empty()) fail(ErrorKind::InsufficientData, "test split of " + subject + " is empty");
  EvalReport r = evaluate(net, test_set);
  r.subject_id = subject;
  r.sensor_config = std::string(to_string(plan.sensor_config));
  r.protocol = std::string(to_string(plan.protocol));
  if (plan.protocol == Protocol::Transfer) r.tl_fraction = plan.tl_fraction;
  return r;
}

std::string single_subject(std::span<const WindowSample> samples) {
  if (samples.empty()) fail(ErrorKind::InsufficientData, "no samples for this subject");
  const std::string& id = samples.front().subject_id;
  for (const auto& s : samples) {
    if (s.subject_id != id) fail(ErrorKind::InvalidInput, "expected samples of a single subject");
  }
  return id;
}

}  // namespace

std::span<const WindowSample> WindowedDataset::subject(const std::string& id) const {
  auto first = std::find_if(samples.begin(), samples.end(),
                            [&](const WindowSample& s) { return s.subject_id == id; });
  if (first == samples.end()) fail(ErrorKind::InvalidConfig, "unknown subject '" + id + "'");
  auto last = std::find_if(first, samples.end(),
                           [&](const WindowSample& s) { return s.subject_id != id; });
  return {&*first, static_cast<std::size_t>(last - first)};
}

WindowedDataset build_windows(std::span<const Recording> recordings, SensorSetup setup,
                              const WindowParams& params) {
  WindowedDataset out;
  out.sensors = SensorConfig::make(setup);
  if (recordings.empty()) fail(ErrorKind::InsufficientData, "dataset has no recordings");
  out.sample_rate_hz = recordings.front().sample_rate_hz;
  out.window_len = params.window_samples(out.sample_rate_hz);

  std::vector<const Recording*> order;
  for (const auto& r : recordings) {
    if (r.sample_rate_hz != out.sample_rate_hz) {
      fail(ErrorKind::InvalidInput, "recordings have different sample rates");
    }
    order.push_back(&r);
  }
  std::stable_sort(order.begin(), order.end(), [](const Recording* a, const Recording* b) {
    return std::tie(a->subject_id, a->trial_id) < std::tie(b->subject_id, b->trial_id);
  });
  for (const Recording* r : order) {
    auto w = extract_windows(*r, out.sensors, params);
    std::move(w.begin(), w.end(), std::back_inserter(out.samples));
  }
  if (out.samples.empty()) fail(ErrorKind::InsufficientData, "recordings are shorter than one window");
  return out;
}

FoldResult run_dep(std::span<const WindowSample> subject_samples, const ExperimentPlan& plan,
                   const ModelOverrides& model) {
  const std::string subject = single_subject(subject_samples);
  const Rng root = Rng(plan.seed).fork("dep/" + subject);
  Rng split_rng = root.fork("split");
  Rng init_rng = root.fork("init");
  Rng train_rng = root.fork("train");

  const SplitIndices split = split_dep(subject_samples, split_rng);
  const auto train_set = select(subject_samples, split.train);
  const auto val_set = select(subject_samples, split.val);
  const auto test_set = select(subject_samples, split.test);

  const Shape& xs = subject_samples.front().x.shape();
  Network net(make_spec(Arch::Dep, xs[0], xs[1], model), init_rng);
  TrainResult tr = train(std::move(net), plan, train_set, val_set, weights_for(train_set), train_rng);
  EvalReport report = tagged_report(tr.model, test_set, subject, plan);
  return {subject, std::move(tr.model), std::move(tr.log), std::move(report)};
}

FoldResult run_loso_fold(std::span<const WindowSample> samples, const std::string& test_subject,
                         const ExperimentPlan& plan, const ModelOverrides& model) {
  const Rng root = Rng(plan.seed).fork("ind/" + test_subject);
  Rng split_rng = root.fork("split");
  Rng init_rng = root.fork("init");
  Rng train_rng = root.fork("train");

  const SplitIndices split = split_loso(samples, test_subject, split_rng);
  const auto train_set = select(samples, split.train);
  const auto val_set = select(samples, split.val);
  const auto test_set = select(samples, split.test);

  const Shape& xs = samples.front().x.shape();
  Network net(make_spec(Arch::Ind, xs[0], xs[1], model), init_rng);
  TrainResult tr = train(std::move(net), plan, train_set, val_set, weights_for(train_set), train_rng);
  EvalReport report = tagged_report(tr.model, test_set, test_subject, plan);
  return {test_subject, std::move(tr.model), std::move(tr.log), std::move(report)};
}

FoldResult run_transfer(const Network& pretrained, std::span<const WindowSample> subject_samples,
                        const ExperimentPlan& plan) {
  if (!plan.tl_fraction) fail(ErrorKind::InvalidConfig, "transfer needs tl_fraction");
  const std::string subject = single_subject(subject_samples);
  const Shape& xs = subject_samples.front().x.shape();
  if (xs[0] != pretrained.spec().in_channels || xs[1] != pretrained.spec().window_len) {
    fail(ErrorKind::InvalidShape, "pretrained model expects [" + std::to_string(pretrained.spec().in_channels) +
                                      "," + std::to_string(pretrained.spec().window_len) + "] windows, data has " +
                                      shape_string(xs));
  }
  const Rng root = Rng(plan.seed).fork("transfer/" + subject + "/" + std::to_string(*plan.tl_fraction));
  Rng split_rng = root.fork("split");
  Rng init_rng = root.fork("init");
  Rng train_rng = root.fork("train");

  const SplitIndices split = split_transfer(subject_samples, *plan.tl_fraction, split_rng);
  const auto train_set = select(subject_samples, split.train);
  const auto val_set = select(subject_samples, split.val);
  const auto test_set = select(subject_samples, split.test);

  Network net = transfer_surgery(pretrained, init_rng, plan.tl_reinit_head);
  TrainResult tr = train(std::move(net), plan, train_set, val_set, weights_for(train_set), train_rng);
  if (!conv_parameters_equal(tr.model, pretrained)) {
    fail(ErrorKind::InvalidState, "frozen convolutional parameters changed during transfer");
  }
  EvalReport report = tagged_report(tr.model, test_set, subject, plan);
  return {subject, std::move(tr.model), std::move(tr.log), std::move(report)};
}

std::vector<FoldResult> run_dep_all(const WindowedDataset& data, const ExperimentPlan& plan,
                                    const ModelOverrides& model) {
  const auto subjects = data.subjects();
  return parallel_map<FoldResult>(subjects.size(), [&](std::size_t i) {
    return run_dep(data.subject(subjects[i]), plan, model);
  });
}

std::vector<FoldResult> run_loso(const WindowedDataset& data, const ExperimentPlan& plan,
                                 const ModelOverrides& model) {
  const auto subjects = data.subjects();
  if (subjects.size() < 2) {
    fail(ErrorKind::InsufficientData, "leave-one-subject-out needs at least two subjects");
  }
  return parallel_map<FoldResult>(subjects.size(), [&](std::size_t i) {
    return run_loso_fold(data.samples, subjects[i], plan, model);
  });
}

bool conv_parameters_equal(const Network& a, const Network& b) {
  const auto pa = a.conv_parameters();
  const auto pb = b.conv_parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const auto& va = pa[i]->value;
    const auto& vb = pb[i]->value;
    if (va.shape() != vb.shape()) return false;
    if (std::memcmp(va.data().data(), vb.data().data(), va.size() * sizeof(float)) != 0) return false;
  }
  return true;
}

std::size_t thread_budget() {
  if (const char* env = std::getenv("GAITMIND_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace gaitmind
