#include "gaitmind/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "gaitmind/error.hpp"

namespace gaitmind {

namespace {

constexpr std::size_t kChannels = 22;
constexpr std::size_t kImuGroups = 3;    // R_thigh, L_thigh, R_shank
constexpr std::size_t kEncoderStart = 18;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t steady_index(GaitMode m) { return static_cast<std::size_t>(code(m)); }
std::size_t transition_index(GaitMode m) { return static_cast<std::size_t>(code(m) - code(GaitMode::S2W)); }

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02zu", prefix, i);
  return buf;
}

}  // namespace

Population make_population(const SynthConfig& config, Rng& rng) {
  Population pop;
  pop.config = config;
  const std::array<double, 4> freq = {0.3, 1.0, 0.75, 1.25};
  for (std::size_t m = 0; m < 4; ++m) {
    ModeSignature& sig = pop.steady[m];
    sig.frequency_hz = freq[m];
    sig.baseline.assign(kChannels, 0.0);
    for (std::size_t g = 0; g < kImuGroups; ++g) sig.baseline[g * 6 + m] = config.separation;
    sig.baseline[kEncoderStart + m] = config.separation;
    sig.amplitude.resize(kChannels);
    sig.phase.resize(kChannels);
    const double scale = m == 0 ? 0.1 : 1.0;  // sitting barely moves
    for (std::size_t c = 0; c < kChannels; ++c) {
      sig.amplitude[c] = config.amplitude * scale * rng.uniform(0.3, 1.0);
      sig.phase[c] = rng.uniform(0.0, kTwoPi);
    }
  }
  for (auto& cue : pop.cue) {
    cue.resize(kChannels);
    for (auto& v : cue) {
      const double sign = rng.next_double() < 0.5 ? -1.0 : 1.0;
      v = sign * config.cue_magnitude * rng.uniform(0.5, 1.0);
    }
  }
  return pop;
}

SubjectProfile make_subject(const Population& population, const std::string& subject_id, Rng& rng) {
  const SynthConfig& cfg = population.config;
  const double shift = cfg.subject_shift;
  SubjectProfile p;
  p.subject_id = subject_id;
  p.noise_std = cfg.noise_std;
  p.transition_s = cfg.transition_s;
  p.steady = population.steady;
  p.cue = population.cue;
  p.offset.resize(kChannels);
  p.gain.resize(kChannels);
  for (std::size_t c = 0; c < kChannels; ++c) {
    p.offset[c] = shift * cfg.separation * rng.normal();
    p.gain[c] = std::max(0.3, 1.0 + 0.4 * shift * rng.normal());
  }
  for (auto& sig : p.steady) {
    sig.frequency_hz *= std::max(0.5, 1.0 + 0.1 * shift * rng.normal());
    for (std::size_t c = 0; c < kChannels; ++c) {
      sig.amplitude[c] *= std::max(0.0, 1.0 + 0.5 * shift * rng.normal());
      sig.phase[c] += shift * rng.normal();
    }
  }
  for (auto& cue : p.cue)
    for (auto& v : cue) v *= 1.0 + 0.3 * shift * rng.normal();
  return p;
}

std::vector<CircuitStage> make_circuit(int stage, Rng& rng, double time_scale) {
  const RawMode up = stage == 1 ? RawMode::SA : RawMode::RA;
  const RawMode down = stage == 1 ? RawMode::RD : RawMode::SD;
  const std::vector<CircuitStage> base = {
      {RawMode::S, 3.0},  {RawMode::St, 1.0}, {RawMode::LW, 3.0}, {up, 3.0},
      {RawMode::LW, 3.0}, {down, 3.0},        {RawMode::LW, 3.0}, {RawMode::S, 3.0}};
  std::vector<CircuitStage> out;
  for (const auto& s : base) out.push_back({s.mode, s.duration_s * time_scale * rng.uniform(0.8, 1.2)});
  return out;
}

Recording gen_recording(const SubjectProfile& profile, const std::vector<CircuitStage>& circuit,
                        double fs, Rng& rng, const std::string& trial_id) {
  if (!(fs > 0.0)) fail(ErrorKind::InvalidConfig, "sample rate must be positive");
  Recording rec;
  rec.subject_id = profile.subject_id;
  rec.trial_id = trial_id;
  rec.sample_rate_hz = fs;
  rec.channel_names = canonical_channels();

  std::vector<std::size_t> stage_of;
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    if (!(circuit[i].duration_s > 0.0)) fail(ErrorKind::InvalidConfig, "stage durations must be positive");
    const auto n = static_cast<std::size_t>(std::llround(circuit[i].duration_s * fs));
    rec.mode_track.insert(rec.mode_track.end(), n, circuit[i].mode);
    stage_of.insert(stage_of.end(), n, i);
  }
  const std::size_t L = rec.mode_track.size();

  // Cue per sample: index into profile.cue or -1.
  std::vector<int> cue(L, -1);
  const auto cue_len = static_cast<std::size_t>(std::llround(profile.transition_s * fs)) + 1;
  std::size_t previous_change = 0;
  for (std::size_t k = 1; k < L; ++k) {
    const GaitMode a = merge_raw(rec.mode_track[k - 1]);
    const GaitMode b = merge_raw(rec.mode_track[k]);
    if (a == b) continue;
    if (const auto tr = transition_between(a, b)) {
      const std::size_t start = std::max(previous_change, k >= cue_len ? k - cue_len : 0);
      for (std::size_t j = start; j < k; ++j) cue[j] = static_cast<int>(transition_index(*tr));
    }
    previous_change = k;
  }

  std::vector<double> stage_phase(circuit.size());
  for (auto& ph : stage_phase) ph = rng.uniform(0.0, kTwoPi);

  rec.channels.assign(kChannels, std::vector<float>(L));
  for (std::size_t j = 0; j < L; ++j) {
    const RawMode raw = rec.mode_track[j];
    const ModeSignature& sig = profile.steady[steady_index(merge_raw(raw))];
    double freq = sig.frequency_hz;
    double amp_scale = 1.0;
    switch (raw) {
      case RawMode::St: amp_scale = 0.5; break;
      case RawMode::RA: freq *= 0.9; amp_scale = 1.15; break;
      case RawMode::RD: freq *= 1.1; amp_scale = 1.15; break;
      default: break;
    }
    const double t = static_cast<double>(j) / fs;
    const double arg = kTwoPi * freq * t + stage_phase[stage_of[j]];
    for (std::size_t c = 0; c < kChannels; ++c) {
      double v = sig.baseline[c] + profile.offset[c] +
                 profile.gain[c] * amp_scale * sig.amplitude[c] * std::sin(arg + sig.phase[c]);
      if (cue[j] >= 0) v += profile.gain[c] * profile.cue[static_cast<std::size_t>(cue[j])][c];
      if (profile.noise_std > 0.0) v += profile.noise_std * rng.normal();
      rec.channels[c][j] = static_cast<float>(v);
    }
  }
  return rec;
}

std::vector<Recording> gen_recordings(const SynthDatasetOptions& options) {
  if (options.subjects == 0 || options.trials_per_subject == 0) {
    fail(ErrorKind::InvalidConfig, "synthetic dataset needs at least one subject and one trial");
  }
  const Rng root(options.seed);
  Rng pop_rng = root.fork("population");
  const Population pop = make_population(options.config, pop_rng);
  std::vector<Recording> out;
  for (std::size_t s = 1; s <= options.subjects; ++s) {
    const std::string id = numbered("SYN", s);
    Rng subject_rng = root.fork("subject/" + id);
    const SubjectProfile profile = make_subject(pop, id, subject_rng);
    for (std::size_t t = 1; t <= options.trials_per_subject; ++t) {
      const std::string trial = numbered("T", t);
      Rng trial_rng = root.fork(id + "/" + trial);
      const auto circuit = make_circuit(t % 2 == 1 ? 1 : 2, trial_rng, options.time_scale);
      out.push_back(gen_recording(profile, circuit, options.sample_rate_hz, trial_rng, trial));
    }
  }
  return out;
}

DatasetManifest gen_dataset(const SynthDatasetOptions& options, const std::filesystem::path& root) {
  const auto recordings = gen_recordings(options);
  DatasetManifest manifest;
  manifest.sample_rate_hz = options.sample_rate_hz;
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + root.string() + ": " + ec.message());
  for (const auto& rec : recordings) {
    if (manifest.subjects.empty() || manifest.subjects.back().id != rec.subject_id) {
      manifest.subjects.push_back({rec.subject_id, {}});
      std::filesystem::create_directories(root / rec.subject_id, ec);
      if (ec) fail(ErrorKind::Io, "cannot create subject directory: " + ec.message());
    }
    manifest.subjects.back().trials.push_back(rec.trial_id);
    write_recording(rec, root / rec.subject_id / (rec.trial_id + ".csv"));
  }
  save_manifest(manifest, root);
  return manifest;
}

}  // namespace gaitmind
