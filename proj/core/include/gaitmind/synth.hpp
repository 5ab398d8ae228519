#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gaitmind/recording.hpp"
#include "gaitmind/rng.hpp"

namespace gaitmind {

/// Knobs of the synthetic gait generator.
///
/// Every channel of a steady segment in merged mode m is
///   baseline[m][c] + offset[c] + gain[c] * amp[m][c] * sin(2 pi f_m t + phase[m][c] + phi)
/// plus N(0, noise_std) noise. Mode baselines are built so that, in every
/// IMU, mode m raises channel m by `separation`; any two modes' baseline
/// vectors therefore differ by at least `separation` (max-norm), and that
/// separation is shared by all subjects because subject offsets are common to
/// all modes. The `transition_s` seconds before a change (plus one sample)
/// carry an additive cue specific to the transition class.
struct SynthConfig {
  double separation = 1.0;
  double amplitude = 1.0;
  double noise_std = 0.2;
  double cue_magnitude = 1.5;
  double transition_s = 0.5;
  /// Scale of inter-subject variation (offsets, gains, per-mode style).
  double subject_shift = 0.2;
};

struct ModeSignature {
  double frequency_hz = 1.0;
  std::vector<double> baseline;   // per canonical channel
  std::vector<double> amplitude;  // per canonical channel
  std::vector<double> phase;      // per canonical channel
};

struct SubjectProfile {
  std::string subject_id;
  std::array<ModeSignature, 4> steady;  // S, LW, SA, SD
  std::array<std::vector<double>, 6> cue;  // S2W .. SD2W, per channel
  std::vector<double> offset;
  std::vector<double> gain;
  double noise_std = 0.2;
  double transition_s = 0.5;
};

/// Population-level mode structure shared by every subject.
struct Population {
  SynthConfig config;
  std::array<ModeSignature, 4> steady;
  std::array<std::vector<double>, 6> cue;
};

Population make_population(const SynthConfig& config, Rng& rng);
SubjectProfile make_subject(const Population& population, const std::string& subject_id, Rng& rng);

struct CircuitStage {
  RawMode mode;
  double duration_s;
};

/// S, St, LW, SA, LW, RD, LW, S (stage 1) or S, St, LW, RA, LW, SD, LW, S
/// (stage 2), each duration scaled by `time_scale` and jittered by up to 20%.
std::vector<CircuitStage> make_circuit(int stage, Rng& rng, double time_scale = 1.0);

/// All 22 canonical channels.
Recording gen_recording(const SubjectProfile& profile, const std::vector<CircuitStage>& circuit,
                        double fs, Rng& rng, const std::string& trial_id = "T01");

struct SynthDatasetOptions {
  std::size_t subjects = 4;
  std::size_t trials_per_subject = 6;
  double sample_rate_hz = 500.0;
  std::uint64_t seed = 1;
  double time_scale = 1.0;
  SynthConfig config{};
};

/// In-memory dataset: trials alternate circuit stages so every class occurs.
/// Subject ids are SYN01.., trial ids T01...
std::vector<Recording> gen_recordings(const SynthDatasetOptions& options);

/// Writes `<root>/manifest.json` and `<root>/<subject>/<trial>.csv`.
DatasetManifest gen_dataset(const SynthDatasetOptions& options, const std::filesystem::path& root);

}  // namespace gaitmind
