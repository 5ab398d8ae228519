#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gaitmind/modes.hpp"

namespace gaitmind {

/// One subject-trial: equally long channel signals plus a raw mode track.
struct Recording {
  std::string subject_id;
  std::string trial_id;
  double sample_rate_hz = 500.0;
  std::vector<std::string> channel_names;
  std::vector<std::vector<float>> channels;
  std::vector<RawMode> mode_track;

  std::size_t length() const noexcept { return mode_track.size(); }
  /// Throws InvalidConfig if the channel is absent.
  const std::vector<float>& channel(std::string_view name) const;
  bool has_channel(std::string_view name) const;
  /// Throws InvalidInput when lengths disagree or the rate is not positive.
  void validate() const;
};

enum class SensorSetup { UnilateralThigh, BilateralThigh, ProstheticSensors, All };

inline constexpr std::array<SensorSetup, 4> kAllSensorSetups = {
    SensorSetup::UnilateralThigh, SensorSetup::BilateralThigh, SensorSetup::ProstheticSensors,
    SensorSetup::All};

std::string_view to_string(SensorSetup setup);
/// Accepts "unilateral", "bilateral", "prosthetic", "all" and the long names
/// ("unilateral_thigh", "bilateral_thigh", "prosthetic_sensors").
SensorSetup parse_sensor_setup(std::string_view text);

/// Prosthesis side is R. IMU channels are {gx,gy,gz,ax,ay,az}.
struct SensorConfig {
  SensorSetup setup = SensorSetup::UnilateralThigh;
  std::vector<std::string> channel_names;

  static SensorConfig make(SensorSetup setup);
  std::size_t channel_count() const noexcept { return channel_names.size(); }
};

/// The 22 canonical channel names in CSV column order.
const std::vector<std::string>& canonical_channels();

/// Parses one trial CSV (`t,<channels>...,mode`). subject_id and trial_id come
/// from the parent directory and file stem. The sample rate is taken from
/// `sample_rate_hz` when given, otherwise from the first time step.
Recording load_recording(const std::filesystem::path& path,
                         std::optional<double> sample_rate_hz = std::nullopt);

void write_recording(const Recording& rec, const std::filesystem::path& path);

struct DatasetManifest {
  struct Subject {
    std::string id;
    std::vector<std::string> trials;
  };
  double sample_rate_hz = 500.0;
  std::vector<Subject> subjects;
};

DatasetManifest load_manifest(const std::filesystem::path& root);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& root);

/// Loads every trial listed in `<root>/manifest.json` from `<root>/<subject>/<trial>.csv`.
std::vector<Recording> load_dataset(const std::filesystem::path& root);

std::vector<Recording> exclude_subjects(std::vector<Recording> recordings,
                                        const std::set<std::string>& ids);

}  // namespace gaitmind
