#include "gaitmind/recording.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaitmind/error.hpp"

namespace gaitmind {

namespace {

std::vector<std::string> imu(const std::string& prefix) {
  return {prefix + "_gx", prefix + "_gy", prefix + "_gz", prefix + "_ax", prefix + "_ay", prefix + "_az"};
}

void append(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line,
                              const std::string& why) {
  fail(ErrorKind::Parse, path.string() + ":" + std::to_string(line) + ": " + why);
}

}  // namespace

const std::vector<float>& Recording::channel(std::string_view name) const {
  for (std::size_t i = 0; i < channel_names.size(); ++i)
    if (channel_names[i] == name) return channels[i];
  fail(ErrorKind::InvalidConfig, "recording " + subject_id + "/" + trial_id + " has no channel '" +
                                     std::string(name) + "'");
}

bool Recording::has_channel(std::string_view name) const {
  return std::find(channel_names.begin(), channel_names.end(), name) != channel_names.end();
}

void Recording::validate() const {
  if (!(sample_rate_hz > 0.0)) fail(ErrorKind::InvalidInput, "sample rate must be positive");
  if (channels.size() != channel_names.size()) {
    fail(ErrorKind::InvalidInput, "channel names and channel data disagree");
  }
  for (const auto& ch : channels) {
    if (ch.size() != mode_track.size()) {
      fail(ErrorKind::InvalidInput, "channel length differs from mode track in " + subject_id +
                                        "/" + trial_id);
    }
  }
}

std::string_view to_string(SensorSetup setup) {
  switch (setup) {
    case SensorSetup::UnilateralThigh: return "unilateral_thigh";
    case SensorSetup::BilateralThigh: return "bilateral_thigh";
    case SensorSetup::ProstheticSensors: return "prosthetic_sensors";
    case SensorSetup::All: return "all";
  }
  return "unknown";
}

SensorSetup parse_sensor_setup(std::string_view text) {
  if (text == "unilateral" || text == "unilateral_thigh") return SensorSetup::UnilateralThigh;
  if (text == "bilateral" || text == "bilateral_thigh") return SensorSetup::BilateralThigh;
  if (text == "prosthetic" || text == "prosthetic_sensors") return SensorSetup::ProstheticSensors;
  if (text == "all") return SensorSetup::All;
  fail(ErrorKind::InvalidConfig, "unknown sensor configuration '" + std::string(text) + "'");
}

SensorConfig SensorConfig::make(SensorSetup setup) {
  SensorConfig cfg;
  cfg.setup = setup;
  const auto prosthetic = [&] {
    append(cfg.channel_names, imu("R_thigh"));
    append(cfg.channel_names, imu("R_shank"));
    append(cfg.channel_names, {"knee_angle", "knee_vel", "ankle_angle", "ankle_vel"});
  };
  switch (setup) {
    case SensorSetup::UnilateralThigh:
      append(cfg.channel_names, imu("R_thigh"));
      break;
    case SensorSetup::BilateralThigh:
      append(cfg.channel_names, imu("R_thigh"));
      append(cfg.channel_names, imu("L_thigh"));
      break;
    case SensorSetup::ProstheticSensors:
      prosthetic();
      break;
    case SensorSetup::All:
      prosthetic();
      append(cfg.channel_names, imu("L_thigh"));
      break;
  }
  return cfg;
}

const std::vector<std::string>& canonical_channels() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    append(n, imu("R_thigh"));
    append(n, imu("L_thigh"));
    append(n, imu("R_shank"));
    append(n, {"knee_angle", "knee_vel", "ankle_angle", "ankle_vel"});
    return n;
  }();
  return names;
}

Recording load_recording(const std::filesystem::path& path, std::optional<double> sample_rate_hz) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open recording " + path.string());

  Recording rec;
  rec.subject_id = path.parent_path().filename().string();
  rec.trial_id = path.stem().string();

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t n_channels = 0;
  std::vector<double> times;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto fields = split_commas(row);
    if (!have_header) {
      if (fields.size() < 2 || trim(fields.front()) != "t" || trim(fields.back()) != "mode") {
        parse_error(path, line_no, "header must be 't,<channel>...,mode'");
      }
      n_channels = fields.size() - 2;
      for (std::size_t i = 1; i + 1 < fields.size(); ++i) {
        std::string name(trim(fields[i]));
        if (name.empty()) parse_error(path, line_no, "empty channel name");
        if (rec.has_channel(name)) parse_error(path, line_no, "duplicate channel '" + name + "'");
        rec.channel_names.push_back(std::move(name));
      }
      rec.channels.resize(n_channels);
      have_header = true;
      continue;
    }
    if (fields.size() != n_channels + 2) {
      parse_error(path, line_no, "row has " + std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(n_channels + 2));
    }
    double t = 0.0;
    if (!parse_double(fields.front(), t)) parse_error(path, line_no, "bad time value");
    if (!times.empty() && !(t > times.back())) {
      parse_error(path, line_no, "time column must increase monotonically");
    }
    times.push_back(t);
    for (std::size_t c = 0; c < n_channels; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c + 1], v)) {
        parse_error(path, line_no, "bad value in column '" + rec.channel_names[c] + "'");
      }
      rec.channels[c].push_back(static_cast<float>(v));
    }
    const auto token = trim(fields.back());
    const auto mode = parse_raw_mode(token);
    if (!mode) parse_error(path, line_no, "unknown mode token '" + std::string(token) + "'");
    rec.mode_track.push_back(*mode);
  }
  if (!have_header) parse_error(path, line_no, "missing header");

  if (sample_rate_hz) {
    rec.sample_rate_hz = *sample_rate_hz;
  } else if (times.size() >= 2) {
    rec.sample_rate_hz = 1.0 / (times[1] - times[0]);
  }
  rec.validate();
  return rec;
}

void write_recording(const Recording& rec, const std::filesystem::path& path) {
  rec.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << 't';
  for (const auto& n : rec.channel_names) out << ',' << n;
  out << ",mode\n";
  char buf[64];
  for (std::size_t i = 0; i < rec.length(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(i) / rec.sample_rate_hz);
    out << buf;
    for (const auto& ch : rec.channels) {
      // %.9g round-trips any float exactly
      std::snprintf(buf, sizeof(buf), ",%.9g", static_cast<double>(ch[i]));
      out << buf;
    }
    out << ',' << to_string(rec.mode_track[i]) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& root) {
  const auto path = root / "manifest.json";
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    for (const auto& s : j.at("subjects")) {
      m.subjects.push_back({s.at("id").get<std::string>(), s.at("trials").get<std::vector<std::string>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  if (!(m.sample_rate_hz > 0.0)) fail(ErrorKind::Parse, path.string() + ": sample_rate_hz must be positive");
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& root) {
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& s : manifest.subjects) subjects.push_back({{"id", s.id}, {"trials", s.trials}});
  const nlohmann::json j = {{"sample_rate_hz", manifest.sample_rate_hz}, {"subjects", subjects}};
  std::ofstream out(root / "manifest.json", std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write manifest in " + root.string());
  out << j.dump(2) << '\n';
}

std::vector<Recording> load_dataset(const std::filesystem::path& root) {
  const auto manifest = load_manifest(root);
  std::vector<Recording> out;
  for (const auto& s : manifest.subjects) {
    for (const auto& t : s.trials) {
      auto rec = load_recording(root / s.id / (t + ".csv"), manifest.sample_rate_hz);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<Recording> exclude_subjects(std::vector<Recording> recordings,
                                        const std::set<std::string>& ids) {
  std::erase_if(recordings, [&](const Recording& r) { return ids.count(r.subject_id) > 0; });
  return recordings;
}

}  // namespace gaitmind
