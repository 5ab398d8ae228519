#include "gaitmind/modes.hpp"

#include <string>

#include "gaitmind/error.hpp"

namespace gaitmind {

namespace {

constexpr std::array<std::string_view, kModeCount> kModeNames = {
    "S", "LW", "SA", "SD", "S2W", "W2S", "W2SA", "SA2W", "W2SD", "SD2W"};

constexpr std::array<std::string_view, 7> kRawNames = {"S", "St", "LW", "RA", "RD", "SA", "SD"};

}  // namespace

std::string_view to_string(GaitMode mode) { return kModeNames[static_cast<std::size_t>(code(mode))]; }

std::string_view to_string(RawMode mode) { return kRawNames[static_cast<std::size_t>(mode)]; }

std::optional<GaitMode> parse_gait_mode(std::string_view text) {
  for (std::size_t i = 0; i < kModeNames.size(); ++i)
    if (kModeNames[i] == text) return static_cast<GaitMode>(i);
  return std::nullopt;
}

std::optional<RawMode> parse_raw_mode(std::string_view text) {
  for (std::size_t i = 0; i < kRawNames.size(); ++i)
    if (kRawNames[i] == text) return static_cast<RawMode>(i);
  return std::nullopt;
}

GaitMode gait_mode_from_code(int c) {
  if (c < 0 || c >= static_cast<int>(kModeCount)) {
    fail(ErrorKind::InvalidLabel, "mode code " + std::to_string(c) + " outside [0,10)");
  }
  return static_cast<GaitMode>(c);
}

GaitMode merge_raw(RawMode raw) {
  switch (raw) {
    case RawMode::S: return GaitMode::S;
    case RawMode::St:
    case RawMode::LW:
    case RawMode::RA:
    case RawMode::RD: return GaitMode::LW;
    case RawMode::SA: return GaitMode::SA;
    case RawMode::SD: return GaitMode::SD;
  }
  return GaitMode::LW;
}

std::optional<GaitMode> transition_between(GaitMode from, GaitMode to) {
  if (from == GaitMode::S && to == GaitMode::LW) return GaitMode::S2W;
  if (from == GaitMode::LW && to == GaitMode::S) return GaitMode::W2S;
  if (from == GaitMode::LW && to == GaitMode::SA) return GaitMode::W2SA;
  if (from == GaitMode::SA && to == GaitMode::LW) return GaitMode::SA2W;
  if (from == GaitMode::LW && to == GaitMode::SD) return GaitMode::W2SD;
  if (from == GaitMode::SD && to == GaitMode::LW) return GaitMode::SD2W;
  return std::nullopt;
}

}  // namespace gaitmind
