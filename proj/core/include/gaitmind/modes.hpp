#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace gaitmind {

/// Raw per-sample mode tokens as they appear in recordings.
enum class RawMode { S, St, LW, RA, RD, SA, SD };

/// The ten-class output space. Integer codes are fixed and used as labels.
enum class GaitMode : int {
  S = 0,
  LW = 1,
  SA = 2,
  SD = 3,
  S2W = 4,
  W2S = 5,
  W2SA = 6,
  SA2W = 7,
  W2SD = 8,
  SD2W = 9,
};

inline constexpr std::size_t kModeCount = 10;

inline constexpr std::array<GaitMode, kModeCount> kAllModes = {
    GaitMode::S,   GaitMode::LW,   GaitMode::SA,   GaitMode::SD,   GaitMode::S2W,
    GaitMode::W2S, GaitMode::W2SA, GaitMode::SA2W, GaitMode::W2SD, GaitMode::SD2W};

std::string_view to_string(GaitMode mode);
std::string_view to_string(RawMode mode);
std::optional<GaitMode> parse_gait_mode(std::string_view text);
std::optional<RawMode> parse_raw_mode(std::string_view text);

constexpr int code(GaitMode mode) { return static_cast<int>(mode); }
GaitMode gait_mode_from_code(int code);

constexpr bool is_transition(GaitMode mode) { return code(mode) >= code(GaitMode::S2W); }

/// Standing and ramp walking fold into level walking.
GaitMode merge_raw(RawMode raw);

/// The transition class for a change between two steady modes, if the pair
/// is one of the six modelled transitions.
std::optional<GaitMode> transition_between(GaitMode from, GaitMode to);

enum class StateTag { SS, TS };

/// TS for transition classes, SS otherwise.
constexpr StateTag ss_ts_tag(GaitMode label) {
  return is_transition(label) ? StateTag::TS : StateTag::SS;
}

}  // namespace gaitmind
