#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaitmind/network.hpp"
#include "gaitmind/optim.hpp"
#include "gaitmind/recording.hpp"
#include "gaitmind/windows.hpp"

namespace gaitmind {

enum class Protocol { Dep, Ind, Transfer };

std::string_view to_string(Protocol protocol);
Protocol parse_protocol(std::string_view text);

/// Hyperparameters of one training run.
///
///   protocol  epochs  batch  lr      optimizer
///   dep       30      512    1e-4    adam
///   ind       35      1024   1.5e-4  adam
///   transfer  100     256    1e-4    sgd
struct ExperimentPlan {
  Protocol protocol = Protocol::Dep;
  SensorSetup sensor_config = SensorSetup::BilateralThigh;
  int epochs = 30;
  std::size_t batch_size = 512;
  double lr = 1e-4;
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::uint64_t seed = 0;
  std::optional<int> tl_fraction;
  bool tl_reinit_head = true;

  static ExperimentPlan defaults(Protocol protocol);
  void validate() const;
};

/// Optional shrinking of the standard topology.
struct ModelOverrides {
  std::optional<std::vector<std::size_t>> block_channels;
  std::optional<std::size_t> hidden_width;
  std::optional<double> dropout;

  bool empty() const noexcept { return !block_channels && !hidden_width && !dropout; }
};

NetworkSpec make_spec(Arch arch, std::size_t in_channels, std::size_t window_len,
                      const ModelOverrides& overrides = {});

/// Experiment config file. Hyperparameters left unset fall back to the
/// protocol defaults when a plan is resolved, so a protocol override on the
/// command line picks up the right defaults.
struct ExperimentConfig {
  Protocol protocol = Protocol::Dep;
  SensorSetup sensor_config = SensorSetup::BilateralThigh;
  std::filesystem::path dataset_root;
  std::optional<int> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<OptimizerKind> optimizer;
  std::uint64_t seed = 0;
  double window_ms = 500.0;
  double stride_ms = 100.0;
  double transition_ms = 500.0;
  std::optional<double> sample_rate_hz;
  std::optional<int> tl_fraction;
  bool tl_reinit_head = true;
  std::vector<std::string> excluded_subjects{"AB186"};
  std::filesystem::path output_dir = "runs";
  ModelOverrides model;

  ExperimentPlan plan() const { return plan_for(protocol); }
  ExperimentPlan plan_for(Protocol p) const;
  WindowParams window_params() const { return {window_ms, stride_ms, transition_ms}; }
  void validate() const;
};

/// Unknown keys and wrongly typed values raise InvalidConfig.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved config (protocol defaults filled in) as pretty JSON.
std::string config_to_json(const ExperimentConfig& config);

}  // namespace gaitmind
