#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitmind/modes.hpp"
#include "gaitmind/network.hpp"
#include "gaitmind/windows.hpp"

namespace gaitmind {

using ConfusionMatrix = std::array<std::array<std::size_t, kModeCount>, kModeCount>;

/// Error rates for one test set.
///
///   overall = 1 - correct / total
///   ss      = 1 - ss_correct / n_ss   (undefined when n_ss == 0)
///   ts      = 1 - ts_correct / n_ts   (undefined when n_ts == 0)
///
/// confusion[true][predicted] counts samples.
struct EvalReport {
  std::string subject_id;
  std::string sensor_config;
  std::string protocol;
  std::optional<int> tl_fraction;

  double overall_error = 0.0;
  std::optional<double> ss_error;
  std::optional<double> ts_error;
  ConfusionMatrix confusion{};
  std::size_t n_ss = 0;
  std::size_t n_ts = 0;
  std::size_t ss_correct = 0;
  std::size_t ts_correct = 0;

  std::size_t total() const noexcept { return n_ss + n_ts; }
  std::size_t correct() const noexcept { return ss_correct + ts_correct; }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const float> values);

/// Eval-mode argmax labels, computed in batches of `batch_size`.
std::vector<int> classify_samples(Network& net, std::span<const WindowSample* const> samples,
                                  std::size_t batch_size = 256);

/// Stacks samples into [B, C, W] plus their label codes.
Tensor stack_windows(std::span<const WindowSample* const> samples, std::vector<int>* labels = nullptr);

/// Throws InvalidInput on length mismatch or empty input, InvalidLabel on
/// codes outside [0, 10).
EvalReport compute_report(std::span<const int> truth, std::span<const int> predicted,
                          std::span<const StateTag> tags);

/// Convenience: classify, tag by label class, and compute.
EvalReport evaluate(Network& net, std::span<const WindowSample* const> samples);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for n == 1
  double sem = 0.0;  // std / sqrt(n)
  std::size_t n = 0; // reports where the metric is defined
};

struct AggregateStats {
  MetricStats overall;
  MetricStats ss;
  MetricStats ts;
  std::size_t reports = 0;
};

MetricStats summarize(std::span<const double> values);
AggregateStats aggregate(std::span<const EvalReport> reports);

// ---------------------------------------------------------------------------
// report files

enum class ReportFormat { Json, Csv, Markdown };

ReportFormat parse_report_format(std::string_view text);
std::string_view extension(ReportFormat format);

/// Canonical order: protocol, sensor config, tl fraction, subject.
void sort_reports(std::vector<EvalReport>& reports);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view text);
void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

/// Per-subject table. CSV header: subject,config,protocol,overall,ss,ts,n_ss,n_ts
std::string format_reports(std::vector<EvalReport> reports, ReportFormat format);
void emit_report(std::vector<EvalReport> reports, const std::filesystem::path& path,
                 ReportFormat format);

struct AggregateRow {
  std::string sensor_config;
  std::string protocol;
  std::optional<int> tl_fraction;
  AggregateStats stats;
};

/// Groups by (sensor config, protocol, fraction) in canonical order.
std::vector<AggregateRow> aggregate_by_group(std::span<const EvalReport> reports);

/// Means and standard deviations are printed as percentages with four
/// decimals; CSV and Markdown use the same strings. Markdown follows the
/// "mean[std]" layout with one block of Overall/SS/TS rows per sensor setup.
std::string format_aggregate(std::span<const AggregateRow> rows, ReportFormat format);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace gaitmind
