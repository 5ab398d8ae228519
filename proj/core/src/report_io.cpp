#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "gaitmind/error.hpp"
#include "gaitmind/evaluation.hpp"
#include "gaitmind/recording.hpp"

namespace gaitmind {

namespace {

using nlohmann::json;

int protocol_rank(const std::string& p) {
  if (p == "dep") return 0;
  if (p == "ind") return 1;
  if (p == "transfer") return 2;
  return 3;
}

int config_rank(const std::string& c) {
  for (std::size_t i = 0; i < kAllSensorSetups.size(); ++i)
    if (to_string(kAllSensorSetups[i]) == c) return static_cast<int>(i);
  return static_cast<int>(kAllSensorSetups.size());
}

auto group_key(const std::string& config, const std::string& protocol, std::optional<int> fraction) {
  return std::make_tuple(protocol_rank(protocol), protocol, config_rank(config), config,
                         fraction.value_or(-1));
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::string fraction_str(std::optional<double> v) { return v ? fmt("%.6f", *v) : std::string(); }

std::string protocol_label(const std::string& protocol, std::optional<int> fraction) {
  return fraction ? protocol + "_" + std::to_string(*fraction) : protocol;
}

json optional_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json to_json(const EvalReport& r) {
  json confusion = json::array();
  for (const auto& row : r.confusion) confusion.push_back(row);
  return json{{"subject", r.subject_id},
              {"config", r.sensor_config},
              {"protocol", r.protocol},
              {"tl_fraction", r.tl_fraction ? json(*r.tl_fraction) : json(nullptr)},
              {"overall", r.overall_error},
              {"ss", optional_json(r.ss_error)},
              {"ts", optional_json(r.ts_error)},
              {"n_ss", r.n_ss},
              {"n_ts", r.n_ts},
              {"ss_correct", r.ss_correct},
              {"ts_correct", r.ts_correct},
              {"confusion", confusion}};
}

std::optional<double> optional_double(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

EvalReport from_json(const json& j) {
  EvalReport r;
  r.subject_id = j.at("subject").get<std::string>();
  r.sensor_config = j.at("config").get<std::string>();
  r.protocol = j.at("protocol").get<std::string>();
  if (!j.at("tl_fraction").is_null()) r.tl_fraction = j.at("tl_fraction").get<int>();
  r.overall_error = j.at("overall").get<double>();
  r.ss_error = optional_double(j, "ss");
  r.ts_error = optional_double(j, "ts");
  r.n_ss = j.at("n_ss").get<std::size_t>();
  r.n_ts = j.at("n_ts").get<std::size_t>();
  r.ss_correct = j.at("ss_correct").get<std::size_t>();
  r.ts_correct = j.at("ts_correct").get<std::size_t>();
  const auto& conf = j.at("confusion");
  if (!conf.is_array() || conf.size() != kModeCount) fail(ErrorKind::Parse, "confusion must be 10x10");
  for (std::size_t t = 0; t < kModeCount; ++t) {
    if (!conf[t].is_array() || conf[t].size() != kModeCount) fail(ErrorKind::Parse, "confusion must be 10x10");
    for (std::size_t p = 0; p < kModeCount; ++p) r.confusion[t][p] = conf[t][p].get<std::size_t>();
  }
  return r;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string pct(double v) { return fmt("%.4f", 100.0 * v); }

struct Cells {
  std::string mean, std, sem;
};

Cells cells(const MetricStats& m) {
  if (m.n == 0) return {};
  return {pct(m.mean), pct(m.std), pct(m.sem)};
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "md" || text == "markdown") return ReportFormat::Markdown;
  fail(ErrorKind::InvalidConfig, "unknown report format '" + std::string(text) + "' (json, csv, md)");
}

std::string_view extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Markdown: return "md";
  }
  return "txt";
}

void sort_reports(std::vector<EvalReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const EvalReport& a, const EvalReport& b) {
    return std::tuple_cat(group_key(a.sensor_config, a.protocol, a.tl_fraction), std::tie(a.subject_id)) <
           std::tuple_cat(group_key(b.sensor_config, b.protocol, b.tl_fraction), std::tie(b.subject_id));
  });
}

std::string report_to_json(const EvalReport& report) { return to_json(report).dump(2) + "\n"; }

EvalReport report_from_json(std::string_view text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed report: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  write_text_file(path, report_to_json(report));
}

EvalReport load_report(const std::filesystem::path& path) {
  try {
    return report_from_json(read_text_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) fail(ErrorKind::Parse, path.string() + ": " + e.what());
    throw;
  }
}

std::string format_reports(std::vector<EvalReport> reports, ReportFormat format) {
  sort_reports(reports);
  std::ostringstream out;
  switch (format) {
    case ReportFormat::Json: {
      json arr = json::array();
      for (const auto& r : reports) arr.push_back(to_json(r));
      out << arr.dump(2) << "\n";
      break;
    }
    case ReportFormat::Csv:
      out << "subject,config,protocol,overall,ss,ts,n_ss,n_ts\n";
      for (const auto& r : reports) {
        out << r.subject_id << ',' << r.sensor_config << ',' << protocol_label(r.protocol, r.tl_fraction)
            << ',' << fmt("%.6f", r.overall_error) << ',' << fraction_str(r.ss_error) << ','
            << fraction_str(r.ts_error) << ',' << r.n_ss << ',' << r.n_ts << "\n";
      }
      break;
    case ReportFormat::Markdown:
      out << "| subject | config | protocol | overall | ss | ts | n_ss | n_ts |\n";
      out << "|---|---|---|---|---|---|---|---|\n";
      for (const auto& r : reports) {
        const auto na = [](std::optional<double> v) { return v ? fmt("%.6f", *v) : std::string("n/a"); };
        out << "| " << r.subject_id << " | " << r.sensor_config << " | "
            << protocol_label(r.protocol, r.tl_fraction) << " | " << fmt("%.6f", r.overall_error) << " | "
            << na(r.ss_error) << " | " << na(r.ts_error) << " | " << r.n_ss << " | " << r.n_ts << " |\n";
      }
      break;
  }
  return out.str();
}

void emit_report(std::vector<EvalReport> reports, const std::filesystem::path& path,
                 ReportFormat format) {
  write_text_file(path, format_reports(std::move(reports), format));
}

std::vector<AggregateRow> aggregate_by_group(std::span<const EvalReport> reports) {
  using Key = decltype(group_key("", "", std::nullopt));
  std::map<Key, std::pair<AggregateRow, std::vector<EvalReport>>> groups;
  for (const auto& r : reports) {
    auto& g = groups[group_key(r.sensor_config, r.protocol, r.tl_fraction)];
    g.first.sensor_config = r.sensor_config;
    g.first.protocol = r.protocol;
    g.first.tl_fraction = r.tl_fraction;
    g.second.push_back(r);
  }
  std::vector<AggregateRow> out;
  for (auto& [key, g] : groups) {
    g.first.stats = aggregate(g.second);
    out.push_back(std::move(g.first));
  }
  return out;
}

std::string format_aggregate(std::span<const AggregateRow> rows, ReportFormat format) {
  std::ostringstream out;
  const std::array<std::pair<const char*, MetricStats AggregateStats::*>, 3> metrics = {{
      {"overall", &AggregateStats::overall},
      {"ss", &AggregateStats::ss},
      {"ts", &AggregateStats::ts},
  }};
  switch (format) {
    case ReportFormat::Json: {
      json arr = json::array();
      for (const auto& row : rows) {
        json j{{"config", row.sensor_config},
               {"protocol", row.protocol},
               {"tl_fraction", row.tl_fraction ? json(*row.tl_fraction) : json(nullptr)},
               {"reports", row.stats.reports}};
        for (const auto& [name, member] : metrics) {
          const MetricStats& m = row.stats.*member;
          j[name] = m.n == 0 ? json(nullptr)
                             : json{{"mean", m.mean}, {"std", m.std}, {"sem", m.sem}, {"n", m.n}};
        }
        arr.push_back(std::move(j));
      }
      out << arr.dump(2) << "\n";
      break;
    }
    case ReportFormat::Csv:
      out << "config,protocol,metric,mean_pct,std_pct,sem_pct,n\n";
      for (const auto& row : rows) {
        for (const auto& [name, member] : metrics) {
          const MetricStats& m = row.stats.*member;
          const Cells c = cells(m);
          out << row.sensor_config << ',' << protocol_label(row.protocol, row.tl_fraction) << ',' << name
              << ',' << c.mean << ',' << c.std << ',' << c.sem << ',' << m.n << "\n";
        }
      }
      break;
    case ReportFormat::Markdown: {
      // Columns are the distinct protocols, rows are setup x metric.
      std::vector<std::string> columns;
      std::vector<std::string> configs;
      for (const auto& row : rows) {
        const std::string col = protocol_label(row.protocol, row.tl_fraction);
        if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
        if (std::find(configs.begin(), configs.end(), row.sensor_config) == configs.end())
          configs.push_back(row.sensor_config);
      }
      std::sort(configs.begin(), configs.end(),
                [](const std::string& a, const std::string& b) {
                  return std::make_pair(config_rank(a), a) < std::make_pair(config_rank(b), b);
                });
      out << "| sensor setup | error |";
      for (const auto& c : columns) out << ' ' << c << " |";
      out << "\n|---|---|";
      for (std::size_t i = 0; i < columns.size(); ++i) out << "---|";
      out << "\n";
      for (const auto& config : configs) {
        for (const auto& [name, member] : metrics) {
          out << "| " << config << " | " << name << " |";
          for (const auto& col : columns) {
            std::string cell = "n/a";
            for (const auto& row : rows) {
              if (row.sensor_config != config || protocol_label(row.protocol, row.tl_fraction) != col) continue;
              const MetricStats& m = row.stats.*member;
              if (m.n > 0) {
                const Cells c = cells(m);
                cell = c.mean + "[" + c.std + "]";
              }
            }
            out << ' ' << cell << " |";
          }
          out << "\n";
        }
      }
      out << "\nValues are error rates in percent, mean[std] across subjects.\n";
      break;
    }
  }
  return out.str();
}

}  // namespace gaitmind
