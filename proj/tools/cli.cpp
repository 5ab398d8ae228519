#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitmind/plan.hpp"
#include "gaitmind/protocols.hpp"
#include "gaitmind/synth.hpp"

namespace gaitmind::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::string opt_pct(const std::optional<double>& v) { return v ? num("%.2f%%", 100.0 * *v) : "n/a"; }

/// Collects run metadata and writes run.json when the command finishes.
class RunRecord {
 public:
  RunRecord(std::string command, const std::vector<std::string>& args)
      : start_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["args"] = args;
    j_["started_at"] = utc_now();
  }
  json& operator[](const char* key) { return j_[key]; }
  void write(const fs::path& dir) {
    j_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_text_file(dir / "run.json", j_.dump(2) + "\n");
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

struct ConfigOverrides {
  std::string protocol;
  std::string dataset;
  std::string out;
  std::string sensor_config;
  std::vector<std::uint64_t> seed;
  int epochs = 0;

  void add_to(CLI::App* app) {
    app->add_option("--dataset", dataset, "Override dataset_root");
    app->add_option("--out", out, "Override output_dir");
    app->add_option("--sensor-config", sensor_config, "Override sensor_config");
    app->add_option("--seed", seed, "Override seed")->expected(1);
    app->add_option("--epochs", epochs, "Override epochs")->check(CLI::PositiveNumber);
  }

  json apply(ExperimentConfig& cfg) const {
    json applied = json::object();
    if (!protocol.empty()) {
      cfg.protocol = parse_protocol(protocol);
      applied["protocol"] = protocol;
    }
    if (!dataset.empty()) {
      cfg.dataset_root = dataset;
      applied["dataset_root"] = dataset;
    }
    if (!out.empty()) {
      cfg.output_dir = out;
      applied["output_dir"] = out;
    }
    if (!sensor_config.empty()) {
      cfg.sensor_config = parse_sensor_setup(sensor_config);
      applied["sensor_config"] = sensor_config;
    }
    if (!seed.empty()) {
      cfg.seed = seed.front();
      applied["seed"] = cfg.seed;
    }
    if (epochs > 0) {
      cfg.epochs = epochs;
      applied["epochs"] = epochs;
    }
    cfg.validate();
    return applied;
  }
};

std::vector<Recording> load_recordings(const ExperimentConfig& cfg) {
  if (cfg.dataset_root.empty()) fail(ErrorKind::InvalidConfig, "dataset_root is not set");
  auto recs = load_dataset(cfg.dataset_root);
  recs = exclude_subjects(std::move(recs), {cfg.excluded_subjects.begin(), cfg.excluded_subjects.end()});
  if (recs.empty()) fail(ErrorKind::InsufficientData, "no recordings left after exclusions");
  if (cfg.sample_rate_hz)
    for (auto& r : recs) r.sample_rate_hz = *cfg.sample_rate_hz;
  return recs;
}

WindowedDataset load_windows(const ExperimentConfig& cfg, SensorSetup setup, std::ostream& out) {
  const auto recs = load_recordings(cfg);
  WindowedDataset data = build_windows(recs, setup, cfg.window_params());
  out << "loaded " << recs.size() << " trials, " << data.samples.size() << " windows, "
      << data.sensors.channel_count() << " channels (" << to_string(setup) << "), window "
      << data.window_len << " samples\n";
  return data;
}

json log_to_json(const TrainLog& log) {
  json epochs = json::array();
  for (const auto& e : log.epochs) {
    epochs.push_back({{"train_loss", e.train_loss}, {"val_loss", e.val_loss}, {"val_error", e.val_error}});
  }
  return {{"epochs", epochs}, {"best_epoch", log.best_epoch}, {"model", log.model_path}};
}

std::string report_name(const EvalReport& r) {
  return "report_" + r.subject_id + "_" + r.sensor_config + ".json";
}

/// Writes model, report and training log per fold; returns the reports.
std::vector<EvalReport> save_folds(std::vector<FoldResult>& folds, const fs::path& dir,
                                   std::ostream& out, json& wall) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<EvalReport> reports;
  for (auto& f : folds) {
    const std::string model_file = "model_" + f.subject_id + ".gmwt";
    save_weights(f.model, dir / model_file);
    f.log.model_path = model_file;
    save_report(f.report, dir / report_name(f.report));
    write_text_file(dir / ("trainlog_" + f.subject_id + ".json"), log_to_json(f.log).dump(2) + "\n");
    wall[f.subject_id] = f.log.wall_seconds;
    out << "  " << f.subject_id << ": overall " << opt_pct(f.report.overall_error) << ", ss "
        << opt_pct(f.report.ss_error) << ", ts " << opt_pct(f.report.ts_error) << " (best epoch "
        << f.log.best_epoch + 1 << "/" << f.log.epochs.size() << ")\n";
    reports.push_back(f.report);
  }
  return reports;
}

std::vector<FoldResult> run_protocol(const WindowedDataset& data, const ExperimentConfig& cfg,
                                     const ExperimentPlan& plan) {
  switch (plan.protocol) {
    case Protocol::Dep: return run_dep_all(data, plan, cfg.model);
    case Protocol::Ind: return run_loso(data, plan, cfg.model);
    case Protocol::Transfer: break;
  }
  fail(ErrorKind::InvalidConfig, "use the transfer command for the transfer protocol");
}

void write_aggregates(std::span<const EvalReport> reports, const fs::path& dir) {
  const auto rows = aggregate_by_group(reports);
  for (auto f : {ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown}) {
    write_text_file(dir / ("aggregate." + std::string(extension(f))), format_aggregate(rows, f));
  }
  emit_report({reports.begin(), reports.end()}, dir / "reports.csv", ReportFormat::Csv);
}

// ---------------------------------------------------------------------------

struct GenSynthArgs {
  std::size_t subjects = 4;
  std::size_t trials = 6;
  std::uint64_t seed = 1;
  double fs = 500.0;
  double time_scale = 1.0;
  double subject_shift = SynthConfig{}.subject_shift;
  double noise = SynthConfig{}.noise_std;
  std::string out;
  bool force = false;
};

void cmd_gen_synth(const GenSynthArgs& a, RunRecord& run, std::ostream& out) {
  const fs::path root = a.out;
  if (fs::exists(root)) {
    if (!fs::is_directory(root)) fail(ErrorKind::InvalidConfig, root.string() + " exists and is not a directory");
    if (!fs::is_empty(root)) {
      if (!a.force) fail(ErrorKind::InvalidConfig, root.string() + " is not empty (use --force to overwrite)");
      fs::remove_all(root);
    }
  }
  SynthDatasetOptions opt;
  opt.subjects = a.subjects;
  opt.trials_per_subject = a.trials;
  opt.seed = a.seed;
  opt.sample_rate_hz = a.fs;
  opt.time_scale = a.time_scale;
  opt.config.subject_shift = a.subject_shift;
  opt.config.noise_std = a.noise;
  const DatasetManifest m = gen_dataset(opt, root);
  out << "wrote " << m.subjects.size() << " subjects x " << a.trials << " trials to " << root.string() << "\n";
  run["config"] = {{"subjects", a.subjects}, {"trials", a.trials},          {"seed", a.seed},
                   {"fs", a.fs},             {"time_scale", a.time_scale}, {"subject_shift", a.subject_shift},
                   {"noise_std", a.noise},   {"out", a.out}};
  run.write(root);
}

void cmd_train(const std::string& config_path, const ConfigOverrides& ov, RunRecord& run,
               std::ostream& out) {
  ExperimentConfig cfg = load_config(config_path);
  run["overrides"] = ov.apply(cfg);
  const ExperimentPlan plan = cfg.plan();
  if (plan.protocol == Protocol::Transfer) {
    fail(ErrorKind::InvalidConfig, "use the transfer command for the transfer protocol");
  }
  const WindowedDataset data = load_windows(cfg, cfg.sensor_config, out);
  out << to_string(plan.protocol) << ": " << plan.epochs << " epochs, batch " << plan.batch_size << ", lr "
      << plan.lr << ", " << to_string(plan.optimizer) << ", seed " << plan.seed << "\n";
  auto folds = run_protocol(data, cfg, plan);
  json wall = json::object();
  save_folds(folds, cfg.output_dir, out, wall);
  run["config"] = json::parse(config_to_json(cfg));
  run["train_wall_seconds"] = wall;
  run.write(cfg.output_dir);
}

void cmd_transfer(const std::string& config_path, std::vector<int> fractions, const std::string& pretrained,
                  const std::vector<std::string>& only, const ConfigOverrides& ov, RunRecord& run,
                  std::ostream& out) {
  ExperimentConfig cfg = load_config(config_path);
  json applied = ov.apply(cfg);
  cfg.protocol = Protocol::Transfer;
  if (fractions.empty() && cfg.tl_fraction) fractions.push_back(*cfg.tl_fraction);
  if (fractions.empty()) fail(ErrorKind::InvalidConfig, "no transfer fraction given (--fraction or tl_fraction)");
  for (int f : fractions) transfer_fractions(f);
  applied["fractions"] = fractions;
  run["overrides"] = applied;

  const WindowedDataset data = load_windows(cfg, cfg.sensor_config, out);
  std::vector<std::string> subjects = only.empty() ? data.subjects() : only;
  std::map<std::string, Network> models;
  for (const auto& s : subjects) {
    data.subject(s);
    models.emplace(s, load_weights(fs::path(pretrained) / ("model_" + s + ".gmwt")));
  }

  json wall = json::object();
  for (int f : fractions) {
    ExperimentPlan plan = cfg.plan_for(Protocol::Transfer);
    plan.tl_fraction = f;
    out << "transfer " << f << "%: " << plan.epochs << " epochs, batch " << plan.batch_size << ", lr " << plan.lr
        << ", " << to_string(plan.optimizer) << "\n";
    auto folds = parallel_map<FoldResult>(subjects.size(), [&](std::size_t i) {
      return run_transfer(models.at(subjects[i]), data.subject(subjects[i]), plan);
    });
    for (const auto& fold : folds) {
      out << "  " << fold.subject_id << ": convolutional parameters bit-equal to pretrained ("
          << fold.model.conv_parameters().size() << " tensors)\n";
    }
    const fs::path dir = cfg.output_dir / ("fraction_" + std::to_string(f));
    json w = json::object();
    save_folds(folds, dir, out, w);
    wall[std::to_string(f)] = w;
  }
  cfg.tl_fraction = fractions.front();
  run["config"] = json::parse(config_to_json(cfg));
  run["pretrained"] = pretrained;
  run["train_wall_seconds"] = wall;
  run.write(cfg.output_dir);
}

void cmd_eval(const std::string& config_path, const std::string& model_path, const std::string& subject,
              const ConfigOverrides& ov, RunRecord& run, std::ostream& out) {
  ExperimentConfig cfg = load_config(config_path);
  run["overrides"] = ov.apply(cfg);
  Network net = load_weights(model_path);
  const WindowedDataset data = load_windows(cfg, cfg.sensor_config, out);
  const std::vector<std::string> subjects = subject.empty() ? data.subjects() : std::vector{subject};
  for (const auto& s : subjects) {
    const auto samples = data.subject(s);
    std::vector<const WindowSample*> ptrs;
    for (const auto& w : samples) ptrs.push_back(&w);
    EvalReport r = evaluate(net, ptrs);
    r.subject_id = s;
    r.sensor_config = std::string(to_string(cfg.sensor_config));
    r.protocol = std::string(to_string(cfg.protocol));
    if (cfg.protocol == Protocol::Transfer) r.tl_fraction = cfg.tl_fraction;
    save_report(r, cfg.output_dir / report_name(r));
    out << "  " << s << ": overall " << opt_pct(r.overall_error) << ", ss " << opt_pct(r.ss_error) << ", ts "
        << opt_pct(r.ts_error) << "\n";
  }
  run["config"] = json::parse(config_to_json(cfg));
  run["model"] = model_path;
  run.write(cfg.output_dir);
}

void cmd_ablate(const std::string& config_path, const std::vector<std::string>& names,
                const ConfigOverrides& ov, RunRecord& run, std::ostream& out) {
  ExperimentConfig cfg = load_config(config_path);
  run["overrides"] = ov.apply(cfg);
  std::vector<SensorSetup> setups;
  for (const auto& n : names) setups.push_back(parse_sensor_setup(n));
  if (setups.empty()) setups.assign(kAllSensorSetups.begin(), kAllSensorSetups.end());
  const ExperimentPlan base = cfg.plan();
  if (base.protocol == Protocol::Transfer) fail(ErrorKind::InvalidConfig, "ablate runs dep or ind");

  std::vector<EvalReport> all;
  json wall = json::object();
  json channels = json::object();
  for (SensorSetup setup : setups) {
    ExperimentConfig c = cfg;
    c.sensor_config = setup;
    const ExperimentPlan plan = c.plan();
    const WindowedDataset data = load_windows(c, setup, out);
    channels[std::string(to_string(setup))] = data.sensors.channel_count();
    auto folds = run_protocol(data, c, plan);
    json w = json::object();
    auto reports = save_folds(folds, cfg.output_dir / std::string(to_string(setup)), out, w);
    wall[std::string(to_string(setup))] = w;
    all.insert(all.end(), reports.begin(), reports.end());
  }
  write_aggregates(all, cfg.output_dir);
  out << format_aggregate(aggregate_by_group(all), ReportFormat::Markdown);
  run["config"] = json::parse(config_to_json(cfg));
  run["channels"] = channels;
  run["train_wall_seconds"] = wall;
  run.write(cfg.output_dir);
}

void cmd_report(const std::vector<std::string>& runs, const std::string& format, const std::string& out_dir,
                bool plot, RunRecord& run, std::ostream& out) {
  const ReportFormat fmt = parse_report_format(format);
  std::vector<fs::path> files;
  for (const auto& r : runs) {
    if (!fs::is_directory(r)) fail(ErrorKind::Io, "run directory " + r + " does not exist");
    for (const auto& entry : fs::recursive_directory_iterator(r)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.starts_with("report_") && name.ends_with(".json")) {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorKind::InsufficientData, "no report_*.json files under the given runs");
  std::vector<EvalReport> reports;
  for (const auto& f : files) reports.push_back(load_report(f));

  const fs::path dir = out_dir;
  const auto rows = aggregate_by_group(reports);
  write_text_file(dir / ("aggregate." + std::string(extension(fmt))), format_aggregate(rows, fmt));
  emit_report(reports, dir / ("reports." + std::string(extension(fmt))), fmt);
  out << format_aggregate(rows, ReportFormat::Markdown);
  if (plot) {
    write_text_file(dir / "fig_errors.svg", svg_error_bars(rows));
    write_text_file(dir / "fig_transfer.svg", svg_transfer_curve(rows));
  }
  run["config"] = {{"runs", runs}, {"format", format}, {"out", out_dir}, {"plot", plot}, {"reports", files.size()}};
  run.write(dir);
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return kConfigError;
    case ErrorKind::InsufficientData:
    case ErrorKind::Parse:
    case ErrorKind::CorruptFile:
    case ErrorKind::InvalidLabel:
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidShape: return kDataError;
    case ErrorKind::Io: return kIoError;
    case ErrorKind::InvalidRange:
    case ErrorKind::InvalidState: return kUnexpected;
  }
  return kUnexpected;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gaitmind: locomotion-mode CNN experiments"};
  app.name("gaitmind");
  app.require_subcommand(1);

  GenSynthArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "Write a synthetic dataset");
  gen_cmd->add_option("--subjects", gen.subjects, "Number of subjects")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--trials", gen.trials, "Trials per subject")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--fs", gen.fs, "Sample rate in Hz")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--time-scale", gen.time_scale, "Scale of circuit durations")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--subject-shift", gen.subject_shift, "Inter-subject variation")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--noise", gen.noise, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_flag("--force", gen.force, "Overwrite a nonempty output directory");

  std::string config_path;
  ConfigOverrides train_ov;
  auto* train_cmd = app.add_subcommand("train", "Train dep or ind models and evaluate them");
  train_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  train_cmd->add_option("--protocol", train_ov.protocol, "dep or ind")->check(CLI::IsMember({"dep", "ind"}));
  train_ov.add_to(train_cmd);

  std::vector<int> fractions;
  std::string pretrained;
  std::vector<std::string> tl_subjects;
  ConfigOverrides tl_ov;
  auto* tl_cmd = app.add_subcommand("transfer", "Adapt pretrained ind models to held-out subjects");
  tl_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  tl_cmd->add_option("--fraction", fractions, "5, 10, 15 or 20 (repeatable or comma list)")->delimiter(',');
  tl_cmd->add_option("--pretrained", pretrained, "Directory with model_<subject>.gmwt")->required();
  tl_cmd->add_option("--subject", tl_subjects, "Restrict to these subjects")->delimiter(',');
  tl_ov.add_to(tl_cmd);

  std::string model_path, eval_subject;
  ConfigOverrides eval_ov;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a dataset");
  eval_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  eval_cmd->add_option("--model", model_path, "Weight file")->required();
  eval_cmd->add_option("--subject", eval_subject, "Only this subject");
  eval_ov.add_to(eval_cmd);

  std::vector<std::string> setups;
  ConfigOverrides ablate_ov;
  auto* ablate_cmd = app.add_subcommand("ablate", "Run one protocol across sensor setups");
  ablate_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  ablate_cmd->add_option("--configs", setups, "unilateral,bilateral,prosthetic,all")->delimiter(',');
  ablate_cmd->add_option("--protocol", ablate_ov.protocol, "dep or ind")->check(CLI::IsMember({"dep", "ind"}));
  ablate_ov.add_to(ablate_cmd);

  std::vector<std::string> runs;
  std::string format = "md", report_out = ".";
  bool plot = false;
  auto* report_cmd = app.add_subcommand("report", "Aggregate report files into tables and figures");
  report_cmd->add_option("--runs", runs, "Run directories")->required()->expected(1, -1);
  report_cmd->add_option("--format", format, "md, csv or json")->check(CLI::IsMember({"md", "csv", "json"}));
  report_cmd->add_option("--out", report_out, "Output directory");
  report_cmd->add_flag("--plot", plot, "Also write SVG figures");

  std::vector<const char*> argv{"gaitmind"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    std::string name = app.get_subcommands().front()->get_name();
    RunRecord record(name, args);
    if (*gen_cmd) cmd_gen_synth(gen, record, out);
    else if (*train_cmd) cmd_train(config_path, train_ov, record, out);
    else if (*tl_cmd) cmd_transfer(config_path, fractions, pretrained, tl_subjects, tl_ov, record, out);
    else if (*eval_cmd) cmd_eval(config_path, model_path, eval_subject, eval_ov, record, out);
    else if (*ablate_cmd) cmd_ablate(config_path, setups, ablate_ov, record, out);
    else if (*report_cmd) cmd_report(runs, format, report_out, plot, record, out);
    return kOk;
  } catch (const Error& e) {
    err << "gaitmind: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "gaitmind: I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "gaitmind: unexpected error: " << e.what() << "\n";
    return kUnexpected;
  }
}

}  // namespace gaitmind::cli
