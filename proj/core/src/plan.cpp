#include "gaitmind/plan.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gaitmind/error.hpp"
#include "gaitmind/splits.hpp"

namespace gaitmind {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  fail(ErrorKind::InvalidConfig, "config key '" + key + "': " + what);
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) bad(key, "expected a string");
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad(key, "expected a number");
  return j.get<double>();
}

long long get_integer(const json& j, const std::string& key) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) bad(key, "expected an integer");
  return j.get<long long>();
}

std::size_t get_positive(const json& j, const std::string& key) {
  const long long v = get_integer(j, key);
  if (v <= 0) bad(key, "must be positive");
  return static_cast<std::size_t>(v);
}

bool get_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) bad(key, "expected true or false");
  return j.get<bool>();
}

template <typename F>
auto wrap(const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    bad(key, e.what());
  }
}

ModelOverrides parse_model(const json& j) {
  if (!j.is_object()) bad("model", "expected an object");
  ModelOverrides m;
  for (const auto& [key, value] : j.items()) {
    const std::string full = "model." + key;
    if (key == "block_channels") {
      if (!value.is_array() || value.empty()) bad(full, "expected a nonempty array");
      std::vector<std::size_t> ch;
      for (const auto& v : value) ch.push_back(get_positive(v, full));
      m.block_channels = std::move(ch);
    } else if (key == "hidden_width") {
      m.hidden_width = get_positive(value, full);
    } else if (key == "dropout") {
      m.dropout = get_number(value, full);
    } else {
      bad(full, "unknown key");
    }
  }
  return m;
}

}  // namespace

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::Dep: return "dep";
    case Protocol::Ind: return "ind";
    case Protocol::Transfer: return "transfer";
  }
  return "unknown";
}

Protocol parse_protocol(std::string_view text) {
  if (text == "dep") return Protocol::Dep;
  if (text == "ind") return Protocol::Ind;
  if (text == "transfer" || text == "tl") return Protocol::Transfer;
  fail(ErrorKind::InvalidConfig, "unknown protocol '" + std::string(text) + "' (dep, ind, transfer)");
}

ExperimentPlan ExperimentPlan::defaults(Protocol protocol) {
  ExperimentPlan p;
  p.protocol = protocol;
  switch (protocol) {
    case Protocol::Dep:
      p.epochs = 30;
      p.batch_size = 512;
      p.lr = 1e-4;
      p.optimizer = OptimizerKind::Adam;
      break;
    case Protocol::Ind:
      p.epochs = 35;
      p.batch_size = 1024;
      p.lr = 1.5e-4;
      p.optimizer = OptimizerKind::Adam;
      break;
    case Protocol::Transfer:
      p.epochs = 100;
      p.batch_size = 256;
      p.lr = 1e-4;
      p.optimizer = OptimizerKind::Sgd;
      break;
  }
  return p;
}

void ExperimentPlan::validate() const {
  if (epochs <= 0) fail(ErrorKind::InvalidConfig, "epochs must be positive");
  if (batch_size == 0) fail(ErrorKind::InvalidConfig, "batch_size must be positive");
  if (!(lr > 0.0) || !std::isfinite(lr)) fail(ErrorKind::InvalidConfig, "lr must be positive");
  if (tl_fraction) transfer_fractions(*tl_fraction);
}

NetworkSpec make_spec(Arch arch, std::size_t in_channels, std::size_t window_len,
                      const ModelOverrides& overrides) {
  NetworkSpec spec = NetworkSpec::standard(arch, in_channels, window_len);
  if (overrides.block_channels) spec.block_channels = *overrides.block_channels;
  if (overrides.hidden_width) spec.hidden_width = *overrides.hidden_width;
  if (overrides.dropout) spec.dropout = *overrides.dropout;
  spec.validate();
  return spec;
}

ExperimentPlan ExperimentConfig::plan_for(Protocol p) const {
  ExperimentPlan plan = ExperimentPlan::defaults(p);
  plan.sensor_config = sensor_config;
  if (epochs) plan.epochs = *epochs;
  if (batch_size) plan.batch_size = *batch_size;
  if (lr) plan.lr = *lr;
  if (optimizer) plan.optimizer = *optimizer;
  plan.seed = seed;
  plan.tl_fraction = tl_fraction;
  plan.tl_reinit_head = tl_reinit_head;
  return plan;
}

void ExperimentConfig::validate() const {
  plan().validate();
  if (!(window_ms > 0.0)) fail(ErrorKind::InvalidConfig, "window_ms must be positive");
  if (!(stride_ms > 0.0)) fail(ErrorKind::InvalidConfig, "stride_ms must be positive");
  if (transition_ms < 0.0) fail(ErrorKind::InvalidConfig, "transition_ms must be >= 0");
  if (sample_rate_hz && !(*sample_rate_hz > 0.0)) fail(ErrorKind::InvalidConfig, "sample_rate_hz must be positive");
  if (model.dropout && !(*model.dropout >= 0.0 && *model.dropout < 1.0)) {
    fail(ErrorKind::InvalidConfig, "model.dropout must be in [0, 1)");
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::InvalidConfig, "config must be a JSON object");

  ExperimentConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "protocol") {
      c.protocol = wrap(key, [&] { return parse_protocol(get_string(v, key)); });
    } else if (key == "sensor_config") {
      c.sensor_config = wrap(key, [&] { return parse_sensor_setup(get_string(v, key)); });
    } else if (key == "dataset_root") {
      c.dataset_root = get_string(v, key);
    } else if (key == "epochs") {
      c.epochs = static_cast<int>(get_positive(v, key));
    } else if (key == "batch_size") {
      c.batch_size = get_positive(v, key);
    } else if (key == "lr") {
      c.lr = get_number(v, key);
    } else if (key == "optimizer") {
      c.optimizer = wrap(key, [&] { return parse_optimizer(get_string(v, key)); });
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        bad(key, "expected a nonnegative integer");
      }
      c.seed = v.get<std::uint64_t>();
    } else if (key == "window_ms") {
      c.window_ms = get_number(v, key);
    } else if (key == "stride_ms") {
      c.stride_ms = get_number(v, key);
    } else if (key == "transition_ms") {
      c.transition_ms = get_number(v, key);
    } else if (key == "sample_rate_hz") {
      if (!v.is_null()) c.sample_rate_hz = get_number(v, key);
    } else if (key == "tl_fraction") {
      if (!v.is_null()) c.tl_fraction = static_cast<int>(get_integer(v, key));
    } else if (key == "tl_reinit_head") {
      c.tl_reinit_head = get_bool(v, key);
    } else if (key == "excluded_subjects") {
      if (!v.is_array()) bad(key, "expected an array of strings");
      c.excluded_subjects.clear();
      for (const auto& s : v) c.excluded_subjects.push_back(get_string(s, key));
    } else if (key == "output_dir") {
      c.output_dir = get_string(v, key);
    } else if (key == "model") {
      c.model = parse_model(v);
    } else {
      bad(key, "unknown key");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  const ExperimentPlan plan = config.plan();
  json j{{"protocol", to_string(config.protocol)},
         {"sensor_config", to_string(config.sensor_config)},
         {"dataset_root", config.dataset_root.string()},
         {"epochs", plan.epochs},
         {"batch_size", plan.batch_size},
         {"lr", plan.lr},
         {"optimizer", to_string(plan.optimizer)},
         {"seed", config.seed},
         {"window_ms", config.window_ms},
         {"stride_ms", config.stride_ms},
         {"transition_ms", config.transition_ms},
         {"sample_rate_hz", config.sample_rate_hz ? json(*config.sample_rate_hz) : json(nullptr)},
         {"tl_fraction", config.tl_fraction ? json(*config.tl_fraction) : json(nullptr)},
         {"tl_reinit_head", config.tl_reinit_head},
         {"excluded_subjects", config.excluded_subjects},
         {"output_dir", config.output_dir.string()}};
  if (!config.model.empty()) {
    json m = json::object();
    if (config.model.block_channels) m["block_channels"] = *config.model.block_channels;
    if (config.model.hidden_width) m["hidden_width"] = *config.model.hidden_width;
    if (config.model.dropout) m["dropout"] = *config.model.dropout;
    j["model"] = std::move(m);
  }
  return j.dump(2) + "\n";
}

}  // namespace gaitmind
