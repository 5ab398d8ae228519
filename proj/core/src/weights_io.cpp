#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include <json.hpp>

#include "gaitmind/error.hpp"
#include "gaitmind/network.hpp"

namespace gaitmind {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'G', 'M', 'W', 'T', '0', '1', '\0', '\0'};

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& why) {
  fail(ErrorKind::CorruptFile, path.string() + ": " + why);
}

json spec_to_json(const NetworkSpec& spec) {
  return json{{"arch", std::string(to_string(spec.arch))},
              {"in_channels", spec.in_channels},
              {"window_len", spec.window_len},
              {"block_channels", spec.block_channels},
              {"hidden_width", spec.hidden_width},
              {"dropout", spec.dropout},
              {"classes", spec.classes}};
}

NetworkSpec spec_from_json(const json& j) {
  NetworkSpec spec;
  spec.arch = parse_arch(j.at("arch").get<std::string>());
  spec.in_channels = j.at("in_channels").get<std::size_t>();
  spec.window_len = j.at("window_len").get<std::size_t>();
  spec.block_channels = j.at("block_channels").get<std::vector<std::size_t>>();
  spec.hidden_width = j.at("hidden_width").get<std::size_t>();
  spec.dropout = j.at("dropout").get<double>();
  spec.classes = j.at("classes").get<std::size_t>();
  return spec;
}

}  // namespace

void save_weights(const Network& net, const std::filesystem::path& path) {
  json manifest = spec_to_json(net.spec());
  json params = json::array();
  const auto names = net.parameter_names();
  const auto values = net.parameters();
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    params.push_back({{"name", names[i]},
                      {"shape", values[i]->value.shape()},
                      {"trainable", values[i]->trainable},
                      {"byte_offset", offset}});
    offset += values[i]->value.size() * sizeof(float);
  }
  manifest["params"] = std::move(params);
  const std::string text = manifest.dump();

  std::string blob(kMagic, sizeof(kMagic));
  put_u32_le(blob, static_cast<std::uint32_t>(text.size()));
  blob += text;
  blob.reserve(blob.size() + offset);
  for (const auto* p : values) {
    for (float v : p->value.data()) put_u32_le(blob, std::bit_cast<std::uint32_t>(v));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

Network load_weights(const std::filesystem::path& path, const std::optional<NetworkSpec>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) corrupt(path, "cannot open weight file");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());

  if (bytes.size() < sizeof(kMagic) + 4) corrupt(path, "file too short");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) corrupt(path, "bad magic");
  const std::uint32_t manifest_len = get_u32_le(raw + sizeof(kMagic));
  const std::size_t data_start = sizeof(kMagic) + 4 + static_cast<std::size_t>(manifest_len);
  if (data_start > bytes.size()) corrupt(path, "truncated manifest");

  json manifest;
  NetworkSpec spec;
  try {
    manifest = json::parse(bytes.begin() + sizeof(kMagic) + 4, bytes.begin() + data_start);
    spec = spec_from_json(manifest);
    spec.validate();
  } catch (const json::exception& e) {
    corrupt(path, std::string("manifest: ") + e.what());
  } catch (const Error& e) {
    corrupt(path, std::string("manifest: ") + e.what());
  }
  if (expected && !(*expected == spec)) {
    corrupt(path, "manifest topology does not match the requested " +
                      std::string(to_string(expected->arch)) + " network");
  }

  Rng scratch(0);
  Network net(spec, scratch);
  auto params = net.parameters();
  const auto names = net.parameter_names();
  const auto& entries = manifest.contains("params") ? manifest["params"] : json();
  if (!entries.is_array() || entries.size() != params.size()) {
    corrupt(path, "parameter manifest does not match topology");
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = entries[i];
    try {
      if (e.at("name").get<std::string>() != names[i] ||
          e.at("shape").get<Shape>() != params[i]->value.shape() ||
          e.at("byte_offset").get<std::size_t>() != offset) {
        corrupt(path, "parameter entry " + std::to_string(i) + " (" + names[i] + ") mismatch");
      }
      params[i]->trainable = e.at("trainable").get<bool>();
    } catch (const json::exception& ex) {
      corrupt(path, std::string("parameter entry: ") + ex.what());
    }
    const std::size_t n = params[i]->value.size();
    if (data_start + offset + n * sizeof(float) > bytes.size()) corrupt(path, "truncated data");
    auto dst = params[i]->value.data();
    const unsigned char* src = raw + data_start + offset;
    for (std::size_t k = 0; k < n; ++k) dst[k] = std::bit_cast<float>(get_u32_le(src + 4 * k));
    offset += n * sizeof(float);
  }
  if (data_start + offset != bytes.size()) corrupt(path, "trailing bytes after parameter data");
  return net;
}

}  // namespace gaitmind
