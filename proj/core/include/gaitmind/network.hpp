#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaitmind/layers.hpp"

namespace gaitmind {

enum class Arch { Dep, Ind };

std::string_view to_string(Arch arch);
Arch parse_arch(std::string_view text);

inline constexpr std::size_t kNumModes = 10;

/// Everything that determines a network's topology.
///
/// Each block is Conv1d(k3,p1,s1) -> ReLU -> Dropout -> MaxPool1d(2,2). The
/// head is Flatten -> Dense(hidden) -> ReLU -> Dropout -> Dense(hidden) ->
/// ReLU -> Dropout -> Dense(classes).
struct NetworkSpec {
  Arch arch = Arch::Dep;
  std::size_t in_channels = 6;
  std::size_t window_len = 250;
  std::vector<std::size_t> block_channels;
  std::size_t hidden_width = 0;
  double dropout = 0.2;
  std::size_t classes = kNumModes;

  /// Dep: 64-128-256-512 / 1024 hidden. Ind: 64-128-256-512-1024 / 2048 hidden.
  static NetworkSpec standard(Arch arch, std::size_t in_channels, std::size_t window_len);

  /// Temporal length after every block; throws InvalidConfig if it reaches 0.
  std::vector<std::size_t> block_lengths() const;
  std::size_t flatten_width() const;
  std::size_t parameter_count() const;
  void validate() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

class Network {
 public:
  Network(NetworkSpec spec, Rng& rng);
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;
  ~Network() = default;

  const NetworkSpec& spec() const noexcept { return spec_; }

  /// x [B, in_channels, window_len] -> logits [B, classes]. rng feeds dropout
  /// in Train phase and is untouched in Eval.
  Tensor forward(const Tensor& x, Phase phase, Rng& rng);
  Tensor predict(const Tensor& x);

  /// Backpropagates dlogits. Layers below the lowest trainable parameter are
  /// skipped since nothing under them needs a gradient.
  void backward(const Tensor& dlogits);

  void zero_grad();

  std::size_t layer_count() const noexcept { return layers_.size(); }
  Layer<float>& layer(std::size_t i) { return *layers_[i]; }
  const Layer<float>& layer(std::size_t i) const { return *layers_[i]; }
  const std::string& layer_name(std::size_t i) const { return names_[i]; }

  /// Parameters in a fixed order with names like "block0.conv.weight".
  std::vector<Parameter<float>*> parameters();
  std::vector<const Parameter<float>*> parameters() const;
  std::vector<std::string> parameter_names() const;

  std::vector<Parameter<float>*> conv_parameters();
  std::vector<const Parameter<float>*> conv_parameters() const;
  std::vector<Parameter<float>*> head_parameters();
  std::vector<const Parameter<float>*> head_parameters() const;

  std::size_t parameter_count() const;

  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);

  /// Indices of the three dense layers, in order.
  std::vector<std::size_t> dense_layer_indices() const;
  /// Index of the Flatten layer; everything before it belongs to the blocks.
  std::size_t flatten_index() const noexcept { return flatten_index_; }

 private:
  void add(std::string name, std::unique_ptr<Layer<float>> layer);

  NetworkSpec spec_;
  std::vector<std::unique_ptr<Layer<float>>> layers_;
  std::vector<std::string> names_;
  std::size_t flatten_index_ = 0;
};

Network build_network(Arch arch, std::size_t in_channels, std::size_t window_len, Rng& rng);
Network build_network(const NetworkSpec& spec, Rng& rng);

/// Copies the convolutional blocks of an Ind network and freezes them. The
/// dense head is trainable; with reinit_head it is freshly initialized from
/// rng, otherwise it starts from the pretrained values.
Network transfer_surgery(const Network& pretrained, Rng& rng, bool reinit_head = true);

/// Binary weight file:
///   "GMWT01\0\0" | u32 LE manifest length | UTF-8 JSON manifest | f32 LE data
/// The manifest records the topology plus {name, shape, trainable,
/// byte_offset} for each parameter, offsets relative to the data section.
void save_weights(const Network& net, const std::filesystem::path& path);

/// Throws CorruptFile on missing/unreadable files, bad magic, truncation or a
/// manifest that disagrees with `expected` or with its own topology.
Network load_weights(const std::filesystem::path& path,
                     const std::optional<NetworkSpec>& expected = std::nullopt);

}  // namespace gaitmind
