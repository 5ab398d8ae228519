#include "gaitmind/network.hpp"

#include <string>

#include "gaitmind/error.hpp"

namespace gaitmind {

std::string_view to_string(Arch arch) { return arch == Arch::Dep ? "dep" : "ind"; }

Arch parse_arch(std::string_view text) {
  if (text == "dep" || text == "Dep") return Arch::Dep;
  if (text == "ind" || text == "Ind") return Arch::Ind;
  fail(ErrorKind::InvalidConfig, "unknown architecture '" + std::string(text) + "'");
}

NetworkSpec NetworkSpec::standard(Arch arch, std::size_t in_channels, std::size_t window_len) {
  NetworkSpec spec;
  spec.arch = arch;
  spec.in_channels = in_channels;
  spec.window_len = window_len;
  if (arch == Arch::Dep) {
    spec.block_channels = {64, 128, 256, 512};
    spec.hidden_width = 1024;
  } else {
    spec.block_channels = {64, 128, 256, 512, 1024};
    spec.hidden_width = 2048;
  }
  return spec;
}

std::vector<std::size_t> NetworkSpec::block_lengths() const {
  std::vector<std::size_t> lengths;
  std::size_t len = window_len;
  for (std::size_t i = 0; i < block_channels.size(); ++i) {
    if (len < 2) {
      fail(ErrorKind::InvalidConfig, "window length " + std::to_string(window_len) +
                                         " is too short for " +
                                         std::to_string(block_channels.size()) + " blocks");
    }
    len /= 2;
    lengths.push_back(len);
  }
  return lengths;
}

std::size_t NetworkSpec::flatten_width() const {
  const auto lengths = block_lengths();
  return block_channels.back() * lengths.back();
}

void NetworkSpec::validate() const {
  if (in_channels == 0) fail(ErrorKind::InvalidConfig, "in_channels must be positive");
  if (block_channels.empty()) fail(ErrorKind::InvalidConfig, "network needs at least one block");
  for (auto c : block_channels)
    if (c == 0) fail(ErrorKind::InvalidConfig, "block channels must be positive");
  if (hidden_width == 0 || classes == 0) fail(ErrorKind::InvalidConfig, "layer widths must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail(ErrorKind::InvalidConfig, "dropout must be in [0,1)");
  (void)block_lengths();
}

std::size_t NetworkSpec::parameter_count() const {
  validate();
  std::size_t count = 0;
  std::size_t cin = in_channels;
  for (auto cout : block_channels) {
    count += cout * cin * kConvKernel + cout;
    cin = cout;
  }
  const std::size_t flat = flatten_width();
  count += flat * hidden_width + hidden_width;
  count += hidden_width * hidden_width + hidden_width;
  count += hidden_width * classes + classes;
  return count;
}

// ---------------------------------------------------------------------------

Network::Network(NetworkSpec spec, Rng& rng) : spec_(std::move(spec)) {
  spec_.validate();
  std::size_t cin = spec_.in_channels;
  for (std::size_t i = 0; i < spec_.block_channels.size(); ++i) {
    const std::string prefix = "block" + std::to_string(i);
    const std::size_t cout = spec_.block_channels[i];
    add(prefix + ".conv", std::make_unique<Conv1d<float>>(cin, cout, rng));
    add(prefix + ".relu", std::make_unique<ReLU<float>>());
    add(prefix + ".dropout", std::make_unique<Dropout<float>>(spec_.dropout));
    add(prefix + ".pool", std::make_unique<MaxPool1d<float>>());
    cin = cout;
  }
  flatten_index_ = layers_.size();
  add("flatten", std::make_unique<Flatten<float>>());
  add("fc1", std::make_unique<Dense<float>>(spec_.flatten_width(), spec_.hidden_width, rng));
  add("fc1.relu", std::make_unique<ReLU<float>>());
  add("fc1.dropout", std::make_unique<Dropout<float>>(spec_.dropout));
  add("fc2", std::make_unique<Dense<float>>(spec_.hidden_width, spec_.hidden_width, rng));
  add("fc2.relu", std::make_unique<ReLU<float>>());
  add("fc2.dropout", std::make_unique<Dropout<float>>(spec_.dropout));
  add("fc3", std::make_unique<Dense<float>>(spec_.hidden_width, spec_.classes, rng));
}

Network::Network(const Network& other)
    : spec_(other.spec_), names_(other.names_), flatten_index_(other.flatten_index_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Network::add(std::string name, std::unique_ptr<Layer<float>> layer) {
  names_.push_back(std::move(name));
  layers_.push_back(std::move(layer));
}

Tensor Network::forward(const Tensor& x, Phase phase, Rng& rng) {
  if (x.rank() != 3 || x.dim(1) != spec_.in_channels || x.dim(2) != spec_.window_len) {
    fail(ErrorKind::InvalidShape, "network expects [B," + std::to_string(spec_.in_channels) + "," +
                                      std::to_string(spec_.window_len) + "], got " +
                                      shape_string(x.shape()));
  }
  Tensor h = layers_.front()->forward(x, phase, rng);
  for (std::size_t i = 1; i < layers_.size(); ++i) h = layers_[i]->forward(h, phase, rng);
  return h;
}

Tensor Network::predict(const Tensor& x) {
  Rng unused(0);
  return forward(x, Phase::Eval, unused);
}

void Network::backward(const Tensor& dlogits) {
  std::size_t lowest = layers_.size();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i]->has_parameters() && layers_[i]->trainable()) {
      lowest = i;
      break;
    }
  }
  if (lowest == layers_.size()) return;
  Tensor g = dlogits;
  for (std::size_t i = layers_.size(); i-- > lowest;) {
    if (i == lowest) {
      // The input gradient of the lowest trainable layer is discarded, but
      // its parameter gradients are needed.
      (void)layers_[i]->backward(g);
      break;
    }
    g = layers_[i]->backward(g);
  }
}

void Network::zero_grad() {
  for (auto& l : layers_) l->zero_grad();
}

std::vector<Parameter<float>*> Network::parameters() {
  std::vector<Parameter<float>*> out;
  for (auto& l : layers_)
    for (auto& p : l->parameters()) out.push_back(&p);
  return out;
}

std::vector<const Parameter<float>*> Network::parameters() const {
  std::vector<const Parameter<float>*> out;
  for (const auto& l : layers_)
    for (const auto& p : l->parameters()) out.push_back(&p);
  return out;
}

std::vector<std::string> Network::parameter_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    for (const auto& p : layers_[i]->parameters()) out.push_back(names_[i] + "." + p.name);
  return out;
}

std::vector<Parameter<float>*> Network::conv_parameters() {
  std::vector<Parameter<float>*> out;
  for (std::size_t i = 0; i < flatten_index_; ++i)
    for (auto& p : layers_[i]->parameters()) out.push_back(&p);
  return out;
}

std::vector<const Parameter<float>*> Network::conv_parameters() const {
  std::vector<const Parameter<float>*> out;
  for (std::size_t i = 0; i < flatten_index_; ++i)
    for (const auto& p : layers_[i]->parameters()) out.push_back(&p);
  return out;
}

std::vector<Parameter<float>*> Network::head_parameters() {
  std::vector<Parameter<float>*> out;
  for (std::size_t i = flatten_index_; i < layers_.size(); ++i)
    for (auto& p : layers_[i]->parameters()) out.push_back(&p);
  return out;
}

std::vector<const Parameter<float>*> Network::head_parameters() const {
  std::vector<const Parameter<float>*> out;
  for (std::size_t i = flatten_index_; i < layers_.size(); ++i)
    for (const auto& p : layers_[i]->parameters()) out.push_back(&p);
  return out;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

std::vector<Tensor> Network::snapshot() const {
  std::vector<Tensor> out;
  for (const auto* p : parameters()) out.push_back(p->value);
  return out;
}

void Network::restore(const std::vector<Tensor>& values) {
  auto params = parameters();
  if (values.size() != params.size()) fail(ErrorKind::InvalidShape, "snapshot parameter count");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(values[i].shape(), params[i]->value.shape(), "snapshot restore");
    params[i]->value = values[i];
  }
}

std::vector<std::size_t> Network::dense_layer_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    if (layers_[i]->kind() == LayerKind::Dense) out.push_back(i);
  return out;
}

Network build_network(Arch arch, std::size_t in_channels, std::size_t window_len, Rng& rng) {
  return Network(NetworkSpec::standard(arch, in_channels, window_len), rng);
}

Network build_network(const NetworkSpec& spec, Rng& rng) { return Network(spec, rng); }

Network transfer_surgery(const Network& pretrained, Rng& rng, bool reinit_head) {
  if (pretrained.spec().arch != Arch::Ind) {
    fail(ErrorKind::InvalidConfig, "transfer surgery expects a subject-independent network");
  }
  Network net(pretrained);
  for (std::size_t i = 0; i < net.flatten_index(); ++i) net.layer(i).set_trainable(false);
  for (std::size_t i : net.dense_layer_indices()) {
    auto& layer = net.layer(i);
    if (reinit_head) {
      auto& w = layer.parameter("weight");
      const double limit = glorot_limit(w.value.dim(0), w.value.dim(1));
      w.value = uniform<float>(rng, w.value.shape(), -limit, limit);
      layer.parameter("bias").value.fill(0.0f);
    }
    layer.set_trainable(true);
  }
  net.zero_grad();
  return net;
}

}  // namespace gaitmind
