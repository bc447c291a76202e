#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "nameproxy/normalize.hpp"
#include "nameproxy/race.hpp"

namespace nameproxy::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct NetworkShape {
  int vocab = kVocabularySize;
  int embed_dim = 256;
  int hidden = 512;
  int layers = 4;
  int classes = 4;
  double dropout = 0.2;

  bool operator==(const NetworkShape&) const = default;
};

// Gate rows are stacked input, forget, candidate, output; each block is
// `hidden` rows tall.
struct LstmWeights {
  Matrix input;      // 4H x in
  Matrix recurrent;  // 4H x H
  Vector bias;       // 4H
};

struct BiLstmLayer {
  LstmWeights forward;
  LstmWeights backward;
};

// embedding -> stacked BiLSTM -> dense softmax. Gradients and optimizer
// moments reuse this type, so every tensor has a mirror of the same shape.
struct NetworkParams {
  NetworkShape shape;
  Matrix embedding;  // embed_dim x vocab, one column per symbol
  std::vector<BiLstmLayer> layers;
  Matrix dense;      // classes x 2H
  Vector dense_bias;

  static NetworkParams zeros(const NetworkShape& shape);
  // Uniform in +-1/sqrt(fan_in); forget-gate biases start at 1.
  static NetworkParams initialize(const NetworkShape& shape, std::uint64_t seed);

  // Throws Error{shape_mismatch} when a tensor disagrees with `shape`.
  void validate_shapes() const;
  // validate_shapes, plus every value finite.
  void validate() const;
  std::size_t parameter_count() const;
};

// Visits every tensor in a fixed order with a stable name.
template <typename Params, typename Fn>
void for_each_tensor(Params& p, Fn&& fn) {
  auto visit = [&](const std::string& name, auto& tensor) {
    fn(name, std::span(tensor.data(), static_cast<std::size_t>(tensor.size())));
  };
  visit("embedding", p.embedding);
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    auto& layer = p.layers[k];
    const std::string prefix = "lstm" + std::to_string(k);
    visit(prefix + ".fwd.input", layer.forward.input);
    visit(prefix + ".fwd.recurrent", layer.forward.recurrent);
    visit(prefix + ".fwd.bias", layer.forward.bias);
    visit(prefix + ".bwd.input", layer.backward.input);
    visit(prefix + ".bwd.recurrent", layer.backward.recurrent);
    visit(prefix + ".bwd.bias", layer.backward.bias);
  }
  visit("dense", p.dense);
  visit("dense_bias", p.dense_bias);
}

// Sequences of symbol codes; every sequence in a batch has the same length.
using TokenBatch = std::vector<std::vector<int>>;

TokenBatch to_tokens(std::span<const EncodedName> names);

enum class Mode { train, eval };

// Dropout is only active in train mode, with masks drawn from `seed`.
struct ForwardOptions {
  Mode mode = Mode::eval;
  std::uint64_t seed = 0;
};

std::vector<ProbVector> forward(const NetworkParams& params, const TokenBatch& batch,
                                const ForwardOptions& options = {});

struct LossAndGradients {
  double loss = 0.0;  // mean cross-entropy over the batch
  NetworkParams gradients;
};

LossAndGradients loss_and_gradients(const NetworkParams& params, const TokenBatch& batch,
                                    std::span<const std::size_t> labels,
                                    const ForwardOptions& options = {Mode::train, 0});

double loss(const NetworkParams& params, const TokenBatch& batch, std::span<const std::size_t> labels,
            const ForwardOptions& options = {});

// Eval-mode prediction for one raw name pair, neural-normalized first.
ProbVector predict_proba(const NetworkParams& params, std::string_view first, std::string_view last);

// --- optimizer --------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 0.001;
  double weight_decay = 0.004;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // false: decay * theta is added to the gradient before the moment
  // updates. true: decay is applied directly to the weights.
  bool decoupled_decay = false;
};

struct AdamState {
  AdamConfig config;
  NetworkParams first_moment;
  NetworkParams second_moment;
  std::int64_t step = 0;

  static AdamState for_params(const NetworkParams& params, const AdamConfig& config);
};

// One bias-corrected Adam update on flat buffers; `step` is the 1-based
// index of this update.
void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> first_moment,
                 std::span<double> second_moment, std::int64_t step, const AdamConfig& config);

void adam_step(NetworkParams& params, const NetworkParams& gradients, AdamState& state);

// --- persistence --------------------------------------------------------------

// Versioned little-endian container: magic, shape header, named tensors,
// trailing checksum.
void save_params(const NetworkParams& params, const std::string& path);
std::string serialize_params(const NetworkParams& params);
// Throws Error{corrupt_file} on truncation or checksum failure and
// Error{shape_mismatch} when `expected` is given and differs.
NetworkParams load_params(const std::string& path, const NetworkShape* expected = nullptr);
NetworkParams deserialize_params(std::string_view bytes, const NetworkShape* expected = nullptr);

}  // namespace nameproxy::nn
