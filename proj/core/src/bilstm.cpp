#include "nameproxy/bilstm.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nameproxy/error.hpp"
#include "nameproxy/rng.hpp"

namespace nameproxy::nn {
namespace {

LstmWeights zero_lstm(int in, int hidden) {
  return LstmWeights{Matrix::Zero(4 * hidden, in), Matrix::Zero(4 * hidden, hidden), Vector::Zero(4 * hidden)};
}

void fill_uniform(Eigen::Ref<Matrix> m, double bound, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-bound, bound);
  }
}

void expect_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(ErrorCode::shape_mismatch,
         fmt::format("{} is {}x{}, expected {}x{}", what, m.rows(), m.cols(), rows, cols));
  }
}

void expect_shape(const Vector& v, Eigen::Index rows, const char* what) {
  if (v.size() != rows) fail(ErrorCode::shape_mismatch, fmt::format("{} has {} rows, expected {}", what, v.size(), rows));
}

Matrix sigmoid(const Matrix& x) { return (1.0 + (-x.array()).exp()).inverse().matrix(); }

// Activations of one direction of one layer, stored in processing order.
struct DirectionCache {
  std::vector<Matrix> gates;  // 4H x B after the nonlinearities
  std::vector<Matrix> cell;   // H x B, index s + 1 (index 0 is the zero state)
  std::vector<Matrix> out;    // H x B, index s + 1
};

struct LayerCache {
  Matrix input;   // in x (T*B), column t*B + b
  Matrix output;  // 2H x (T*B), before dropout
  Matrix mask;    // dropout mask applied to `output` when feeding the next layer
  DirectionCache fwd;
  DirectionCache bwd;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Matrix feature;  // 2H x B
  Matrix probs;    // C x B
};

std::size_t sequence_length(const NetworkParams& params, const TokenBatch& batch) {
  if (batch.empty()) fail(ErrorCode::shape_mismatch, "empty batch");
  const std::size_t length = batch.front().size();
  if (length == 0) fail(ErrorCode::shape_mismatch, "zero-length sequence");
  for (const auto& seq : batch) {
    if (seq.size() != length) fail(ErrorCode::shape_mismatch, "sequences in a batch differ in length");
    for (int code : seq) {
      if (code < 0 || code >= params.shape.vocab) {
        fail(ErrorCode::shape_mismatch, fmt::format("symbol code {} outside vocabulary of {}", code, params.shape.vocab));
      }
    }
  }
  return length;
}

void run_direction(const LstmWeights& w, const Matrix& input, std::size_t steps, Eigen::Index batch, bool reverse,
                   DirectionCache& cache, Eigen::Ref<Matrix> output) {
  const Eigen::Index hidden = w.recurrent.cols();
  const Matrix pre = (w.input * input).colwise() + w.bias;
  cache.gates.assign(steps, Matrix());
  cache.cell.assign(steps + 1, Matrix::Zero(hidden, batch));
  cache.out.assign(steps + 1, Matrix::Zero(hidden, batch));
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    Matrix a = pre.middleCols(static_cast<Eigen::Index>(t) * batch, batch);
    a.noalias() += w.recurrent * cache.out[s];
    Matrix g(4 * hidden, batch);
    g.topRows(2 * hidden) = sigmoid(a.topRows(2 * hidden));
    g.middleRows(2 * hidden, hidden) = a.middleRows(2 * hidden, hidden).array().tanh().matrix();
    g.bottomRows(hidden) = sigmoid(a.bottomRows(hidden));
    const auto i = g.topRows(hidden).array();
    const auto f = g.middleRows(hidden, hidden).array();
    const auto cand = g.middleRows(2 * hidden, hidden).array();
    const auto o = g.bottomRows(hidden).array();
    cache.cell[s + 1] = (f * cache.cell[s].array() + i * cand).matrix();
    cache.out[s + 1] = (o * cache.cell[s + 1].array().tanh()).matrix();
    output.middleCols(static_cast<Eigen::Index>(t) * batch, batch) = cache.out[s + 1];
    cache.gates[s] = std::move(g);
  }
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, std::uint64_t seed) {
  Matrix mask(rows, cols);
  Rng rng(seed);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) mask(i, j) = rng.uniform() < rate ? 0.0 : keep_scale;
  }
  return mask;
}

ForwardCache run_forward(const NetworkParams& params, const TokenBatch& batch, const ForwardOptions& options) {
  params.validate_shapes();
  const std::size_t steps = sequence_length(params, batch);
  const auto b = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index hidden = params.shape.hidden;
  const Eigen::Index cols = static_cast<Eigen::Index>(steps) * b;
  const bool dropout = options.mode == Mode::train && params.shape.dropout > 0.0;

  ForwardCache cache;
  cache.layers.resize(params.layers.size());

  Matrix x(params.shape.embed_dim, cols);
  for (std::size_t t = 0; t < steps; ++t) {
    for (Eigen::Index e = 0; e < b; ++e) {
      x.col(static_cast<Eigen::Index>(t) * b + e) = params.embedding.col(batch[static_cast<std::size_t>(e)][t]);
    }
  }

  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    auto& lc = cache.layers[k];
    lc.input = std::move(x);
    lc.output.resize(2 * hidden, cols);
    run_direction(params.layers[k].forward, lc.input, steps, b, false, lc.fwd, lc.output.topRows(hidden));
    run_direction(params.layers[k].backward, lc.input, steps, b, true, lc.bwd, lc.output.bottomRows(hidden));
    if (k + 1 < params.layers.size() && dropout) {
      lc.mask = dropout_mask(2 * hidden, cols, params.shape.dropout, derive_seed(options.seed, k));
      x = lc.output.cwiseProduct(lc.mask);
    } else {
      x = lc.output;
    }
  }

  const auto& top = cache.layers.back();
  cache.feature.resize(2 * hidden, b);
  cache.feature.topRows(hidden) = top.fwd.out[steps];
  cache.feature.bottomRows(hidden) = top.bwd.out[steps];

  Matrix logits = (params.dense * cache.feature).colwise() + params.dense_bias;
  const Eigen::RowVectorXd peak = logits.colwise().maxCoeff();
  Matrix expv = (logits.rowwise() - peak).array().exp().matrix();
  const Eigen::RowVectorXd norm = expv.colwise().sum();
  cache.probs = expv.array().rowwise() / norm.array();
  return cache;
}

void backprop_direction(const LstmWeights& w, const DirectionCache& cache, const Matrix& input,
                        const Eigen::Ref<const Matrix>& d_output, std::size_t steps, Eigen::Index batch, bool reverse,
                        LstmWeights& grad, Matrix& d_input) {
  const Eigen::Index hidden = w.recurrent.cols();
  Matrix d_pre(4 * hidden, static_cast<Eigen::Index>(steps) * batch);
  Matrix dh_next = Matrix::Zero(hidden, batch);
  Matrix dc_next = Matrix::Zero(hidden, batch);
  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    const auto col = static_cast<Eigen::Index>(t) * batch;
    const Matrix& g = cache.gates[s];
    const auto i = g.topRows(hidden).array();
    const auto f = g.middleRows(hidden, hidden).array();
    const auto cand = g.middleRows(2 * hidden, hidden).array();
    const auto o = g.bottomRows(hidden).array();
    const Eigen::ArrayXXd tc = cache.cell[s + 1].array().tanh();

    const Eigen::ArrayXXd dh = d_output.middleCols(col, batch).array() + dh_next.array();
    const Eigen::ArrayXXd dc = dc_next.array() + dh * o * (1.0 - tc.square());

    auto da = d_pre.middleCols(col, batch);
    da.topRows(hidden) = (dc * cand * i * (1.0 - i)).matrix();
    da.middleRows(hidden, hidden) = (dc * cache.cell[s].array() * f * (1.0 - f)).matrix();
    da.middleRows(2 * hidden, hidden) = (dc * i * (1.0 - cand.square())).matrix();
    da.bottomRows(hidden) = (dh * tc * o * (1.0 - o)).matrix();

    dc_next = (dc * f).matrix();
    grad.recurrent.noalias() += da * cache.out[s].transpose();
    dh_next.noalias() = w.recurrent.transpose() * da;
  }
  grad.input.noalias() += d_pre * input.transpose();
  grad.bias += d_pre.rowwise().sum();
  d_input.noalias() += w.input.transpose() * d_pre;
}

}  // namespace

NetworkParams NetworkParams::zeros(const NetworkShape& shape) {
  if (shape.vocab <= 0 || shape.embed_dim <= 0 || shape.hidden <= 0 || shape.layers <= 0 || shape.classes <= 0 ||
      !(shape.dropout >= 0.0 && shape.dropout < 1.0)) {
    fail(ErrorCode::shape_mismatch, "network dimensions must be positive and dropout in [0, 1)");
  }
  NetworkParams p;
  p.shape = shape;
  p.embedding = Matrix::Zero(shape.embed_dim, shape.vocab);
  for (int k = 0; k < shape.layers; ++k) {
    const int in = k == 0 ? shape.embed_dim : 2 * shape.hidden;
    p.layers.push_back(BiLstmLayer{zero_lstm(in, shape.hidden), zero_lstm(in, shape.hidden)});
  }
  p.dense = Matrix::Zero(shape.classes, 2 * shape.hidden);
  p.dense_bias = Vector::Zero(shape.classes);
  return p;
}

NetworkParams NetworkParams::initialize(const NetworkShape& shape, std::uint64_t seed) {
  NetworkParams p = zeros(shape);
  Rng rng(seed);
  fill_uniform(p.embedding, 1.0, rng);
  const double h_bound = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  for (auto& layer : p.layers) {
    for (LstmWeights* w : {&layer.forward, &layer.backward}) {
      fill_uniform(w->input, 1.0 / std::sqrt(static_cast<double>(w->input.cols())), rng);
      fill_uniform(w->recurrent, h_bound, rng);
      fill_uniform(w->bias, h_bound, rng);
      w->bias.segment(shape.hidden, shape.hidden).setOnes();
    }
  }
  const double d_bound = 1.0 / std::sqrt(static_cast<double>(2 * shape.hidden));
  fill_uniform(p.dense, d_bound, rng);
  fill_uniform(p.dense_bias, d_bound, rng);
  return p;
}

void NetworkParams::validate_shapes() const {
  const NetworkShape& s = shape;
  expect_shape(embedding, s.embed_dim, s.vocab, "embedding");
  if (layers.size() != static_cast<std::size_t>(s.layers)) {
    fail(ErrorCode::shape_mismatch, fmt::format("{} LSTM layers, expected {}", layers.size(), s.layers));
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const int in = k == 0 ? s.embed_dim : 2 * s.hidden;
    for (const LstmWeights* w : {&layers[k].forward, &layers[k].backward}) {
      expect_shape(w->input, 4 * s.hidden, in, "LSTM input weights");
      expect_shape(w->recurrent, 4 * s.hidden, s.hidden, "LSTM recurrent weights");
      expect_shape(w->bias, 4 * s.hidden, "LSTM bias");
    }
  }
  expect_shape(dense, s.classes, 2 * s.hidden, "dense weights");
  expect_shape(dense_bias, s.classes, "dense bias");
}

void NetworkParams::validate() const {
  validate_shapes();
  for_each_tensor(*this, [](const std::string& name, std::span<const double> t) {
    for (double v : t) {
      if (!std::isfinite(v)) fail(ErrorCode::shape_mismatch, fmt::format("non-finite value in {}", name));
    }
  });
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor(*this, [&](const std::string&, std::span<const double> t) { n += t.size(); });
  return n;
}

TokenBatch to_tokens(std::span<const EncodedName> names) {
  TokenBatch out;
  out.reserve(names.size());
  for (const auto& n : names) out.emplace_back(n.codes.begin(), n.codes.end());
  return out;
}

std::vector<ProbVector> forward(const NetworkParams& params, const TokenBatch& batch, const ForwardOptions& options) {
  const auto cache = run_forward(params, batch, options);
  std::vector<ProbVector> out;
  out.reserve(batch.size());
  for (Eigen::Index e = 0; e < cache.probs.cols(); ++e) {
    std::vector<double> p(cache.probs.col(e).data(), cache.probs.col(e).data() + cache.probs.rows());
    out.push_back(renormalize(p));
  }
  return out;
}

namespace {

double cross_entropy(const Matrix& probs, std::span<const std::size_t> labels) {
  double total = 0.0;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    total -= std::log(probs(static_cast<Eigen::Index>(labels[e]), static_cast<Eigen::Index>(e)));
  }
  return total / static_cast<double>(labels.size());
}

void check_labels(const NetworkParams& params, const TokenBatch& batch, std::span<const std::size_t> labels) {
  if (labels.size() != batch.size()) fail(ErrorCode::shape_mismatch, "label count differs from batch size");
  for (auto l : labels) {
    if (l >= static_cast<std::size_t>(params.shape.classes)) {
      fail(ErrorCode::shape_mismatch, fmt::format("label {} outside {} classes", l, params.shape.classes));
    }
  }
}

}  // namespace

double loss(const NetworkParams& params, const TokenBatch& batch, std::span<const std::size_t> labels,
            const ForwardOptions& options) {
  check_labels(params, batch, labels);
  return cross_entropy(run_forward(params, batch, options).probs, labels);
}

LossAndGradients loss_and_gradients(const NetworkParams& params, const TokenBatch& batch,
                                    std::span<const std::size_t> labels, const ForwardOptions& options) {
  check_labels(params, batch, labels);
  const ForwardCache cache = run_forward(params, batch, options);
  const std::size_t steps = batch.front().size();
  const auto b = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index hidden = params.shape.hidden;
  const Eigen::Index cols = static_cast<Eigen::Index>(steps) * b;

  LossAndGradients result{cross_entropy(cache.probs, labels), NetworkParams::zeros(params.shape)};
  NetworkParams& grad = result.gradients;

  Matrix d_logits = cache.probs;
  for (Eigen::Index e = 0; e < b; ++e) d_logits(static_cast<Eigen::Index>(labels[static_cast<std::size_t>(e)]), e) -= 1.0;
  d_logits /= static_cast<double>(b);

  grad.dense.noalias() = d_logits * cache.feature.transpose();
  grad.dense_bias = d_logits.rowwise().sum();
  const Matrix d_feature = params.dense.transpose() * d_logits;

  // Only the last forward step and the first backward step feed the head.
  Matrix d_output = Matrix::Zero(2 * hidden, cols);
  d_output.block(0, cols - b, hidden, b) = d_feature.topRows(hidden);
  d_output.block(hidden, 0, hidden, b) = d_feature.bottomRows(hidden);

  for (std::size_t k = params.layers.size(); k-- > 0;) {
    const LayerCache& lc = cache.layers[k];
    Matrix d_input = Matrix::Zero(lc.input.rows(), cols);
    backprop_direction(params.layers[k].forward, lc.fwd, lc.input, d_output.topRows(hidden), steps, b, false,
                       grad.layers[k].forward, d_input);
    backprop_direction(params.layers[k].backward, lc.bwd, lc.input, d_output.bottomRows(hidden), steps, b, true,
                       grad.layers[k].backward, d_input);
    if (k > 0) {
      const LayerCache& below = cache.layers[k - 1];
      d_output = below.mask.size() ? d_input.cwiseProduct(below.mask) : std::move(d_input);
    } else {
      for (std::size_t t = 0; t < steps; ++t) {
        for (Eigen::Index e = 0; e < b; ++e) {
          grad.embedding.col(batch[static_cast<std::size_t>(e)][t]) += d_input.col(static_cast<Eigen::Index>(t) * b + e);
        }
      }
    }
  }
  return result;
}

ProbVector predict_proba(const NetworkParams& params, std::string_view first, std::string_view last) {
  const auto f = normalize(first, NormalizationProfile::neural);
  const auto l = normalize(last, NormalizationProfile::neural);
  const EncodedName encoded = encode_name(f, l);
  return forward(params, to_tokens(std::span(&encoded, 1))).front();
}

}  // namespace nameproxy::nn
