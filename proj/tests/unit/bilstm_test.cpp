#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "nameproxy/bilstm.hpp"
#include "nameproxy/csv.hpp"
#include "nameproxy/error.hpp"
#include "oracles.hpp"

namespace nameproxy::nn {
namespace {

NetworkShape tiny_shape(double dropout = 0.0) {
  NetworkShape s;
  s.embed_dim = 8;
  s.hidden = 8;
  s.layers = 2;
  s.dropout = dropout;
  return s;
}

TokenBatch random_batch(std::uint64_t seed, std::size_t batch, std::size_t window) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> code(0, kVocabularySize - 1);
  TokenBatch out(batch, std::vector<int>(window));
  for (auto& seq : out) {
    for (auto& c : seq) c = code(rng);
  }
  return out;
}

double max_abs_diff(const NetworkParams& a, const NetworkParams& b) {
  std::vector<std::span<const double>> lhs;
  for_each_tensor(a, [&](const std::string&, std::span<const double> t) { lhs.push_back(t); });
  double worst = 0.0;
  std::size_t k = 0;
  for_each_tensor(b, [&](const std::string&, std::span<const double> t) {
    for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(t[i] - lhs[k][i]));
    ++k;
  });
  return worst;
}

TEST(ForwardTest, ZeroWeightsGiveUniform) {
  const auto params = NetworkParams::zeros(tiny_shape());
  for (const auto& p : forward(params, random_batch(1, 5, kWindow))) {
    for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(p[r], 0.25);
  }
  EXPECT_EQ(predict_proba(params, "Maria", "Lopez"), ProbVector({0.25, 0.25, 0.25, 0.25}));
}

TEST(ForwardTest, ShapeContractAtDefaultDims) {
  const auto params = NetworkParams::initialize(NetworkShape{}, 3);
  const std::vector<EncodedName> names{encode_name("ann", "lee"), encode_name("jose", "garcia"),
                                       encode_name("thi", "nguyen")};
  const auto out = forward(params, to_tokens(names));
  ASSERT_EQ(out.size(), 3u);
  for (const auto& p : out) {
    ASSERT_EQ(p.size(), 4u);
    EXPECT_TRUE(is_probability_vector(p.values()));
  }
}

TEST(ForwardTest, EvalIgnoresSeedTrainDoesNot) {
  const auto params = NetworkParams::initialize(tiny_shape(0.2), 9);
  const auto batch = random_batch(2, 4, 12);
  EXPECT_EQ(forward(params, batch, {Mode::eval, 1}), forward(params, batch, {Mode::eval, 2}));
  EXPECT_NE(forward(params, batch, {Mode::train, 1}), forward(params, batch, {Mode::train, 2}));
  EXPECT_EQ(forward(params, batch, {Mode::train, 5}), forward(params, batch, {Mode::train, 5}));
}

TEST(ForwardTest, TruncationEquivalentNamesAgree) {
  const auto params = NetworkParams::initialize(tiny_shape(), 4);
  const std::string first = "bartholomew";
  const std::string last = "vanderschoothorstington";
  EXPECT_EQ(predict_proba(params, first, last), predict_proba(params, first, last + "xyz"));
}

TEST(ForwardTest, ShapeMismatch) {
  auto params = NetworkParams::initialize(tiny_shape(), 4);
  params.dense.resize(4, 7);
  try {
    forward(params, random_batch(1, 2, 6));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape_mismatch);
  }
}

TEST(LossTest, UniformOutputIsLnFour) {
  const auto params = NetworkParams::zeros(tiny_shape());
  const std::vector<std::size_t> labels{0, 1, 2, 3, 1};
  EXPECT_NEAR(loss(params, random_batch(3, 5, 10), labels), std::log(4.0), 1e-12);
}

TEST(GradientTest, MatchesFiniteDifferences) {
  const auto shape = tiny_shape(0.2);
  const auto params = NetworkParams::initialize(shape, 21);
  const auto batch = random_batch(22, 4, 6);
  const std::vector<std::size_t> labels{0, 3, 1, 2};
  for (auto mode : {Mode::eval, Mode::train}) {
    const auto check = testing::finite_difference_check(params, batch, labels, {mode, 8});
    EXPECT_LT(check.max_relative_error, 1e-4) << "worst group " << check.worst_group;
    EXPECT_EQ(check.per_group.size(), 3u + 6u * 2u);
    RecordProperty(mode == Mode::eval ? "eval_max_rel" : "train_max_rel", std::to_string(check.max_relative_error));
  }
}

TEST(GradientTest, DuplicatedExampleContributesIdentically) {
  const auto params = NetworkParams::initialize(tiny_shape(), 5);
  const auto one = random_batch(6, 1, 8);
  const TokenBatch two{one[0], one[0]};
  const std::vector<std::size_t> l1{2};
  const std::vector<std::size_t> l2{2, 2};
  const auto a = loss_and_gradients(params, one, l1, {Mode::eval, 0});
  const auto b = loss_and_gradients(params, two, l2, {Mode::eval, 0});
  EXPECT_NEAR(a.loss, b.loss, 1e-14);
  EXPECT_LT(max_abs_diff(a.gradients, b.gradients), 1e-14);
}

TEST(GradientTest, OneSmallStepDecreasesLoss) {
  const auto params = NetworkParams::initialize(tiny_shape(), 12);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto batch = random_batch(100 + s, 1, kWindow);
    const std::vector<std::size_t> label{s % 4};
    auto p = params;
    const auto before = loss_and_gradients(p, batch, label, {Mode::eval, 0});
    AdamConfig cfg;
    cfg.learning_rate = 1e-4;
    cfg.weight_decay = 0.0;
    auto state = AdamState::for_params(p, cfg);
    adam_step(p, before.gradients, state);
    EXPECT_LT(loss(p, batch, label), before.loss) << "example " << s;
  }
}

TEST(AdamTest, ZeroGradientNoDecayIsFixedPoint) {
  std::vector<double> theta{0.5, -1.25, 3.0};
  const auto saved = theta;
  std::vector<double> grad(3, 0.0), m(3, 0.0), v(3, 0.0);
  AdamConfig cfg;
  cfg.weight_decay = 0.0;
  for (int step = 1; step <= 5; ++step) adam_update(theta, grad, m, v, step, cfg);
  EXPECT_EQ(theta, saved);
}

TEST(AdamTest, FirstStepHandComputed) {
  std::vector<double> theta{1.0}, grad{1.0}, m{0.0}, v{0.0};
  AdamConfig cfg;
  cfg.weight_decay = 0.0;
  adam_update(theta, grad, m, v, 1, cfg);
  // m_hat = 1, v_hat = 1: delta = lr / (1 + eps)
  EXPECT_NEAR(1.0 - theta[0], 0.001 / (1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(m[0], 0.1, 1e-15);
  EXPECT_NEAR(v[0], 0.001, 1e-15);
}

TEST(AdamTest, WeightDecayShrinksPositiveWeights) {
  for (bool decoupled : {false, true}) {
    std::vector<double> theta{2.0}, grad{0.0}, m{0.0}, v{0.0};
    AdamConfig cfg;
    cfg.decoupled_decay = decoupled;
    adam_update(theta, grad, m, v, 1, cfg);
    EXPECT_LT(theta[0], 2.0);
    EXPECT_GT(theta[0], 1.9);
  }
}

TEST(AdamTest, StepCounterAdvances) {
  auto p = NetworkParams::initialize(tiny_shape(), 1);
  auto state = AdamState::for_params(p, AdamConfig{});
  const auto g = NetworkParams::zeros(p.shape);
  adam_step(p, g, state);
  adam_step(p, g, state);
  EXPECT_EQ(state.step, 2);
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "nameproxy_bilstm_test";
  std::filesystem::create_directories(dir);
  return dir;
}

ErrorCode load_error(const std::string& path, const NetworkShape* expected = nullptr) {
  try {
    load_params(path, expected);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io;
}

TEST(ParamsFileTest, DefaultShapeRoundTripIsBitExact) {
  const auto params = NetworkParams::initialize(NetworkShape{}, 77);
  const auto path = (scratch() / "default.bin").string();
  save_params(params, path);
  const auto back = load_params(path);
  EXPECT_EQ(back.shape, params.shape);
  EXPECT_EQ(max_abs_diff(back, params), 0.0);
  EXPECT_EQ(serialize_params(back), serialize_params(params));
}

TEST(ParamsFileTest, TruncatedAndCorruptedFilesAreRejected) {
  const auto params = NetworkParams::initialize(tiny_shape(), 2);
  auto bytes = serialize_params(params);
  const auto path = (scratch() / "truncated.bin").string();
  csv::write_text_file(path, std::string_view(bytes).substr(0, bytes.size() / 2));
  EXPECT_EQ(load_error(path), ErrorCode::corrupt_file);
  bytes[bytes.size() / 2] ^= 0x40;
  csv::write_text_file(path, bytes);
  EXPECT_EQ(load_error(path), ErrorCode::corrupt_file);
  csv::write_text_file(path, "not a parameter file");
  EXPECT_EQ(load_error(path), ErrorCode::corrupt_file);
}

TEST(ParamsFileTest, ShapeMetadataChecked) {
  const auto params = NetworkParams::initialize(tiny_shape(), 2);
  const auto path = (scratch() / "hidden8.bin").string();
  save_params(params, path);
  const auto small = tiny_shape();
  EXPECT_EQ(load_params(path, &small).shape.hidden, 8);
  const NetworkShape big;
  EXPECT_EQ(load_error(path, &big), ErrorCode::shape_mismatch);
}

}  // namespace
}  // namespace nameproxy::nn
