#include "nameproxy/trainer.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nameproxy/error.hpp"
#include "nameproxy/rng.hpp"

namespace nameproxy::nn {
namespace {

// Stream ids for derive_seed; each consumer of randomness gets its own.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kEpochStream = 1000;
constexpr std::uint64_t kDropoutStream = 1u << 20;

}  // namespace

TrainingData prepare_training_data(std::span<const PersonRecord> records, const RaceSet& races,
                                   const TrainConfig& config) {
  if (!(config.split > 0.0 && config.split < 1.0)) fail(ErrorCode::invalid_argument, "split must lie in (0, 1)");
  if (config.batch_size == 0) fail(ErrorCode::invalid_argument, "batch size must be at least 1");

  TrainingData data;
  std::vector<std::vector<EncodedName>> by_class(races.size());
  for (const auto& rec : records) {
    if (!rec.race || *rec.race >= races.size()) {
      fail(ErrorCode::invalid_argument, fmt::format("training record '{}' has no valid race label", rec.row_id));
    }
    std::string first;
    std::string last;
    try {
      first = normalize(rec.first, NormalizationProfile::neural);
      last = normalize(rec.last, NormalizationProfile::neural);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::empty_after_normalization) throw;
    }
    if (!is_valid_name(first, last)) {
      ++data.dropped_invalid;
      continue;
    }
    by_class[*rec.race].push_back(encode_name(first, last));
  }
  for (std::size_t r = 0; r < by_class.size(); ++r) {
    if (by_class[r].size() < 2) {
      fail(ErrorCode::insufficient_class,
           fmt::format("race '{}' has {} usable records; training needs at least 2", races.label(r), by_class[r].size()));
    }
  }

  Rng rng(derive_seed(config.seed, kSplitStream));
  std::vector<std::vector<EncodedName>> train_pool(races.size());
  for (std::size_t r = 0; r < by_class.size(); ++r) {
    auto& names = by_class[r];
    rng.shuffle(std::span(names));
    const auto n = names.size();
    auto n_train = static_cast<std::size_t>(std::llround(config.split * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    train_pool[r].assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(n_train));
    for (std::size_t i = n_train; i < n; ++i) {
      data.validation_inputs.emplace_back(names[i].codes.begin(), names[i].codes.end());
      data.validation_labels.push_back(r);
    }
  }

  // The pools are already shuffled, so a prefix is a uniform undersample.
  std::size_t minority = train_pool.front().size();
  for (const auto& pool : train_pool) minority = std::min(minority, pool.size());
  data.train_class_counts.assign(races.size(), minority);
  for (std::size_t r = 0; r < train_pool.size(); ++r) {
    for (std::size_t i = 0; i < minority; ++i) {
      data.train_inputs.emplace_back(train_pool[r][i].codes.begin(), train_pool[r][i].codes.end());
      data.train_labels.push_back(r);
    }
  }
  return data;
}

double accuracy(const NetworkParams& params, const TokenBatch& inputs, std::span<const std::size_t> labels,
                std::size_t chunk) {
  if (inputs.size() != labels.size()) fail(ErrorCode::length_mismatch, "inputs and labels differ in length");
  if (inputs.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < inputs.size(); start += chunk) {
    const std::size_t end = std::min(inputs.size(), start + chunk);
    TokenBatch batch(inputs.begin() + static_cast<std::ptrdiff_t>(start), inputs.begin() + static_cast<std::ptrdiff_t>(end));
    const auto probs = forward(params, batch);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (argmax_index(probs[i]) == labels[start + i]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(inputs.size());
}

TrainResult train(const TrainingData& data, const TrainConfig& config) {
  if (data.train_inputs.empty()) fail(ErrorCode::insufficient_class, "empty training set");
  if (config.batch_size == 0) fail(ErrorCode::invalid_argument, "batch size must be at least 1");

  NetworkParams params = NetworkParams::initialize(config.shape, derive_seed(config.seed, kInitStream));
  AdamState adam = AdamState::for_params(params, config.adam);

  TrainResult result{params, {}, 0};
  double best_accuracy = -1.0;
  std::vector<std::size_t> order(data.train_inputs.size());
  std::uint64_t batch_counter = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(config.seed, kEpochStream + epoch));
    rng.shuffle(std::span(order));

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      TokenBatch batch;
      std::vector<std::size_t> labels;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(data.train_inputs[order[i]]);
        labels.push_back(data.train_labels[order[i]]);
      }
      auto step = loss_and_gradients(params, batch, labels,
                                     {Mode::train, derive_seed(config.seed, kDropoutStream + batch_counter++)});
      loss_sum += step.loss * static_cast<double>(end - start);
      adam_step(params, step.gradients, adam);
    }

    EpochLog row{epoch, loss_sum / static_cast<double>(order.size()),
                 accuracy(params, data.validation_inputs, data.validation_labels)};
    result.log.push_back(row);
    if (row.val_accuracy > best_accuracy) {
      best_accuracy = row.val_accuracy;
      result.params = params;
      result.best_epoch = epoch;
    }
  }
  return result;
}

TrainResult train(std::span<const PersonRecord> records, const RaceSet& races, const TrainConfig& config) {
  if (static_cast<std::size_t>(config.shape.classes) != races.size()) {
    fail(ErrorCode::shape_mismatch, "network class count differs from the race set");
  }
  return train(prepare_training_data(records, races, config), config);
}

std::string format_training_log(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,val_accuracy\n";
  for (const auto& row : log) out += fmt::format("{},{:.6f},{:.6f}\n", row.epoch, row.train_loss, row.val_accuracy);
  return out;
}

}  // namespace nameproxy::nn
