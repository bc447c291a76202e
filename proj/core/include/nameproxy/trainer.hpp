#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nameproxy/bilstm.hpp"
#include "nameproxy/normalize.hpp"
#include "nameproxy/race.hpp"

namespace nameproxy::nn {

struct TrainConfig {
  NetworkShape shape;
  AdamConfig adam;
  std::size_t batch_size = 512;
  double split = 0.8;  // training share, applied per class
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
};

struct TrainingData {
  TokenBatch train_inputs;
  std::vector<std::size_t> train_labels;
  TokenBatch validation_inputs;
  std::vector<std::size_t> validation_labels;
  std::vector<std::size_t> train_class_counts;  // after undersampling
  std::size_t dropped_invalid = 0;
};

// Neural-normalizes names, drops pairs failing the length rule, splits each
// class by `split` (seeded), then undersamples the training side to the
// smallest class. Throws Error{insufficient_class} when any race has fewer
// than two usable records.
TrainingData prepare_training_data(std::span<const PersonRecord> records, const RaceSet& races,
                                   const TrainConfig& config);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  NetworkParams params;  // best validation epoch
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
};

TrainResult train(const TrainingData& data, const TrainConfig& config);
TrainResult train(std::span<const PersonRecord> records, const RaceSet& races, const TrainConfig& config);

double accuracy(const NetworkParams& params, const TokenBatch& inputs, std::span<const std::size_t> labels,
                std::size_t chunk = 512);

// `epoch,train_loss,val_accuracy`
std::string format_training_log(const std::vector<EpochLog>& log);

}  // namespace nameproxy::nn
