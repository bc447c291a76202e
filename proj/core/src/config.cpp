#include "nameproxy/config.hpp"

#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "nameproxy/csv.hpp"
#include "nameproxy/error.hpp"

namespace nameproxy {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, std::string_view where) {
  if (!obj.is_object()) fail(ErrorCode::schema, fmt::format("{}: expected an object", where));
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.contains(key)) fail(ErrorCode::schema, fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::schema, fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

}  // namespace

RunConfig::RunConfig() {
  training.shape.classes = static_cast<int>(races.size());
}

RunConfig parse_run_config(std::string_view json_text, std::string_view source) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::schema, fmt::format("{}: {}", source, e.what()));
  }
  const std::string where(source);
  reject_unknown(root, {"races", "seed", "normalize", "tables", "network", "training", "ensemble", "evaluation", "sample"},
                 where);

  RunConfig cfg;
  if (root.contains("races")) {
    std::vector<std::string> labels;
    read(root, "races", labels, where);
    cfg.races = RaceSet(std::move(labels));
  }
  read(root, "seed", cfg.seed, where);

  if (root.contains("normalize")) {
    const auto& n = root["normalize"];
    reject_unknown(n, {"suffixes", "filter_words_file"}, where + ".normalize");
    read(n, "suffixes", cfg.normalize.suffixes, where + ".normalize");
    if (n.contains("filter_words_file")) {
      std::string path;
      read(n, "filter_words_file", path, where + ".normalize");
      cfg.filter_words_file = path;
    }
  }

  if (root.contains("tables")) {
    const auto& t = root["tables"];
    reject_unknown(t, {"target_shares", "pseudo_count"}, where + ".tables");
    if (t.contains("target_shares") && !t["target_shares"].is_null()) {
      std::vector<double> shares;
      read(t, "target_shares", shares, where + ".tables");
      cfg.tables.target_shares = shares;
    }
    read(t, "pseudo_count", cfg.tables.pseudo_count, where + ".tables");
  }

  auto& shape = cfg.training.shape;
  if (root.contains("network")) {
    const auto& n = root["network"];
    reject_unknown(n, {"embed_dim", "hidden", "layers", "dropout"}, where + ".network");
    read(n, "embed_dim", shape.embed_dim, where + ".network");
    read(n, "hidden", shape.hidden, where + ".network");
    read(n, "layers", shape.layers, where + ".network");
    read(n, "dropout", shape.dropout, where + ".network");
  }
  shape.classes = static_cast<int>(cfg.races.size());

  if (root.contains("training")) {
    const auto& t = root["training"];
    const auto w = where + ".training";
    reject_unknown(t, {"batch_size", "split", "epochs", "learning_rate", "weight_decay", "decoupled_decay"}, w);
    read(t, "batch_size", cfg.training.batch_size, w);
    read(t, "split", cfg.training.split, w);
    read(t, "epochs", cfg.training.epochs, w);
    read(t, "learning_rate", cfg.training.adam.learning_rate, w);
    read(t, "weight_decay", cfg.training.adam.weight_decay, w);
    read(t, "decoupled_decay", cfg.training.adam.decoupled_decay, w);
  }
  cfg.training.seed = cfg.seed;

  if (root.contains("ensemble")) {
    const auto& e = root["ensemble"];
    reject_unknown(e, {"members", "weights"}, where + ".ensemble");
    read(e, "members", cfg.ensemble.members, where + ".ensemble");
    if (e.contains("weights")) {
      read(e, "weights", cfg.ensemble.weights, where + ".ensemble");
    } else {
      cfg.ensemble.weights.assign(cfg.ensemble.members.size(), 1.0);
    }
    try {
      cfg.ensemble.validate();
    } catch (const Error& err) {
      fail(ErrorCode::schema, fmt::format("{}.ensemble: {}", where, err.what()));
    }
  }

  if (root.contains("evaluation")) {
    const auto& e = root["evaluation"];
    const auto w = where + ".evaluation";
    reject_unknown(e, {"strict", "intersect_covered", "sample_size", "shares"}, w);
    read(e, "strict", cfg.evaluation.strict, w);
    read(e, "intersect_covered", cfg.evaluation.intersect_covered, w);
    if (e.contains("sample_size") && !e["sample_size"].is_null()) {
      std::size_t n = 0;
      read(e, "sample_size", n, w);
      cfg.evaluation.sample_size = n;
    }
    read(e, "shares", cfg.evaluation.shares, w);
  }

  if (root.contains("sample")) {
    const auto& s = root["sample"];
    reject_unknown(s, {"size", "shares"}, where + ".sample");
    read(s, "size", cfg.sample.size, where + ".sample");
    read(s, "shares", cfg.sample.shares, where + ".sample");
  }

  const bool eval_shares_given = root.contains("evaluation") && root["evaluation"].contains("shares");
  const bool sample_shares_given = root.contains("sample") && root["sample"].contains("shares");
  for (auto [shares, given] : {std::pair{&cfg.evaluation.shares, eval_shares_given},
                               std::pair{&cfg.sample.shares, sample_shares_given}}) {
    if (shares->size() == cfg.races.size()) continue;
    if (given) fail(ErrorCode::schema, fmt::format("{}: share vectors need one entry per race", where));
    shares->assign(cfg.races.size(), 1.0 / static_cast<double>(cfg.races.size()));
  }
  if (cfg.tables.target_shares && cfg.tables.target_shares->size() != cfg.races.size()) {
    fail(ErrorCode::schema, fmt::format("{}: tables.target_shares needs one entry per race", where));
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(csv::read_text_file(path), path);
}

}  // namespace nameproxy
