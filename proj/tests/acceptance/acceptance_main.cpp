// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures, so ctest fails if any criterion does.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "nameproxy/bayes.hpp"
#include "nameproxy/commands.hpp"
#include "nameproxy/csv.hpp"
#include "nameproxy/dataset.hpp"
#include "nameproxy/ensemble.hpp"
#include "nameproxy/evaluation.hpp"
#include "nameproxy/sampling.hpp"
#include "nameproxy/trainer.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace nameproxy;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s;  // 0: none
  std::function<Outcome()> run;
};

// --- Bayes oracle equivalence ------------------------------------------------

testing::FactoredPopulation large_population() {
  std::mt19937_64 rng(20240101);
  testing::FactoredPopulation pop;
  for (std::size_t i = 0; i < 60; ++i) pop.surnames.push_back(testing::token("sur", i));
  for (std::size_t i = 0; i < 6; ++i) pop.firstnames.push_back(testing::token("fn", i));
  for (std::size_t i = 0; i < 24; ++i) pop.geos.push_back(testing::token("geo", i));
  pop.race_weight = {1, 1, 1, 2};
  pop.surname_weight = testing::random_weights(rng, 4, pop.surnames.size(), 1, 3, 0.25);
  pop.first_weight = testing::random_weights(rng, 4, pop.firstnames.size(), 1, 3, 0.2);
  pop.geo_weight = testing::random_weights(rng, 4, pop.geos.size(), 1, 3, 0.25);
  // the white row is never zero so every name and geography exists
  for (auto& w : pop.surname_weight[3]) w = std::max(w, 1);
  for (auto& w : pop.first_weight[3]) w = std::max(w, 1);
  for (auto& w : pop.geo_weight[3]) w = std::max(w, 1);
  return pop;
}

Outcome bayes_oracle() {
  const auto pop = large_population();
  const auto records = pop.records();
  const RaceSet races;
  BayesContext ctx(build_name_table(records, races, NameKind::surname).table,
                   build_name_table(records, races, NameKind::firstname).table, build_geo_table(records, races));
  double worst = 0.0;
  std::size_t bisg_cells = 0, bifsg_cells = 0, mismatched_coverage = 0;
  for (std::size_t s = 0; s < pop.surnames.size(); ++s) {
    for (std::size_t g = 0; g < pop.geos.size(); ++g) {
      const auto want = pop.enumerate_posterior(s, g, std::nullopt);
      const auto got = bisg(ctx, pop.surnames[s], pop.geos[g]);
      if (got.covered() != !want.empty()) ++mismatched_coverage;
      if (got.covered() && !want.empty()) {
        ++bisg_cells;
        for (std::size_t r = 0; r < 4; ++r) worst = std::max(worst, std::abs((*got.probs)[r] - want[r]));
      }
      for (std::size_t f = 0; f < pop.firstnames.size(); ++f) {
        const auto want_f = pop.enumerate_posterior(s, g, f);
        const auto got_f = bifsg(ctx, pop.firstnames[f], pop.surnames[s], pop.geos[g]);
        if (got_f.covered() != !want_f.empty()) ++mismatched_coverage;
        if (!got_f.covered() || want_f.empty()) continue;
        ++bifsg_cells;
        for (std::size_t r = 0; r < 4; ++r) worst = std::max(worst, std::abs((*got_f.probs)[r] - want_f[r]));
      }
    }
  }
  const bool pass = records.size() >= 100000 && worst <= 1e-9 && mismatched_coverage == 0 && bisg_cells > 0;
  return {pass, fmt::format("{} records, {} surnames, {} geos, {} bisg + {} bifsg cells, max |diff| {:.2e}",
                            records.size(), pop.surnames.size(), pop.geos.size(), bisg_cells, bifsg_cells, worst)};
}

// --- neutral-factor identities -----------------------------------------------

Outcome neutral_factors() {
  std::mt19937_64 rng(91);
  std::uniform_int_distribution<int> count(0, 1000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Counts totals{2000, 2000, 2000, 2000};
  double worst_first = 0.0, worst_geo = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    NameTable s(RaceSet{}, NameKind::surname);
    s.insert("doe", NameEntry{{count(rng), count(rng), count(rng), count(rng) + 1}, Source::internal});
    s.set_race_totals(Source::internal, totals);
    NameTable f(RaceSet{}, NameKind::firstname);
    const std::int64_t c = 1 + count(rng);
    f.insert("jo", NameEntry{{c, c, c, c}, Source::internal});
    f.set_race_totals(Source::internal, totals);
    GeoTable g{RaceSet{}, {{"g", {count(rng) + 1, count(rng) + 1, count(rng) + 1, count(rng) + 1}}}, totals};
    BayesContext ctx(s, f, g);
    const auto a = bisg(ctx, "doe", "g");
    const auto b = bifsg(ctx, "jo", "doe", "g");
    for (std::size_t r = 0; r < 4; ++r) worst_first = std::max(worst_first, std::abs((*a.probs)[r] - (*b.probs)[r]));

    std::vector<double> raw{u(rng), u(rng), u(rng), u(rng) + 1e-3};
    const auto name = renormalize(raw);
    const auto aug = geo_augment(name, Likelihood(4, 1e-4 + u(rng)));
    for (std::size_t r = 0; r < 4; ++r) worst_geo = std::max(worst_geo, std::abs((*aug.probs)[r] - name[r]));
  }
  return {worst_first <= 1e-12 && worst_geo <= 1e-12,
          fmt::format("2000 trials, bifsg vs bisg {:.2e}, geo_augment vs name {:.2e}", worst_first, worst_geo)};
}

// --- gradient check ----------------------------------------------------------

Outcome gradient_check() {
  nn::NetworkShape shape;
  shape.embed_dim = 8;
  shape.hidden = 8;
  shape.layers = 2;
  const auto params = nn::NetworkParams::initialize(shape, 5);
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> code(0, kVocabularySize - 1);
  nn::TokenBatch batch(4, std::vector<int>(6));
  for (auto& seq : batch) {
    for (auto& c : seq) c = code(rng);
  }
  batch[3][4] = batch[3][5] = kPadCode;
  const std::vector<std::size_t> labels{0, 1, 2, 3};
  double worst = 0.0;
  std::string group;
  for (auto mode : {nn::Mode::eval, nn::Mode::train}) {
    const auto check = testing::finite_difference_check(params, batch, labels, {mode, 17});
    if (check.max_relative_error >= worst) {
      worst = check.max_relative_error;
      group = check.worst_group;
    }
  }
  return {worst < 1e-4, fmt::format("{} parameters, 15 groups, eval and train mode, max relative error {:.2e} ({})",
                                    params.parameter_count(), worst, group)};
}

// --- learnability ------------------------------------------------------------

Outcome learnability() {
  // race = class of the first name's leading letter: a-f, g-m, n-s, t-z
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> letter(0, 25);
  std::uniform_int_distribution<int> len(3, 8);
  const std::size_t bounds[] = {0, 6, 13, 19, 26};
  std::vector<PersonRecord> records;
  for (std::size_t r = 0; r < 4; ++r) {
    std::uniform_int_distribution<std::size_t> lead(bounds[r], bounds[r + 1] - 1);
    for (int i = 0; i < 1000; ++i) {
      std::string first(1, static_cast<char>('a' + lead(rng)));
      std::string last;
      for (int k = len(rng); k > 0; --k) first.push_back(static_cast<char>('a' + letter(rng)));
      for (int k = len(rng); k > 0; --k) last.push_back(static_cast<char>('a' + letter(rng)));
      records.push_back({std::to_string(records.size()), first, last, "g", r});
    }
  }
  nn::TrainConfig cfg;
  cfg.shape.embed_dim = 32;
  cfg.shape.hidden = 64;
  cfg.shape.layers = 2;
  cfg.batch_size = 32;
  cfg.epochs = 10;
  cfg.seed = 2;
  const auto data = nn::prepare_training_data(records, RaceSet{}, cfg);
  const auto result = nn::train(data, cfg);
  double best = 0.0;
  std::size_t first_hit = 0;
  for (const auto& e : result.log) {
    best = std::max(best, e.val_accuracy);
    if (!first_hit && e.val_accuracy >= 0.95) first_hit = e.epoch;
  }
  const double final_acc = nn::accuracy(result.params, data.validation_inputs, data.validation_labels);
  return {final_acc >= 0.95,
          fmt::format("{} train / {} validation examples, batch {}, validation accuracy {:.4f} (best epoch {}, "
                      "first >= 0.95 at epoch {})",
                      data.train_inputs.size(), data.validation_inputs.size(), cfg.batch_size, final_acc,
                      result.best_epoch, first_hit)};
}

// --- encoding fidelity ---------------------------------------------------------

Outcome encoding_fidelity() {
  const auto smith = encode_text("smith", 5);
  bool ok = smith == std::vector<int>{19, 13, 9, 20, 8};
  const auto in_name = encode_name("al", "smith");
  ok = ok && std::vector<int>(in_name.codes.begin() + 3, in_name.codes.begin() + 8) == smith;

  std::mt19937_64 rng(55);
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz-' ";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(2, 25);
  std::size_t violations = 0, truncated = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    auto word = [&] {
      std::string s(1, static_cast<char>('a' + pick(rng) % 26));
      for (int k = len(rng); k > 1; --k) s.push_back(alphabet[pick(rng)]);
      s.push_back('z');
      return normalize(s, NormalizationProfile::neural);
    };
    const auto first = word();
    const auto last = word();
    const std::string full = first + " " + last;
    const auto e = encode_name(first, last);
    bool pad_seen = false;
    for (std::size_t i = 0; i < kWindow; ++i) {
      const int expected = i < full.size() ? char_code(full[i]) : kPadCode;
      if (e.codes[i] != expected) ++violations;
      if (e.codes[i] == kPadCode) pad_seen = true;
      else if (pad_seen) ++violations;
    }
    if (full.size() > kWindow) ++truncated;
    if (decode_name(e) != full.substr(0, kWindow)) ++violations;
    if (full.size() <= kWindow && encode_name(first, last) != e) ++violations;
  }
  ok = ok && violations == 0 && truncated > 0;
  return {ok, fmt::format("smith prefix exact, {} random names ({} truncated), {} violations", trials, truncated,
                          violations)};
}

// --- suppression matrix --------------------------------------------------------

Outcome suppression_matrix() {
  const std::int64_t totals[] = {14, 15, 29, 30, 31};
  std::vector<PersonRecord> records;
  std::map<std::string, bool> expected;
  auto add = [&](const std::string& name, std::size_t race, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) records.push_back({"", "pat", name, "g", race});
  };
  std::size_t mismatches = 0;
  int cell = 0;
  for (auto t : totals) {
    for (int nonzero : {1, 2}) {
      const Counts c = nonzero == 1 ? Counts{0, t, 0, 0} : Counts{t - 1, 0, 1, 0};
      const bool want = t >= 30 || (t >= 15 && nonzero == 1);
      if (passes_suppression(c) != want) ++mismatches;
      const auto name = testing::token("cell", static_cast<std::size_t>(cell++));
      for (std::size_t r = 0; r < 4; ++r) add(name, r, c[r]);
      expected[name] = want;
    }
  }
  for (std::size_t r = 0; r < 4; ++r) add("filler", r, 40);
  const auto table = build_name_table(records, RaceSet{}, NameKind::surname).table;
  for (const auto& [name, want] : expected) {
    if ((table.find(name) != nullptr) != want) ++mismatches;
  }
  return {mismatches == 0, fmt::format("10 cells checked on the rule and through table building, {} mismatches",
                                       mismatches)};
}

// --- metrics oracle --------------------------------------------------------------

Outcome metrics_oracle() {
  std::mt19937_64 rng(10000);
  std::uniform_int_distribution<std::size_t> label(0, 3);
  std::bernoulli_distribution declined(0.1);
  std::vector<std::size_t> truth(10000);
  std::vector<std::optional<std::size_t>> pred(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = label(rng);
    if (!declined(rng)) pred[i] = label(rng);
  }
  const auto report = class_metrics(truth, pred, RaceSet{});
  double metric_diff = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    const auto c = testing::brute_confusion(truth, pred, r);
    const double p = double(c.tp) / double(c.tp + c.fp);
    const double rc = double(c.tp) / double(c.tp + c.fn);
    const double f1 = 2 * p * rc / (p + rc);
    const double acc = double(c.tp + c.tn) / double(c.tp + c.fp + c.fn + c.tn);
    const auto& m = report.per_race[r];
    for (double d : {m.precision - p, m.recall - rc, m.f1 - f1, m.accuracy - acc}) {
      metric_diff = std::max(metric_diff, std::abs(d));
    }
  }

  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> t1k(1000);
  std::vector<ProbVector> scores;
  for (auto& t : t1k) {
    t = label(rng);
    std::vector<double> raw{std::round(u(rng) * 50), std::round(u(rng) * 50), std::round(u(rng) * 50), 1.0};
    raw[t] += 10.0;
    scores.push_back(renormalize(raw));
  }
  double auc_diff = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    std::vector<double> s;
    std::vector<bool> pos;
    for (std::size_t i = 0; i < t1k.size(); ++i) {
      s.push_back(scores[i][r]);
      pos.push_back(t1k[i] == r);
    }
    auc_diff = std::max(auc_diff, std::abs(roc_curve(t1k, scores, r).auc - testing::mann_whitney_auc(s, pos)));
  }

  nn::NetworkShape shape;
  shape.embed_dim = 8;
  shape.hidden = 8;
  shape.layers = 2;
  const nn::TokenBatch batch{std::vector<int>(kWindow, 3), std::vector<int>(kWindow, 0)};
  const std::vector<std::size_t> labels{1, 3};
  const double ln4_diff = std::abs(nn::loss(nn::NetworkParams::zeros(shape), batch, labels) - std::log(4.0));

  return {metric_diff <= 1e-12 && auc_diff <= 1e-9 && ln4_diff <= 1e-12,
          fmt::format("10k pairs max metric diff {:.2e}, 1k-record AUC vs Mann-Whitney {:.2e}, ln 4 diff {:.2e}",
                      metric_diff, auc_diff, ln4_diff)};
}

// --- sampling ----------------------------------------------------------------------

Outcome sampling() {
  const std::size_t n = 200000;
  const std::size_t pool_sizes[] = {30000, 50000, 80000, 260000};
  std::vector<PersonRecord> pool;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t i = 0; i < pool_sizes[r]; ++i) pool.push_back({std::to_string(pool.size()), "ann", "lee", "g", r});
  }
  const auto sample = representative_sample(pool, n, kNationalShares, 7);
  std::vector<std::size_t> per(4, 0);
  for (const auto& rec : sample) ++per[*rec.race];
  double share_sum = 0.0;
  for (double s : kNationalShares) share_sum += s;
  double worst = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    worst = std::max(worst, std::abs(double(per[r]) / double(n) - kNationalShares[r] / share_sum));
  }
  const bool pass = sample.size() == n && worst <= 1.0 / double(n) &&
                    per == std::vector<std::size_t>{12203, 26060, 39090, 122647};
  return {pass, fmt::format("n={}, per race ({}, {}, {}, {}), max |proportion - target| {:.2e} (1/n = {:.1e})", n,
                            per[0], per[1], per[2], per[3], worst, 1.0 / double(n))};
}

// --- ensemble coverage -----------------------------------------------------------------

RunConfig small_run_config() {
  return parse_run_config(R"({"seed": 4, "network": {"embed_dim": 8, "hidden": 8, "layers": 1},
    "training": {"epochs": 2, "batch_size": 64}})", "acceptance");
}

Outcome ensemble_coverage() {
  const auto dir = testing::scratch_dir("acceptance_ensemble");
  const RaceSet races;
  const auto cfg = small_run_config();
  const auto voters = (dir / "voters.csv").string();
  csv::write_text_file(voters, format_person_records(testing::synthetic_voters(1, 4000), races));

  // held-out records with deliberate holes in each member's coverage
  auto held = testing::synthetic_voters(2, 2000);
  for (std::size_t i = 0; i < held.size(); ++i) {
    if (i % 7 == 0) held[i].first = "qq" + testing::token("", i);
    if (i % 11 == 0) held[i].last = "xx" + testing::token("", i);
    if (i % 29 == 0) held[i].geo = "99999";
  }
  const auto input = (dir / "held.csv").string();
  csv::write_text_file(input, format_person_records(held, races));

  cmd_build_tables({voters, std::nullopt, std::nullopt, (dir / "tables").string()}, cfg);
  cmd_train({voters, (dir / "model.bin").string(), (dir / "log.csv").string()}, cfg);
  const auto pred_path = (dir / "pred.csv").string();
  cmd_predict({input, {"first_last_zcta", "bisg", "bifsg", "ensemble"}, (dir / "tables").string(),
               (dir / "model.bin").string(), pred_path},
              cfg);

  std::map<std::string, std::vector<std::optional<ProbVector>>> by_model;
  for (const auto& row : read_predictions(pred_path, races)) by_model[row.model].push_back(row.probs);
  const std::vector<std::string> members{"first_last_zcta", "bisg", "bifsg"};
  const auto& ens = by_model["ensemble"];

  std::size_t union_mismatch = 0, covered = 0;
  std::vector<std::size_t> member_covered(3, 0);
  std::vector<std::size_t> all_covered;
  for (std::size_t i = 0; i < held.size(); ++i) {
    bool any = false, all = true;
    for (std::size_t m = 0; m < 3; ++m) {
      const bool c = by_model[members[m]][i].has_value();
      member_covered[m] += c;
      any = any || c;
      all = all && c;
    }
    if (any != ens[i].has_value()) ++union_mismatch;
    covered += ens[i].has_value();
    if (all) all_covered.push_back(i);
  }

  // F1 on the all-covered subset: the library figure against a recomputation
  // of the ensemble mean and its confusion counts from the member files.
  std::vector<std::size_t> truth;
  std::vector<std::optional<std::size_t>> ens_pred, recomputed;
  std::map<std::string, std::vector<std::optional<std::size_t>>> member_pred;
  for (auto i : all_covered) {
    truth.push_back(*held[i].race);
    ens_pred.push_back(argmax_index(*ens[i]));
    std::vector<double> mean(4, 0.0);
    for (const auto& m : members) {
      for (std::size_t r = 0; r < 4; ++r) mean[r] += (*by_model[m][i])[r] / 3.0;
      member_pred[m].push_back(argmax_index(*by_model[m][i]));
    }
    recomputed.push_back(argmax_index(renormalize(mean)));
  }
  const auto report = class_metrics(truth, ens_pred, races);
  double f1_diff = 0.0;
  std::size_t inside_range = 0;
  for (std::size_t r = 0; r < 4; ++r) {
    const auto c = testing::brute_confusion(truth, recomputed, r);
    const double p = c.tp + c.fp ? double(c.tp) / double(c.tp + c.fp) : 0.0;
    const double rc = c.tp + c.fn ? double(c.tp) / double(c.tp + c.fn) : 0.0;
    const double f1 = p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
    f1_diff = std::max(f1_diff, std::abs(report.per_race[r].f1 - f1));
    double lo = 1.0, hi = 0.0;
    for (const auto& m : members) {
      const double mf = class_metrics(truth, member_pred[m], races).per_race[r].f1;
      lo = std::min(lo, mf);
      hi = std::max(hi, mf);
    }
    inside_range += report.per_race[r].f1 >= lo && report.per_race[r].f1 <= hi;
  }
  const std::size_t max_member = *std::max_element(member_covered.begin(), member_covered.end());
  const bool pass = union_mismatch == 0 && covered >= max_member && f1_diff <= 1e-12 && !all_covered.empty() &&
                    member_covered[2] < held.size();
  return {pass, fmt::format("{} records, member coverage ({}, {}, {}), ensemble {} = union ({} mismatches); "
                            "all-covered subset {} records, F1 vs recomputation {:.2e}, {}/4 races inside member range",
                            held.size(), member_covered[0], member_covered[1], member_covered[2], covered,
                            union_mismatch, all_covered.size(), f1_diff, inside_range)};
}

// --- determinism -------------------------------------------------------------------

int run_cli(const std::string& args) {
#ifdef NAMEPROXY_CLI
  const auto cmd = fmt::format("\"{}\" {} > /dev/null 2>&1", NAMEPROXY_CLI, args);
  return std::system(cmd.c_str());
#else
  (void)args;
  return -1;
#endif
}

Outcome determinism() {
  const auto dir = testing::scratch_dir("acceptance_determinism");
  const auto voters = (dir / "voters.csv").string();
  csv::write_text_file(voters, format_person_records(testing::synthetic_voters(3, 3000), RaceSet{}));
  const auto config = (dir / "config.json").string();
  csv::write_text_file(config, R"({"seed": 9, "network": {"embed_dim": 8, "hidden": 8, "layers": 1},
  "training": {"epochs": 2, "batch_size": 64}, "sample": {"size": 200}, "evaluation": {"sample_size": 1000}})");
  const auto census = (dir / "census.csv").string();
  csv::write_text_file(census, "name,count,p_asian,p_black,p_hispanic,p_white\nGARCIA,5000,0.01,0.01,0.9,0.08\n");

  std::string failed;
  auto run = [&](const std::string& tag) -> std::optional<fs::path> {
    const auto d = dir / tag;
    const auto c = fmt::format("--config \"{}\" ", config);
    const std::vector<std::string> commands{
        c + fmt::format("build-tables --voter \"{}\" --external-surnames \"{}\" --out \"{}\"", voters, census,
                        (d / "tables").string()),
        c + fmt::format("train --voter \"{}\" --params-out \"{}\" --log-out \"{}\"", voters,
                        (d / "model.bin").string(), (d / "log.csv").string()),
        c + fmt::format("predict --input \"{}\" --models first_last,first_last_zcta,bisg,bifsg,ensemble "
                        "--tables \"{}\" --params \"{}\" --out \"{}\"",
                        voters, (d / "tables").string(), (d / "model.bin").string(), (d / "pred.csv").string()),
        c + fmt::format("evaluate --predictions \"{}\" --truth \"{}\" --out \"{}\"", (d / "pred.csv").string(), voters,
                        (d / "report").string()),
        c + fmt::format("sample --input \"{}\" --out \"{}\"", voters, (d / "sample.csv").string())};
    for (const auto& cmd : commands) {
      if (run_cli(cmd) != 0) {
        failed = cmd;
        return std::nullopt;
      }
    }
    return d;
  };
  const auto a = run("a");
  const auto b = run("b");
  if (!a || !b) return {false, fmt::format("nonzero exit from: nameproxy {}", failed)};
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(*a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), *a);
    ++files;
    if (!fs::exists(*b / rel) || csv::read_text_file(entry.path().string()) != csv::read_text_file((*b / rel).string())) {
      ++differing;
    }
  }
  return {differing == 0 && files >= 15,
          fmt::format("5 CLI commands run twice, {} output files compared, {} differ", files, differing)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"bayes_oracle_equivalence", 60, bayes_oracle},
      {"neutral_factor_identities", 0, neutral_factors},
      {"gradient_check", 120, gradient_check},
      {"learnability", 300, learnability},
      {"encoding_fidelity", 0, encoding_fidelity},
      {"suppression_matrix", 0, suppression_matrix},
      {"metrics_oracle", 0, metrics_oracle},
      {"sampling", 0, sampling},
      {"ensemble_coverage", 0, ensemble_coverage},
      {"determinism", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt::format("{:.1f}s", secs);
    if (c.time_limit_s > 0) {
      timing += fmt::format(" of {:.0f}s", c.time_limit_s);
      if (secs >= c.time_limit_s) {
        out.pass = false;
        out.detail += "; over time limit";
      }
    }
    std::printf("%s %s: %s [%s]\n", out.pass ? "PASS" : "FAIL", c.name.c_str(), out.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
