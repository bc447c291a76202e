#include "nameproxy/report.hpp"

#include <filesystem>

#include <fmt/format.h>

#include "nameproxy/csv.hpp"

namespace nameproxy {
namespace {

std::string file_token(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

}  // namespace

std::string format_metrics_table(const ClassReport& report) {
  std::string out = "race,accuracy,precision,recall,f1,coverage,support\n";
  for (std::size_t r = 0; r < report.per_race.size(); ++r) {
    const auto& m = report.per_race[r];
    out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", csv::escape(report.races.label(r)), m.accuracy,
                       m.precision, m.recall, m.f1, m.coverage, m.support);
  }
  return out;
}

std::string format_roc_points(const std::string& model, const std::string& race, const RocCurve& curve) {
  std::string out = "model,race,fpr,tpr\n";
  for (const auto& p : curve.points) {
    out += fmt::format("{},{},{:.6f},{:.6f}\n", csv::escape(model), csv::escape(race), p.fpr, p.tpr);
  }
  return out;
}

std::string format_f1_comparison(std::span<const ModelEvaluation> models) {
  std::string out = "model,race,f1\n";
  for (const auto& m : models) {
    for (std::size_t r = 0; r < m.report.per_race.size(); ++r) {
      out += fmt::format("{},{},{:.6f}\n", csv::escape(m.model), csv::escape(m.report.races.label(r)),
                         m.report.per_race[r].f1);
    }
  }
  return out;
}

std::string format_auc_table(std::span<const ModelEvaluation> models) {
  std::string out = "model,race,auc\n";
  for (const auto& m : models) {
    for (std::size_t r = 0; r < m.report.races.size(); ++r) {
      const bool defined = r < m.roc.size() && m.roc[r].has_value();
      out += fmt::format("{},{},{}\n", csv::escape(m.model), csv::escape(m.report.races.label(r)),
                         defined ? fmt::format("{:.6f}", m.roc[r]->auc) : std::string());
    }
  }
  return out;
}

std::vector<std::string> emit_report(std::span<const ModelEvaluation> models, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::vector<std::string> written;
  auto write = [&](const std::filesystem::path& path, const std::string& body) {
    csv::write_text_file(path.string(), body);
    written.push_back(path.string());
  };
  for (const auto& m : models) {
    write(root / fmt::format("metrics_{}.csv", file_token(m.model)), format_metrics_table(m.report));
    for (std::size_t r = 0; r < m.roc.size(); ++r) {
      if (!m.roc[r]) continue;
      const auto& race = m.report.races.label(r);
      write(root / fmt::format("roc_{}_{}.csv", file_token(m.model), file_token(race)),
            format_roc_points(m.model, race, *m.roc[r]));
    }
  }
  write(root / "f1_comparison.csv", format_f1_comparison(models));
  write(root / "auc.csv", format_auc_table(models));
  return written;
}

}  // namespace nameproxy
