#include "cadence/eval.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

#include <nlohmann/json.hpp>

#include "cadence/error.hpp"
#include "cadence/fileutil.hpp"

namespace cadence {

EvalReport roc_auc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.empty()) throw Error(ErrorCode::EmptyScores, "no scores to evaluate");
  if (scores.size() != positive.size())
    throw Error(ErrorCode::DimensionMismatch, "score and label counts differ");

  EvalReport r;
  r.n_positive = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  r.n_negative = scores.size() - r.n_positive;
  if (r.n_positive == 0) throw Error(ErrorCode::NoPositives, "AUC is undefined without positive boundaries");
  if (r.n_negative == 0) throw Error(ErrorCode::NoNegatives, "AUC is undefined without negative boundaries");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const double P = static_cast<double>(r.n_positive);
  const double N = static_cast<double>(r.n_negative);
  std::size_t tp = 0, fp = 0;
  r.roc.emplace_back(0.0, 0.0);
  for (std::size_t i = 0; i < order.size();) {
    const double level = scores[order[i]];
    while (i < order.size() && scores[order[i]] == level) {
      positive[order[i]] ? ++tp : ++fp;
      ++i;
    }
    r.roc.emplace_back(static_cast<double>(fp) / N, static_cast<double>(tp) / P);
  }
  double area = 0.0;
  for (std::size_t k = 1; k < r.roc.size(); ++k)
    area += (r.roc[k].first - r.roc[k - 1].first) * (r.roc[k].second + r.roc[k - 1].second) / 2.0;
  r.auc = std::clamp(area, 0.0, 1.0);
  return r;
}

std::vector<bool> label_boundaries(const ScoreSeries& scores, const std::vector<std::size_t>& change_points,
                                   std::size_t tolerance) {
  std::vector<bool> labels(scores.scores.size(), false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t t = scores.boundary(i);
    labels[i] = std::any_of(change_points.begin(), change_points.end(), [&](std::size_t cp) {
      return (t > cp ? t - cp : cp - t) <= tolerance;
    });
  }
  return labels;
}

EvalReport roc_auc(const ScoreSeries& scores, const std::vector<std::size_t>& change_points,
                   std::size_t tolerance) {
  const auto labels = label_boundaries(scores, change_points, tolerance);
  // std::vector<bool> is bit-packed; copy into contiguous storage for the span
  const std::unique_ptr<bool[]> flags(new bool[labels.size()]);
  std::copy(labels.begin(), labels.end(), flags.get());
  const auto& ranked = scores.smoothed ? *scores.smoothed : scores.scores;
  EvalReport r = roc_auc(ranked, std::span<const bool>(flags.get(), labels.size()));
  r.tolerance = tolerance;
  r.series_name = scores.series_name;
  return r;
}

std::string eval_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["series"] = report.series_name;
  j["auc"] = report.auc;
  j["tolerance"] = report.tolerance;
  j["n_positive"] = report.n_positive;
  j["n_negative"] = report.n_negative;
  j["config_hash"] = report.config_hash;
  auto roc = nlohmann::ordered_json::array();
  for (auto [f, t] : report.roc) roc.push_back({f, t});
  j["roc"] = std::move(roc);
  return j.dump(2) + "\n";
}

void write_eval_json(const EvalReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, eval_json(report));
}

double DetectionScore::precision() const {
  const auto d = true_positive + false_positive;
  return d ? static_cast<double>(true_positive) / static_cast<double>(d) : 0.0;
}

double DetectionScore::recall() const {
  const auto d = true_positive + false_negative;
  return d ? static_cast<double>(true_positive) / static_cast<double>(d) : 0.0;
}

double DetectionScore::f1() const {
  if (true_positive + false_positive + false_negative == 0) return 1.0;
  const double p = precision(), r = recall();
  return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
}

DetectionScore match_change_points(const std::vector<std::size_t>& detected, const std::vector<std::size_t>& truth,
                                   std::size_t tolerance) {
  // Closest pairs first so a near hit is never stolen by a farther one.
  struct Cand {
    std::size_t dist, d, t;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < detected.size(); ++i)
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const std::size_t dist = detected[i] > truth[j] ? detected[i] - truth[j] : truth[j] - detected[i];
      if (dist <= tolerance) cands.push_back({dist, i, j});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
  std::vector<bool> used_d(detected.size()), used_t(truth.size());
  DetectionScore s;
  for (const auto& c : cands) {
    if (used_d[c.d] || used_t[c.t]) continue;
    used_d[c.d] = used_t[c.t] = true;
    ++s.true_positive;
  }
  s.false_positive = detected.size() - s.true_positive;
  s.false_negative = truth.size() - s.true_positive;
  return s;
}

}  // namespace cadence
