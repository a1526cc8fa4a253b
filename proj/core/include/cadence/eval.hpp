#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cadence/detector.hpp"

namespace cadence {

struct EvalReport {
  double auc = 0.0;
  std::vector<std::pair<double, double>> roc;  // (fpr, tpr), (0,0) .. (1,1)
  std::size_t tolerance = 0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::string series_name;
  std::string config_hash;
};

/// ROC over every distinct score threshold (tied scores form one step) and
/// the trapezoidal area under it.
EvalReport roc_auc(std::span<const double> scores, std::span<const bool> positive);

/// Boundary t is positive iff |t - cp| <= tolerance for some annotated cp.
/// Ranks by the smoothed column when present, the raw scores otherwise.
EvalReport roc_auc(const ScoreSeries& scores, const std::vector<std::size_t>& change_points,
                   std::size_t tolerance = 25);

std::vector<bool> label_boundaries(const ScoreSeries& scores, const std::vector<std::size_t>& change_points,
                                   std::size_t tolerance);

std::string eval_json(const EvalReport& report);
void write_eval_json(const EvalReport& report, const std::filesystem::path& path);

/// Greedy one-to-one matching of detected to true change points within
/// +-tolerance. Used to score detect() output on synthetic data.
struct DetectionScore {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  double precision() const;
  double recall() const;
  double f1() const;  // 1 when there is nothing to detect and nothing was detected
};

DetectionScore match_change_points(const std::vector<std::size_t>& detected, const std::vector<std::size_t>& truth,
                                   std::size_t tolerance);

}  // namespace cadence
