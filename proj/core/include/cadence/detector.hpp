#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cadence/autoencoder.hpp"
#include "cadence/dataio.hpp"
#include "cadence/kernels.hpp"
#include "cadence/windowing.hpp"

namespace cadence {

/// scores[i] belongs to boundary t = start_t + i.
struct ScoreSeries {
  std::size_t start_t = 0;
  std::size_t series_length = 0;
  std::vector<double> scores;
  std::optional<std::vector<double>> smoothed;
  std::string series_name;

  std::size_t boundary(std::size_t i) const { return start_t + i; }
};

struct Detection {
  std::vector<std::size_t> change_points;
  double threshold_value = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> segments;  // half-open, cover [0, T)
};

struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  Matrix values;
};

/// Latent-space scores: encode both windows of every boundary and take
/// mmd_pair under the model's frozen bandwidth. Only kernel.family is read.
ScoreSeries score_series(const AutoencoderModel& model, const TimeSeries& ts, const KernelSpec& kernel);

/// Data-space scores for the ablation: mmd_pair on raw flattened windows. A
/// median directive is resolved over the series' own windows.
ScoreSeries score_dataspace(const TimeSeries& ts, std::size_t window, const KernelSpec& kernel,
                            std::uint64_t seed = 0);

/// Per-row mmd_pair between encoded left and right windows (kernel must be resolved).
std::vector<double> score_pairs(const AutoencoderModel& model, const PairBatch& pairs, const KernelSpec& kernel);

/// Centered moving average, window clipped and renormalized at the edges.
/// Throws InvalidWidth for an even or zero width.
ScoreSeries smooth(const ScoreSeries& scores, std::size_t width);

/// Odd smoothing width derived from the window length (w, or w + 1 when w is even).
std::size_t default_smooth_width(std::size_t window);

/// Local maxima of the smoothed scores at or above ratio * max, with
/// non-maximum suppression at min_separation. Uses the raw scores when no
/// smoothed series is attached.
Detection detect(const ScoreSeries& scores, double ratio = 0.4, std::optional<std::size_t> min_separation = {});

std::vector<std::pair<std::size_t, std::size_t>> segments_from(const std::vector<std::size_t>& change_points,
                                                               std::size_t length);

std::vector<Segment> segment(const TimeSeries& ts, const Detection& detection);

/// "t,score,smoothed" with one row per boundary; smoothed is empty when absent.
void write_scores_csv(const ScoreSeries& scores, const std::filesystem::path& path);
ScoreSeries read_scores_csv(const std::filesystem::path& path);

std::string detection_json(const Detection& detection, const std::string& series_name);
void write_detection_json(const Detection& detection, const std::string& series_name,
                          const std::filesystem::path& path);

}  // namespace cadence
