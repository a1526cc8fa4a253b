#include "cadence/detector.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cadence/error.hpp"
#include "cadence/fileutil.hpp"

namespace cadence {

namespace {

std::vector<double> rowwise_pair_scores(const Matrix& left, const Matrix& right, const KernelSpec& kernel) {
  std::vector<double> out(static_cast<std::size_t>(left.rows()));
  for (Eigen::Index i = 0; i < left.rows(); ++i)
    out[static_cast<std::size_t>(i)] = mmd_pair(kernel, row_span(left, i), row_span(right, i)).value;
  return out;
}

// Boundary t pairs window row t-w with window row t.
std::vector<double> scores_from_windows(const Matrix& windows, std::size_t w, const KernelSpec& kernel) {
  const auto n_windows = static_cast<std::size_t>(windows.rows());
  const std::size_t n = n_windows - w;  // == T - 2w + 1
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = mmd_pair(kernel, row_span(windows, static_cast<Eigen::Index>(i)),
                      row_span(windows, static_cast<Eigen::Index>(i + w)))
                 .value;
  return out;
}

}  // namespace

ScoreSeries score_series(const AutoencoderModel& model, const TimeSeries& ts, const KernelSpec& kernel) {
  if (!model.is_trained()) throw Error(ErrorCode::UntrainedModel, "model has no frozen bandwidth; train it first");
  if (ts.channels() != model.meta.channels)
    throw Error(ErrorCode::ChannelMismatch, "series '" + ts.name + "' has " + std::to_string(ts.channels()) +
                                                " channels, model was trained on " +
                                                std::to_string(model.meta.channels));
  const std::size_t w = model.meta.window;
  const Matrix codes = encode(model, sliding_windows(ts, w));
  ScoreSeries s;
  s.start_t = w;
  s.series_length = ts.length();
  s.series_name = ts.name;
  s.scores = scores_from_windows(codes, w, KernelSpec::fixed(kernel.family, *model.frozen_gamma));
  return s;
}

ScoreSeries score_dataspace(const TimeSeries& ts, std::size_t window, const KernelSpec& kernel,
                            std::uint64_t seed) {
  const Matrix windows = sliding_windows(ts, window);
  KernelSpec resolved = kernel;
  if (kernel.uses_median()) {
    try {
      resolved = resolve_bandwidth(kernel, windows, seed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegeneratePointSet) throw;
      resolved = kernel.with_gamma(1.0);  // identical windows score zero under any bandwidth
    }
  }
  ScoreSeries s;
  s.start_t = window;
  s.series_length = ts.length();
  s.series_name = ts.name;
  s.scores = scores_from_windows(windows, window, resolved);
  return s;
}

std::vector<double> score_pairs(const AutoencoderModel& model, const PairBatch& pairs, const KernelSpec& kernel) {
  return rowwise_pair_scores(encode(model, pairs.left), encode(model, pairs.right), kernel);
}

ScoreSeries smooth(const ScoreSeries& scores, std::size_t width) {
  if (width == 0 || width % 2 == 0)
    throw Error(ErrorCode::InvalidWidth, "smoothing width must be odd and positive, got " + std::to_string(width));
  const auto& x = scores.scores;
  const std::size_t n = x.size();
  const std::size_t half = width / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += x[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  ScoreSeries s = scores;
  s.smoothed = std::move(out);
  return s;
}

std::size_t default_smooth_width(std::size_t window) {
  if (window == 0) return 1;
  return window % 2 == 1 ? window : window + 1;
}

Detection detect(const ScoreSeries& scores, double ratio, std::optional<std::size_t> min_separation) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw Error(ErrorCode::InvalidConfig, "ratio must lie in (0, 1]");
  const auto& s = scores.smoothed ? *scores.smoothed : scores.scores;
  if (s.empty()) throw Error(ErrorCode::EmptyScores, "no scores to detect on");
  const std::size_t sep = min_separation.value_or(scores.start_t);
  const std::size_t T = scores.series_length ? scores.series_length : s.size() + 2 * scores.start_t - 1;

  Detection d;
  const double peak = *std::max_element(s.begin(), s.end());
  d.threshold_value = ratio * peak;
  if (!(peak > 0.0)) {
    d.segments = segments_from({}, T);
    return d;
  }

  // Plateaus count once, at their earliest index; a plateau needs at least
  // one neighbour and must be strictly above every neighbour it has.
  std::vector<std::size_t> candidates;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    const bool has_left = i > 0;
    const bool has_right = j + 1 < n;
    if ((has_left || has_right) && (!has_left || s[i - 1] < s[i]) && (!has_right || s[j + 1] < s[i]) &&
        s[i] >= d.threshold_value)
      candidates.push_back(i);
    i = j + 1;
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  std::vector<std::size_t> kept;
  for (auto c : candidates) {
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return (c > k ? c - k : k - c) >= sep;
    });
    if (clear) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  for (auto k : kept) d.change_points.push_back(scores.boundary(k));
  d.segments = segments_from(d.change_points, T);
  return d;
}

std::vector<std::pair<std::size_t, std::size_t>> segments_from(const std::vector<std::size_t>& change_points,
                                                               std::size_t length) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (auto cp : change_points) {
    if (cp <= start || cp >= length) continue;
    out.emplace_back(start, cp);
    start = cp;
  }
  out.emplace_back(start, length);
  return out;
}

std::vector<Segment> segment(const TimeSeries& ts, const Detection& detection) {
  std::vector<Segment> out;
  for (auto [a, b] : segments_from(detection.change_points, ts.length()))
    out.push_back({a, b, ts.values.middleRows(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b - a))});
  return out;
}

void write_scores_csv(const ScoreSeries& scores, const std::filesystem::path& path) {
  std::string out = "t,score,smoothed\n";
  char buf[96];
  for (std::size_t i = 0; i < scores.scores.size(); ++i) {
    if (scores.smoothed)
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", scores.boundary(i), scores.scores[i], (*scores.smoothed)[i]);
    else
      std::snprintf(buf, sizeof buf, "%zu,%.17g,\n", scores.boundary(i), scores.scores[i]);
    out += buf;
  }
  write_file_atomic(path, out);
}

ScoreSeries read_scores_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  ScoreSeries s;
  s.series_name = path.stem().string();
  std::vector<double> smoothed;
  bool any_smoothed = false;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 || line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos)
      throw Error(ErrorCode::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    std::size_t t = 0;
    double score = 0.0, sm = 0.0;
    const auto f0 = line.substr(0, c1), f1 = line.substr(c1 + 1, c2 - c1 - 1), f2 = line.substr(c2 + 1);
    const bool ok = std::from_chars(f0.data(), f0.data() + f0.size(), t).ec == std::errc() &&
                    std::from_chars(f1.data(), f1.data() + f1.size(), score).ec == std::errc() &&
                    (f2.empty() || std::from_chars(f2.data(), f2.data() + f2.size(), sm).ec == std::errc());
    if (!ok) throw Error(ErrorCode::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": unparsable row");
    if (s.scores.empty()) s.start_t = t;
    else if (t != s.boundary(s.scores.size()))
      throw Error(ErrorCode::MalformedRow, path.string() + ":" + std::to_string(line_no) + ": boundaries must be consecutive");
    s.scores.push_back(score);
    smoothed.push_back(sm);
    any_smoothed = any_smoothed || !f2.empty();
  }
  if (s.scores.empty()) throw Error(ErrorCode::EmptyScores, path.string() + " holds no scores");
  if (any_smoothed) s.smoothed = std::move(smoothed);
  s.series_length = s.scores.size() + 2 * s.start_t - 1;
  return s;
}

std::string detection_json(const Detection& detection, const std::string& series_name) {
  nlohmann::ordered_json j;
  j["series"] = series_name;
  j["threshold"] = detection.threshold_value;
  j["change_points"] = detection.change_points;
  auto segs = nlohmann::ordered_json::array();
  for (auto [a, b] : detection.segments) segs.push_back({a, b});
  j["segments"] = std::move(segs);
  return j.dump(2) + "\n";
}

void write_detection_json(const Detection& detection, const std::string& series_name,
                          const std::filesystem::path& path) {
  write_file_atomic(path, detection_json(detection, series_name));
}

}  // namespace cadence
