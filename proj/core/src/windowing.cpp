#include "cadence/windowing.hpp"

#include <string>

#include "cadence/error.hpp"

namespace cadence {

namespace {

void check_length(const TimeSeries& ts, std::size_t window) {
  if (window == 0) throw Error(ErrorCode::InvalidConfig, "window must be at least 1");
  if (ts.length() < 2 * window)
    throw Error(ErrorCode::SeriesTooShort, "series '" + ts.name + "' has " + std::to_string(ts.length()) +
                                               " steps; window " + std::to_string(window) + " needs " +
                                               std::to_string(2 * window));
}

Vector flatten_rows(const Matrix& values, std::size_t begin, std::size_t window) {
  const auto c = values.cols();
  Vector out(static_cast<Eigen::Index>(window) * c);
  // row-major storage makes the block contiguous in time-major order
  const double* src = values.data() + static_cast<Eigen::Index>(begin) * c;
  std::copy(src, src + out.size(), out.data());
  return out;
}

}  // namespace

std::vector<SegmentPair> make_pairs(const TimeSeries& ts, std::size_t window) {
  check_length(ts, window);
  const std::size_t T = ts.length();
  std::vector<SegmentPair> pairs;
  pairs.reserve(T - 2 * window + 1);
  for (std::size_t t = window; t + window <= T; ++t)
    pairs.push_back({t, flatten_rows(ts.values, t - window, window), flatten_rows(ts.values, t, window)});
  return pairs;
}

Vector flatten_window(const Matrix& window) {
  return flatten_rows(window, 0, static_cast<std::size_t>(window.rows()));
}

Matrix unflatten_window(const Vector& flat, std::size_t channels) {
  if (channels == 0 || flat.size() % static_cast<Eigen::Index>(channels) != 0)
    throw Error(ErrorCode::DimensionMismatch, "flat length is not a multiple of the channel count");
  const auto c = static_cast<Eigen::Index>(channels);
  Matrix out(flat.size() / c, c);
  std::copy(flat.data(), flat.data() + flat.size(), out.data());
  return out;
}

Matrix sliding_windows(const TimeSeries& ts, std::size_t window) {
  check_length(ts, window);
  const auto c = ts.values.cols();
  const auto n = static_cast<Eigen::Index>(ts.length() - window + 1);
  const auto D = static_cast<Eigen::Index>(window) * c;
  Matrix out(n, D);
  for (Eigen::Index s = 0; s < n; ++s) {
    const double* src = ts.values.data() + s * c;
    std::copy(src, src + D, out.data() + s * D);
  }
  return out;
}

PairBatch sample_minibatch(std::span<const SegmentPair> pairs, std::size_t batch_size, Rng& rng) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyPairSet, "cannot sample from an empty pair set");
  if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch size must be at least 1");
  const auto D = pairs.front().left.size();
  PairBatch batch;
  batch.left.resize(static_cast<Eigen::Index>(batch_size), D);
  batch.right.resize(static_cast<Eigen::Index>(batch_size), D);
  batch.boundaries.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto& p = pairs[rng.uniform_index(pairs.size())];
    batch.left.row(static_cast<Eigen::Index>(i)) = p.left.transpose();
    batch.right.row(static_cast<Eigen::Index>(i)) = p.right.transpose();
    batch.boundaries.push_back(p.t);
  }
  return batch;
}

PairBatch stack_pairs(std::span<const SegmentPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyPairSet, "cannot stack an empty pair set");
  const auto D = pairs.front().left.size();
  PairBatch batch;
  batch.left.resize(static_cast<Eigen::Index>(pairs.size()), D);
  batch.right.resize(static_cast<Eigen::Index>(pairs.size()), D);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    batch.left.row(static_cast<Eigen::Index>(i)) = pairs[i].left.transpose();
    batch.right.row(static_cast<Eigen::Index>(i)) = pairs[i].right.transpose();
    batch.boundaries.push_back(pairs[i].t);
  }
  return batch;
}

}  // namespace cadence
