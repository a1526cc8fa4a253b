#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cadence/dataio.hpp"
#include "cadence/rng.hpp"
#include "cadence/types.hpp"

namespace cadence {

/// Past window values[t-w, t) and current window values[t, t+w), each
/// flattened time-major: (t0,ch0), (t0,ch1), ..., (t_{w-1},ch_{c-1}).
struct SegmentPair {
  std::size_t t = 0;
  Vector left;
  Vector right;
};

struct PairBatch {
  Matrix left;   // B x (w*c)
  Matrix right;  // B x (w*c)
  std::vector<std::size_t> boundaries;

  std::size_t size() const { return boundaries.size(); }
};

/// One pair per boundary t in [w, T-w], ascending. Throws SeriesTooShort if T < 2w.
std::vector<SegmentPair> make_pairs(const TimeSeries& ts, std::size_t window);

Vector flatten_window(const Matrix& window);
Matrix unflatten_window(const Vector& flat, std::size_t channels);

/// All length-w windows of the series as rows: row s holds values[s, s+w).
/// Pair at boundary t uses rows t-w (left) and t (right).
Matrix sliding_windows(const TimeSeries& ts, std::size_t window);

/// B pairs drawn uniformly with replacement.
PairBatch sample_minibatch(std::span<const SegmentPair> pairs, std::size_t batch_size, Rng& rng);

/// Stacks the given pairs in order (no sampling).
PairBatch stack_pairs(std::span<const SegmentPair> pairs);

}  // namespace cadence
