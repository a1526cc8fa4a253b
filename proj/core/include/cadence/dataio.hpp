#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cadence/types.hpp"

namespace cadence {

/// A T x c block of observations plus annotated change points.
///
/// Invariants (checked by validate()): T >= 1, c >= 1, finite values,
/// channel_names.size() == c, change_points strictly increasing in [0, T).
struct TimeSeries {
  Matrix values;
  std::vector<std::string> channel_names;
  std::vector<std::size_t> change_points;
  std::string name;

  std::size_t length() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t channels() const { return static_cast<std::size_t>(values.cols()); }

  void validate() const;
};

/// Rows [begin, end) with change points re-indexed to the slice.
TimeSeries slice(const TimeSeries& ts, std::size_t begin, std::size_t end);

struct SplitSpec {
  double train_frac = 0.6;
  double val_frac = 0.2;
  double test_frac = 0.2;

  void validate() const;
};

struct ChronoSplit {
  TimeSeries train;
  TimeSeries val;
  TimeSeries test;
  std::size_t val_begin = 0;
  std::size_t test_begin = 0;
};

/// Reads a header + numeric-row CSV and an optional one-integer-per-line label file.
TimeSeries load_csv(const std::filesystem::path& path,
                    const std::optional<std::filesystem::path>& label_path = std::nullopt);

std::vector<std::size_t> load_labels(const std::filesystem::path& path, std::size_t series_length);

/// Values are rendered with 17 significant digits, which round-trips binary64.
void write_csv(const TimeSeries& ts, const std::filesystem::path& path);
void write_labels(const std::vector<std::size_t>& change_points, const std::filesystem::path& path);

/// Per-channel min-max scaling into [0, 1]; constant channels map to zeros.
TimeSeries normalize(const TimeSeries& ts);

/// Chronological train/val/test split at floor(T*train) and floor(T*(train+val)).
/// Throws SplitTooSmall when any part is shorter than min_length.
ChronoSplit split_chrono(const TimeSeries& ts, const SplitSpec& spec = {},
                         std::size_t min_length = 1);

/// One series of a dataset as listed in a manifest file.
struct DatasetEntry {
  std::string dataset;  // grouping key; defaults to name
  std::string name;
  std::filesystem::path data;
  std::optional<std::filesystem::path> labels;
};

/// Accepts a single {"data", "labels", "name"} object or an array of them.
/// Relative paths resolve against the manifest's directory.
std::vector<DatasetEntry> load_manifest(const std::filesystem::path& path);

TimeSeries load_entry(const DatasetEntry& entry);

}  // namespace cadence
