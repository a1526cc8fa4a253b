#include "cadence/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cadence/error.hpp"
#include "cadence/fileutil.hpp"

namespace cadence {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  // trailing blank lines are formatting, not rows
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(pos)));
      break;
    }
    fields.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return fields;
}

bool parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

}  // namespace

void TimeSeries::validate() const {
  if (values.rows() < 1) throw Error(ErrorCode::EmptySeries, "series '" + name + "' has no rows");
  if (values.cols() < 1) throw Error(ErrorCode::EmptySeries, "series '" + name + "' has no channels");
  if (!values.allFinite()) throw Error(ErrorCode::MalformedRow, "series '" + name + "' has non-finite values");
  if (!channel_names.empty() && channel_names.size() != channels())
    throw Error(ErrorCode::ShapeMismatch, "channel name count does not match column count");
  for (std::size_t i = 0; i < change_points.size(); ++i) {
    if (change_points[i] >= length())
      throw Error(ErrorCode::LabelOutOfRange, "change point " + std::to_string(change_points[i]) +
                                                  " outside [0, " + std::to_string(length()) + ")");
    if (i > 0 && change_points[i] <= change_points[i - 1])
      throw Error(ErrorCode::LabelOutOfRange, "change points must be strictly increasing");
  }
}

TimeSeries slice(const TimeSeries& ts, std::size_t begin, std::size_t end) {
  TimeSeries out;
  out.name = ts.name;
  out.channel_names = ts.channel_names;
  out.values = ts.values.middleRows(static_cast<Eigen::Index>(begin),
                                    static_cast<Eigen::Index>(end - begin));
  for (auto cp : ts.change_points)
    if (cp >= begin && cp < end) out.change_points.push_back(cp - begin);
  return out;
}

void SplitSpec::validate() const {
  if (!(train_frac > 0 && val_frac > 0 && test_frac > 0))
    throw Error(ErrorCode::InvalidConfig, "split fractions must be positive");
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidConfig, "split fractions must sum to 1");
}

TimeSeries load_csv(const std::filesystem::path& path,
                    const std::optional<std::filesystem::path>& label_path) {
  const std::string text = read_file(path);
  std::string_view view = text;
  if (view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
  const auto lines = split_lines(view);
  if (lines.empty()) throw Error(ErrorCode::EmptySeries, path.string() + " is empty");

  TimeSeries ts;
  ts.name = path.stem().string();
  for (auto field : split_fields(lines[0])) ts.channel_names.emplace_back(field);
  const std::size_t c = ts.channel_names.size();
  const std::size_t rows = lines.size() - 1;
  if (rows == 0) throw Error(ErrorCode::EmptySeries, path.string() + " has a header but no rows");

  ts.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(c));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = split_fields(lines[r + 1]);
    if (fields.size() != c)
      throw Error(ErrorCode::MalformedRow, where(path, r + 2) + ": expected " + std::to_string(c) +
                                               " fields, found " + std::to_string(fields.size()));
    for (std::size_t j = 0; j < c; ++j) {
      double v;
      if (!parse_real(fields[j], v))
        throw Error(ErrorCode::MalformedRow,
                    where(path, r + 2) + ": cannot parse '" + std::string(fields[j]) + "'");
      ts.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = v;
    }
  }
  if (label_path) ts.change_points = load_labels(*label_path, rows);
  return ts;
}

std::vector<std::size_t> load_labels(const std::filesystem::path& path, std::size_t series_length) {
  const std::string text = read_file(path);
  std::string_view view = text;
  if (view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
  std::vector<std::size_t> cps;
  std::size_t line_no = 0;
  for (auto line : split_lines(view)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    long long v;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size())
      throw Error(ErrorCode::MalformedRow, where(path, line_no) + ": cannot parse label '" +
                                               std::string(line) + "'");
    if (v < 0 || static_cast<unsigned long long>(v) >= series_length)
      throw Error(ErrorCode::LabelOutOfRange, where(path, line_no) + ": index " + std::to_string(v) +
                                                  " outside [0, " + std::to_string(series_length) + ")");
    cps.push_back(static_cast<std::size_t>(v));
  }
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

void write_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t j = 0; j < ts.channels(); ++j) {
    if (j) out += ',';
    out += j < ts.channel_names.size() ? ts.channel_names[j] : "ch" + std::to_string(j);
  }
  out += '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < ts.values.rows(); ++r) {
    for (Eigen::Index j = 0; j < ts.values.cols(); ++j) {
      if (j) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", ts.values(r, j));
      out += buf;
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_labels(const std::vector<std::size_t>& change_points, const std::filesystem::path& path) {
  std::string out;
  for (auto cp : change_points) out += std::to_string(cp) + '\n';
  write_file_atomic(path, out);
}

TimeSeries normalize(const TimeSeries& ts) {
  TimeSeries out = ts;
  for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
    auto col = out.values.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi > lo) {
      const double range = hi - lo;
      for (Eigen::Index r = 0; r < col.size(); ++r) col(r) = (col(r) - lo) / range;
    } else {
      col.setZero();
    }
  }
  return out;
}

ChronoSplit split_chrono(const TimeSeries& ts, const SplitSpec& spec, std::size_t min_length) {
  spec.validate();
  const std::size_t T = ts.length();
  const auto cut = [T](double frac) {
    return std::min(T, static_cast<std::size_t>(std::floor(static_cast<double>(T) * frac + 1e-9)));
  };
  const std::size_t a = cut(spec.train_frac);
  const std::size_t b = std::max(a, cut(spec.train_frac + spec.val_frac));
  const std::size_t need = std::max<std::size_t>(min_length, 1);
  if (a < need || b - a < need || T - b < need)
    throw Error(ErrorCode::SplitTooSmall,
                "series '" + ts.name + "' of length " + std::to_string(T) + " splits into (" +
                    std::to_string(a) + ", " + std::to_string(b - a) + ", " + std::to_string(T - b) +
                    "), each part needs at least " + std::to_string(need));
  return ChronoSplit{slice(ts, 0, a), slice(ts, a, b), slice(ts, b, T), a, b};
}

std::vector<DatasetEntry> load_manifest(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  const auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  auto parse_one = [&](const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("data") || !j["data"].is_string())
      throw Error(ErrorCode::InvalidConfig, path.string() + ": each entry needs a \"data\" path");
    for (auto it = j.begin(); it != j.end(); ++it)
      if (it.key() != "data" && it.key() != "labels" && it.key() != "name" && it.key() != "dataset")
        throw Error(ErrorCode::InvalidConfig, path.string() + ": unknown key '" + it.key() + "'");
    DatasetEntry e;
    e.data = resolve(j["data"].get<std::string>());
    if (j.contains("labels") && !j["labels"].is_null()) e.labels = resolve(j["labels"].get<std::string>());
    e.name = j.value("name", e.data.stem().string());
    e.dataset = j.value("dataset", e.name);
    return e;
  };
  std::vector<DatasetEntry> entries;
  if (doc.is_array()) {
    for (const auto& j : doc) entries.push_back(parse_one(j));
  } else {
    entries.push_back(parse_one(doc));
  }
  if (entries.empty()) throw Error(ErrorCode::InvalidConfig, path.string() + ": manifest lists no series");
  return entries;
}

TimeSeries load_entry(const DatasetEntry& entry) {
  auto ts = load_csv(entry.data, entry.labels);
  ts.name = entry.name;
  return ts;
}

}  // namespace cadence
