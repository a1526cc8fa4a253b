#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cadence/dataio.hpp"
#include "cadence/experiment.hpp"
#include "cadence/synthetic.hpp"
#include "cadence/train.hpp"

namespace cadence::cli {

/// Every recognised key with its default value. Unknown keys are rejected.
nlohmann::ordered_json default_config();

/// Fully resolved run configuration. `effective` is the JSON document with
/// all defaults filled; feeding it back through resolve_config reproduces
/// the same run.
struct RunConfig {
  nlohmann::ordered_json effective;

  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::string> name;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> scores;
  std::filesystem::path out;

  std::vector<std::uint64_t> seeds;
  bool train_on_all = false;
  TrainConfig train;
  SplitSpec split;
  std::size_t tolerance = 25;
  double ratio = 0.4;
  std::optional<std::size_t> smooth_width;
  std::optional<std::size_t> min_separation;
  std::size_t workers = 1;
  AblationGrid grid;
  SyntheticSpec synthetic;
};

/// Merges defaults <- config file <- --out <- key=value overrides.
/// Override keys use dots for nesting ("split.train=0.7"); values are parsed
/// as JSON when possible and taken as strings otherwise.
RunConfig resolve_config(const std::optional<std::filesystem::path>& config_path,
                         const std::optional<std::string>& out_dir, const std::vector<std::string>& overrides);

RunConfig from_json(const nlohmann::ordered_json& effective);

}  // namespace cadence::cli
