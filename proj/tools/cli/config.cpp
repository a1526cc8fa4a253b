#include "cli/config.hpp"

#include <string>
#include <utility>

#include "cadence/error.hpp"
#include "cadence/fileutil.hpp"

namespace cadence::cli {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

ordered_json early_stop_template() { return ordered_json{{"eval_every", 100}, {"patience", 5}}; }

// Nullable keys whose non-null form is an object with its own defaults.
const ordered_json* object_template(const std::string& key) {
  static const ordered_json early = early_stop_template();
  return key == "early_stop" ? &early : nullptr;
}

void merge(ordered_json& base, const ordered_json& patch, const std::string& prefix) {
  if (!patch.is_object()) fail("expected an object at '" + (prefix.empty() ? std::string("<root>") : prefix) + "'");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) fail("unknown config key '" + path + "'");
    auto& slot = base[key];
    if (const auto* tmpl = object_template(key)) {
      if (value.is_null() || (value.is_boolean() && !value.get<bool>())) {
        slot = nullptr;
      } else if (value.is_boolean()) {
        if (slot.is_null()) slot = *tmpl;
      } else {
        if (slot.is_null()) slot = *tmpl;
        merge(slot, value, path);
      }
    } else if (slot.is_object()) {
      merge(slot, value, path);
    } else {
      slot = value;
    }
  }
}

ordered_json parse_scalar(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    return ordered_json(text);
  }
}

void apply_override(ordered_json& config, const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) fail("override '" + arg + "' is not of the form key=value");
  const std::string key = arg.substr(0, eq);
  const ordered_json value = parse_scalar(arg.substr(eq + 1));

  // Build a nested patch from the dotted key and reuse the merge rules.
  ordered_json patch = value;
  std::size_t end = key.size();
  while (true) {
    const auto dot = key.rfind('.', end - 1);
    const std::size_t begin = dot == std::string::npos ? 0 : dot + 1;
    if (begin == end) fail("override key '" + key + "' has an empty component");
    ordered_json wrapped = ordered_json::object();
    wrapped[key.substr(begin, end - begin)] = std::move(patch);
    patch = std::move(wrapped);
    if (dot == std::string::npos) break;
    end = dot;
  }
  merge(config, patch, "");
}

template <typename T>
T get_as(const ordered_json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail("config key '" + key + "' has the wrong type");
  }
}

std::size_t get_count(const ordered_json& j, const std::string& key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    fail("config key '" + key + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

std::uint64_t get_seed(const ordered_json& j, const std::string& key) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<long long>() < 0))
    fail("config key '" + key + "' must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::optional<std::filesystem::path> opt_path(const ordered_json& j, const std::string& key) {
  if (j.is_null()) return std::nullopt;
  return std::filesystem::path(get_as<std::string>(j, key));
}

std::optional<std::size_t> opt_count(const ordered_json& j, const std::string& key) {
  if (j.is_null()) return std::nullopt;
  return get_count(j, key);
}

template <typename T, typename F>
std::vector<T> get_list(const ordered_json& j, const std::string& key, F&& convert) {
  if (!j.is_array()) fail("config key '" + key + "' must be a list");
  std::vector<T> out;
  for (const auto& item : j) out.push_back(convert(item));
  return out;
}

}  // namespace

ordered_json default_config() {
  ordered_json c;
  c["data"] = nullptr;
  c["labels"] = nullptr;
  c["manifest"] = nullptr;
  c["name"] = nullptr;
  c["model"] = nullptr;
  c["scores"] = nullptr;
  c["out"] = "out";
  c["seed"] = 0;
  c["seeds"] = {0, 1, 2};
  c["train_on_all"] = false;
  c["learning_rate"] = 1e-4;
  c["iterations"] = 2000;
  c["batch_size"] = 64;
  c["beta"] = 1.0;
  c["window"] = 25;
  c["latent_dim"] = 3;
  c["kernel"] = "gaussian";
  c["bandwidth"] = "median";
  c["loss_variant"] = "mse_plus_mmd";
  c["early_stop"] = nullptr;
  c["mmd_epsilon"] = nullptr;
  c["linear_output"] = false;
  c["split"] = {{"train", 0.6}, {"val", 0.2}, {"test", 0.2}};
  c["tolerance"] = 25;
  c["ratio"] = 0.4;
  c["smooth_width"] = nullptr;
  c["min_separation"] = nullptr;
  c["workers"] = 1;
  c["grid"] = {{"loss_variant", ordered_json::array()}, {"beta", ordered_json::array()},
               {"w", ordered_json::array()},            {"z", ordered_json::array()},
               {"kernel", ordered_json::array()},       {"train_frac", ordered_json::array()}};
  c["synthetic"] = {{"n_segments", 5},  {"min_segment_length", 200}, {"max_segment_length", 200},
                    {"channels", 1},    {"kind", "mean_shift"},      {"magnitude", 5.0},
                    {"noise_sigma", 1.0}, {"seed", 0}};
  return c;
}

RunConfig from_json(const ordered_json& effective) {
  RunConfig rc;
  rc.effective = default_config();
  merge(rc.effective, effective, "");
  const auto& e = rc.effective;

  rc.data = opt_path(e["data"], "data");
  rc.labels = opt_path(e["labels"], "labels");
  rc.manifest = opt_path(e["manifest"], "manifest");
  if (!e["name"].is_null()) rc.name = get_as<std::string>(e["name"], "name");
  rc.model = opt_path(e["model"], "model");
  rc.scores = opt_path(e["scores"], "scores");
  rc.out = get_as<std::string>(e["out"], "out");
  if (rc.out.empty()) fail("config key 'out' must not be empty");

  rc.seeds = get_list<std::uint64_t>(e["seeds"], "seeds", [](const ordered_json& s) { return get_seed(s, "seeds"); });
  if (rc.seeds.empty()) fail("config key 'seeds' must not be empty");
  rc.train_on_all = get_as<bool>(e["train_on_all"], "train_on_all");

  auto& t = rc.train;
  t.learning_rate = get_as<double>(e["learning_rate"], "learning_rate");
  t.iterations = get_count(e["iterations"], "iterations");
  t.batch_size = get_count(e["batch_size"], "batch_size");
  t.beta = get_as<double>(e["beta"], "beta");
  t.window = get_count(e["window"], "window");
  t.latent_dim = get_count(e["latent_dim"], "latent_dim");
  t.seed = get_seed(e["seed"], "seed");
  const auto family = parse_kernel_family(get_as<std::string>(e["kernel"], "kernel"));
  const auto& bw = e["bandwidth"];
  if (bw.is_string()) {
    if (bw.get<std::string>() != "median") fail("config key 'bandwidth' must be \"median\" or a positive number");
    t.kernel = KernelSpec::median(family);
  } else {
    t.kernel = KernelSpec::fixed(family, get_as<double>(bw, "bandwidth"));
  }
  t.loss_variant = parse_loss_variant(get_as<std::string>(e["loss_variant"], "loss_variant"));
  if (!e["early_stop"].is_null()) {
    const auto& es = e["early_stop"];
    t.early_stop = EarlyStop{get_count(es["eval_every"], "early_stop.eval_every"),
                             get_count(es["patience"], "early_stop.patience")};
  }
  if (!e["mmd_epsilon"].is_null()) t.mmd_epsilon = get_as<double>(e["mmd_epsilon"], "mmd_epsilon");
  t.linear_output = get_as<bool>(e["linear_output"], "linear_output");
  rc.tolerance = get_count(e["tolerance"], "tolerance");
  t.tolerance = rc.tolerance;
  t.validate();

  rc.split.train_frac = get_as<double>(e["split"]["train"], "split.train");
  rc.split.val_frac = get_as<double>(e["split"]["val"], "split.val");
  rc.split.test_frac = get_as<double>(e["split"]["test"], "split.test");
  rc.split.validate();

  rc.ratio = get_as<double>(e["ratio"], "ratio");
  if (!(rc.ratio > 0.0 && rc.ratio <= 1.0)) fail("config key 'ratio' must lie in (0, 1]");
  rc.smooth_width = opt_count(e["smooth_width"], "smooth_width");
  if (rc.smooth_width && *rc.smooth_width == 0) fail("config key 'smooth_width' must be positive");
  rc.min_separation = opt_count(e["min_separation"], "min_separation");
  rc.workers = get_count(e["workers"], "workers");
  if (rc.workers == 0) fail("config key 'workers' must be at least 1");

  const auto& g = e["grid"];
  rc.grid.loss_variants = get_list<LossVariant>(g["loss_variant"], "grid.loss_variant", [](const ordered_json& v) {
    return parse_loss_variant(get_as<std::string>(v, "grid.loss_variant"));
  });
  rc.grid.betas = get_list<double>(g["beta"], "grid.beta", [](const ordered_json& v) { return get_as<double>(v, "grid.beta"); });
  rc.grid.windows = get_list<std::size_t>(g["w"], "grid.w", [](const ordered_json& v) { return get_count(v, "grid.w"); });
  rc.grid.latent_dims = get_list<std::size_t>(g["z"], "grid.z", [](const ordered_json& v) { return get_count(v, "grid.z"); });
  rc.grid.kernels = get_list<KernelFamily>(g["kernel"], "grid.kernel", [](const ordered_json& v) {
    return parse_kernel_family(get_as<std::string>(v, "grid.kernel"));
  });
  rc.grid.train_fracs = get_list<double>(g["train_frac"], "grid.train_frac",
                                         [](const ordered_json& v) { return get_as<double>(v, "grid.train_frac"); });

  const auto& s = e["synthetic"];
  auto& sp = rc.synthetic;
  sp.n_segments = get_count(s["n_segments"], "synthetic.n_segments");
  sp.min_segment_length = get_count(s["min_segment_length"], "synthetic.min_segment_length");
  sp.max_segment_length = get_count(s["max_segment_length"], "synthetic.max_segment_length");
  sp.channels = get_count(s["channels"], "synthetic.channels");
  sp.kind = parse_jump_kind(get_as<std::string>(s["kind"], "synthetic.kind"));
  sp.magnitude = get_as<double>(s["magnitude"], "synthetic.magnitude");
  sp.noise_sigma = get_as<double>(s["noise_sigma"], "synthetic.noise_sigma");
  sp.seed = get_seed(s["seed"], "synthetic.seed");
  sp.validate();
  return rc;
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& config_path,
                         const std::optional<std::string>& out_dir, const std::vector<std::string>& overrides) {
  ordered_json merged = default_config();
  if (config_path) {
    std::string text;
    try {
      text = read_file(*config_path);
    } catch (const Error& e) {
      fail(std::string("cannot read config: ") + e.what());
    }
    ordered_json file;
    try {
      file = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      fail("cannot parse config " + config_path->string() + ": " + e.what());
    }
    merge(merged, file, "");
  }
  if (out_dir) merged["out"] = *out_dir;
  for (const auto& arg : overrides) apply_override(merged, arg);
  return from_json(merged);
}

}  // namespace cadence::cli
