#include "advdet/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace advdet {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

/// Inline comments start at a '#' or ';' preceded by whitespace (so values
/// themselves may contain the characters when unspaced).
std::string strip_inline_comment(const std::string& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') && (s[i - 1] == ' ' || s[i - 1] == '\t')) {
      return s.substr(0, i);
    }
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.raw_text_ = text;
  cfg.origin_ = origin;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    t = trim(strip_inline_comment(t));
    if (t.front() == '[') {
      require(t.back() == ']', ErrorCode::Format,
              origin + ":" + std::to_string(line_no) + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      require(!section.empty(), ErrorCode::Format,
              origin + ":" + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const auto eq = t.find('=');
    require(eq != std::string::npos, ErrorCode::Format,
            origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    require(!key.empty(), ErrorCode::Format,
            origin + ":" + std::to_string(line_no) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

bool ConfigFile::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ConfigFile::get_string(const std::string& key) const {
  auto it = values_.find(key);
  require(it != values_.end(), ErrorCode::Format,
          origin_ + ": missing required config key '" + key + "'");
  return it->second;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t ConfigFile::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const std::int64_t out = std::stoll(v, &pos);
    require(pos == v.size(), ErrorCode::Format, "");
    return out;
  } catch (...) {
    fail(ErrorCode::Format, origin_ + ": key '" + key + "' is not an integer: " + v);
  }
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    require(pos == v.size(), ErrorCode::Format, "");
    return out;
  } catch (...) {
    fail(ErrorCode::Format, origin_ + ": key '" + key + "' is not a number: " + v);
  }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_string(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorCode::Format, origin_ + ": key '" + key + "' is not a boolean: " + v);
}

std::vector<double> ConfigFile::get_double_list(const std::string& key,
                                                const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& part : split(get_string(key), ',')) {
    if (part.empty()) continue;
    try {
      out.push_back(std::stod(part));
    } catch (...) {
      fail(ErrorCode::Format, origin_ + ": key '" + key + "' has a non-numeric entry: " + part);
    }
  }
  return out;
}

std::vector<int> ConfigFile::get_int_list(const std::string& key,
                                          const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (const auto& part : split(get_string(key), ',')) {
    if (part.empty()) continue;
    try {
      out.push_back(std::stoi(part));
    } catch (...) {
      fail(ErrorCode::Format, origin_ + ": key '" + key + "' has a non-integer entry: " + part);
    }
  }
  return out;
}

void ConfigFile::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  // Keep the serialized form authoritative for overrides too: append an
  // explicit override block so reruns from the stored copy reproduce them.
  const auto dot = key.rfind('.');
  const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
  const std::string bare = dot == std::string::npos ? key : key.substr(dot + 1);
  raw_text_ += "\n[" + section + "]\n" + bare + " = " + value + "\n";
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_config(ConfigFile::parse_file(path));
}

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& file) {
  ExperimentConfig cfg;
  cfg.raw_text = file.text();

  cfg.name = file.get_string("experiment.name", cfg.name);
  cfg.global_seed = static_cast<std::uint64_t>(file.get_int("experiment.global_seed", 0));
  cfg.output_dir = file.get_string("experiment.output_dir", cfg.output_dir);

  cfg.dataset_root = file.get_string("dataset.root", "");

  cfg.backbone = backbone_from_string(file.get_string("model.backbone", "tiny-cnn"));
  cfg.tiny.widths = file.get_int_list("model.tiny_widths", cfg.tiny.widths);
  cfg.crop_size = static_cast<int>(file.get_int("model.crop_size", 224));
  cfg.resize_short = static_cast<int>(file.get_int("model.resize_short", 256));
  cfg.backbone_weights = file.get_string("model.backbone_weights", "");
  const std::string ckpt = file.get_string("model.checkpoint", "last");
  if (ckpt == "best") {
    cfg.use_best_checkpoint = true;
  } else {
    require(ckpt == "last", ErrorCode::Format, "model.checkpoint must be last or best");
  }
  for (int c = 0; c < 3; ++c) {
    cfg.norm.mean[c] = file.get_double("model.norm_mean_" + std::to_string(c), cfg.norm.mean[c]);
    cfg.norm.std[c] = file.get_double("model.norm_std_" + std::to_string(c), cfg.norm.std[c]);
  }
  cfg.flip_probability = file.get_double("model.flip_probability", cfg.flip_probability);
  cfg.crop_scale_min = file.get_double("model.crop_scale_min", cfg.crop_scale_min);
  cfg.crop_scale_max = file.get_double("model.crop_scale_max", cfg.crop_scale_max);
  cfg.crop_aspect_min = file.get_double("model.crop_aspect_min", cfg.crop_aspect_min);
  cfg.crop_aspect_max = file.get_double("model.crop_aspect_max", cfg.crop_aspect_max);

  cfg.train.learning_rate = file.get_double("train.learning_rate", cfg.train.learning_rate);
  cfg.train.momentum = file.get_double("train.momentum", cfg.train.momentum);
  cfg.train.batch_size = static_cast<int>(file.get_int("train.batch_size", cfg.train.batch_size));
  cfg.train.epochs = static_cast<int>(file.get_int("train.epochs", 10));
  cfg.train.num_classes =
      static_cast<int>(file.get_int("train.num_classes", cfg.train.num_classes));
  cfg.train.rng_seed = static_cast<std::uint64_t>(
      file.get_int("train.rng_seed", static_cast<std::int64_t>(cfg.global_seed)));

  const std::string method = file.get_string("attack.method", "fgsm");
  require(method == "fgsm", ErrorCode::Format, "unknown attack method: " + method);
  cfg.attack.method = AttackMethod::Fgsm;
  cfg.attack.clamp = file.get_bool("attack.clamp", true);
  const std::string target = file.get_string("attack.loss_target", "true_label");
  if (target == "true_label") {
    cfg.attack.loss_target = LossTarget::TrueLabel;
  } else if (target == "predicted_label") {
    cfg.attack.loss_target = LossTarget::PredictedLabel;
  } else {
    fail(ErrorCode::Format, "unknown attack loss_target: " + target);
  }
  cfg.eps_grid = file.get_double_list("attack.eps_grid", cfg.eps_grid);
  const std::string baseline = file.get_string("attack.baseline", "predictions");
  if (baseline == "predictions") {
    cfg.sweep_baseline = SweepBaseline::Predictions;
  } else if (baseline == "ground_truth") {
    cfg.sweep_baseline = SweepBaseline::GroundTruth;
  } else {
    fail(ErrorCode::Format, "unknown sweep baseline: " + baseline);
  }
  cfg.panel_columns = static_cast<int>(file.get_int("attack.panel_columns", cfg.panel_columns));

  cfg.detector_metric =
      detection_metric_from_string(file.get_string("detector.metric", "k_density"));
  cfg.target_fpr = file.get_double("detector.target_fpr", cfg.target_fpr);
  cfg.bandwidth_override = file.get_double("detector.bandwidth", 0.0);
  cfg.max_per_class = static_cast<int>(file.get_int("detector.max_per_class", cfg.max_per_class));
  cfg.detector_eps = file.get_double_list("detector.eps_grid", cfg.detector_eps);
  cfg.reference_set_path = file.get_string("detector.reference_set", "");

  cfg.workers = static_cast<int>(file.get_int("run.workers", 1));
  return cfg;
}

}  // namespace advdet
