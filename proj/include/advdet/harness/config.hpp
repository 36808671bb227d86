#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advdet/attack/sweep.hpp"
#include "advdet/detect/scores.hpp"
#include "advdet/model/train.hpp"

namespace advdet {

/// Parsed key-value config file. The format is plain text: `[section]`
/// headers, `key = value` lines, `#` or `;` comments, trailing whitespace
/// ignored. Keys are addressed as "section.key".
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text, const std::string& origin = "<memory>");

  bool has(const std::string& dotted_key) const;
  std::string get_string(const std::string& dotted_key) const;
  std::string get_string(const std::string& dotted_key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& dotted_key, std::int64_t fallback) const;
  std::int64_t get_int(const std::string& dotted_key) const;
  double get_double(const std::string& dotted_key, double fallback) const;
  bool get_bool(const std::string& dotted_key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& dotted_key,
                                      const std::vector<double>& fallback) const;
  std::vector<int> get_int_list(const std::string& dotted_key,
                                const std::vector<int>& fallback) const;

  const std::string& text() const { return raw_text_; }
  void set(const std::string& dotted_key, const std::string& value);

 private:
  std::map<std::string, std::string> values_;
  std::string raw_text_;
  std::string origin_;
};

/// Everything one experiment run needs; deserialized from a config file and
/// written verbatim into the run directory before any computation.
struct ExperimentConfig {
  // [experiment]
  std::string name = "experiment";
  std::uint64_t global_seed = 0;
  std::string output_dir = "runs/experiment";

  // [dataset]
  std::string dataset_root;

  // [model]
  BackboneId backbone = BackboneId::TinyCnn;
  TinyCnnConfig tiny;
  int crop_size = 224;
  int resize_short = 256;
  NormSpec norm;
  std::string backbone_weights;  // optional named-tensor file for resnets
  bool use_best_checkpoint = false;  // sweep/detect read best instead of last
  // Train-mode augmentation ranges, recorded here so runs are reproducible.
  double flip_probability = 0.5;
  double crop_scale_min = 0.08;
  double crop_scale_max = 1.0;
  double crop_aspect_min = 3.0 / 4.0;
  double crop_aspect_max = 4.0 / 3.0;

  // [train]
  TrainConfig train;

  // [attack]
  AttackSpec attack;
  std::vector<double> eps_grid = {0.0, 0.02, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
  SweepBaseline sweep_baseline = SweepBaseline::Predictions;
  int panel_columns = 4;

  // [detector]
  DetectionMetric detector_metric = DetectionMetric::KernelDensity;
  double target_fpr = 0.05;
  double bandwidth_override = 0.0;
  int max_per_class = 200;
  std::vector<double> detector_eps = {0.0, 0.05, 0.10};
  std::string reference_set_path;  // reuse if present, else built and saved

  // [run]
  int workers = 1;

  std::string raw_text;  // the config file exactly as read

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_config(const ConfigFile& file);
};

}  // namespace advdet
