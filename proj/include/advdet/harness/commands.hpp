#pragma once

#include <string>
#include <vector>

#include "advdet/harness/config.hpp"
#include "advdet/harness/synth.hpp"

namespace advdet {

/// Generates the bundled synthetic dataset tree under root.
void cmd_make_dataset(const SynthSpec& spec, const std::string& root);

/// Trains the head on dataset_root/{train,val}; emits checkpoint_last.ckpt,
/// checkpoint_best.ckpt, epoch_log.csv, and a manifest entry.
void cmd_train(const ExperimentConfig& cfg);

/// Runs the attack-strength sweep on dataset_root/test; emits sweep.csv,
/// per-image details, lost-class report, per-class CSVs, degradation chart,
/// and the clean/adversarial image panel.
void cmd_sweep(const ExperimentConfig& cfg);

/// Builds/loads the reference set, calibrates the threshold on the val
/// split, scores clean and attacked test batches, and emits verdict JSONL,
/// ROC CSVs/chart, and AUROC summaries.
void cmd_detect(const ExperimentConfig& cfg);

struct VerifyReport {
  std::vector<std::string> passes;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Re-hashes every manifest artifact and revalidates schemas (sweep header,
/// zero-epsilon identity row, epoch-log ranges, verdict JSONL keys). Never
/// silently passes: each check is itemized.
VerifyReport cmd_verify(const std::string& run_dir);

// Internals shared with tests.
std::vector<LabeledSample<float>> load_split(const ExperimentConfig& cfg,
                                             const std::string& split, AugmentMode mode);
ClassifierModel<float> build_model(const ExperimentConfig& cfg);

}  // namespace advdet
