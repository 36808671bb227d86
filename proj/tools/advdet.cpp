#include <iostream>

#include <CLI11.hpp>

#include "advdet/harness/commands.hpp"

namespace {

// Exit codes: 0 success, 1 validation failure, 2 I/O or config error.
int code_for(const advdet::Error& e) {
  switch (e.code()) {
    case advdet::ErrorCode::InvalidArgument:
    case advdet::ErrorCode::Validation:
      return 1;
    case advdet::ErrorCode::Io:
    case advdet::ErrorCode::Format:
      return 2;
  }
  return 2;
}

advdet::ExperimentConfig load_config(const std::string& config_path, const std::string& output,
                                     std::optional<std::int64_t> seed) {
  advdet::ConfigFile file = advdet::ConfigFile::parse_file(config_path);
  if (!output.empty()) file.set("experiment.output_dir", output);
  if (seed) file.set("experiment.global_seed", std::to_string(*seed));
  return advdet::ExperimentConfig::from_config(file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FGSM attack, detection, and degradation-report toolkit for image classifiers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  std::optional<std::int64_t> seed_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file")->required();
    cmd->add_option("--output", output_override, "override experiment.output_dir");
    cmd->add_option("--seed", seed_override, "override experiment.global_seed");
  };

  auto* train = app.add_subcommand("train", "train the classifier head, save checkpoints");
  add_common(train);
  auto* sweep = app.add_subcommand("sweep", "attack-strength sweep and degradation report");
  add_common(sweep);
  auto* detect = app.add_subcommand("detect", "calibrate and run the adversarial detector");
  add_common(detect);

  auto* verify = app.add_subcommand("verify", "re-hash and revalidate a run directory");
  std::string run_dir;
  std::string verify_config;
  verify->add_option("--run", run_dir, "run directory with a manifest");
  verify->add_option("--config", verify_config,
                     "experiment config; the run directory is its output_dir");
  verify->add_option("--output", output_override, "override the run directory");
  verify->add_option("--seed", seed_override, "accepted for interface symmetry (unused)");

  auto* make_ds = app.add_subcommand("make-dataset", "generate the synthetic shape dataset");
  advdet::SynthSpec spec;
  std::string dataset_out;
  std::string dataset_config;
  std::optional<std::int64_t> ds_seed;
  make_ds->add_option("--out,--output", dataset_out, "dataset root directory");
  make_ds->add_option("--config", dataset_config,
                      "experiment config supplying [dataset] defaults");
  make_ds->add_option("--classes", spec.num_classes, "number of shape classes (2..8)");
  make_ds->add_option("--size", spec.image_size, "square image size in pixels");
  make_ds->add_option("--train-per-class", spec.train_per_class, "training images per class");
  make_ds->add_option("--val-per-class", spec.val_per_class, "validation images per class");
  make_ds->add_option("--test-per-class", spec.test_per_class, "test images per class");
  make_ds->add_option("--seed", ds_seed, "generator seed");
  make_ds->add_option("--hue-jitter", spec.hue_jitter, "class hue wobble");
  make_ds->add_option("--texture", spec.texture_amplitude, "background texture amplitude");
  make_ds->add_flag("--no-masks", "skip the seg/images + seg/masks pair tree");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      advdet::cmd_train(load_config(config_path, output_override, seed_override));
    } else if (*sweep) {
      advdet::cmd_sweep(load_config(config_path, output_override, seed_override));
    } else if (*detect) {
      advdet::cmd_detect(load_config(config_path, output_override, seed_override));
    } else if (*verify) {
      std::string dir = run_dir;
      if (dir.empty() && !verify_config.empty()) {
        dir = advdet::ExperimentConfig::from_file(verify_config).output_dir;
      }
      if (!output_override.empty()) dir = output_override;
      advdet::require(!dir.empty(), advdet::ErrorCode::InvalidArgument,
                      "verify needs --run or --config");
      if (!advdet::cmd_verify(dir).ok()) return 1;
    } else if (*make_ds) {
      if (!dataset_config.empty()) {
        const auto file = advdet::ConfigFile::parse_file(dataset_config);
        if (dataset_out.empty()) dataset_out = file.get_string("dataset.root", "");
        if (!make_ds->count("--classes")) {
          spec.num_classes = static_cast<int>(file.get_int("dataset.classes", spec.num_classes));
        }
        if (!make_ds->count("--size")) {
          spec.image_size = static_cast<int>(file.get_int("dataset.image_size", spec.image_size));
        }
        if (!make_ds->count("--train-per-class")) {
          spec.train_per_class =
              static_cast<int>(file.get_int("dataset.train_per_class", spec.train_per_class));
        }
        if (!make_ds->count("--val-per-class")) {
          spec.val_per_class =
              static_cast<int>(file.get_int("dataset.val_per_class", spec.val_per_class));
        }
        if (!make_ds->count("--test-per-class")) {
          spec.test_per_class =
              static_cast<int>(file.get_int("dataset.test_per_class", spec.test_per_class));
        }
        spec.hue_jitter = file.get_double("dataset.hue_jitter", spec.hue_jitter);
        spec.texture_amplitude = file.get_double("dataset.texture", spec.texture_amplitude);
        if (!ds_seed) {
          spec.seed = static_cast<std::uint64_t>(
              file.get_int("dataset.seed", file.get_int("experiment.global_seed", 0)));
        }
      }
      if (ds_seed) spec.seed = static_cast<std::uint64_t>(*ds_seed);
      spec.emit_masks = make_ds->count("--no-masks") == 0;
      advdet::require(!dataset_out.empty(), advdet::ErrorCode::InvalidArgument,
                      "make-dataset needs --out or a config with dataset.root");
      advdet::cmd_make_dataset(spec, dataset_out);
    }
  } catch (const advdet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
