#include "advdet/harness/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "advdet/core/dataset.hpp"
#include "advdet/core/hash.hpp"
#include "advdet/core/image_io.hpp"
#include "advdet/core/parallel.hpp"
#include "advdet/detect/roc.hpp"
#include "advdet/detect/threshold.hpp"
#include "advdet/harness/csv.hpp"
#include "advdet/harness/manifest.hpp"
#include "advdet/harness/plot.hpp"
#include "advdet/model/checkpoint.hpp"

namespace advdet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class StageTimer {
 public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// The run's config is written verbatim before any computation; its hash
/// keys the manifest.
std::string write_config_copy(const ExperimentConfig& cfg, const std::string& run_dir) {
  fs::create_directories(run_dir);
  const std::string path = (fs::path(run_dir) / "config.ini").string();
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::Io, "cannot write config copy: " + path);
  os << cfg.raw_text;
  os.close();
  return to_hex(fnv1a64(cfg.raw_text));
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", eps);
  return buf;
}

std::string checkpoint_path(const ExperimentConfig& cfg) {
  const char* name = cfg.use_best_checkpoint ? "checkpoint_best.ckpt" : "checkpoint_last.ckpt";
  return (fs::path(cfg.output_dir) / name).string();
}

ClassifierModel<float> load_run_checkpoint(const ExperimentConfig& cfg) {
  const std::string path = checkpoint_path(cfg);
  require(fs::exists(path), ErrorCode::Io,
          "checkpoint not found (run `train` first), expected: " + path);
  return load_checkpoint(path);
}

void write_jsonl_reports(const std::string& path,
                         const std::vector<std::string>& sample_paths,
                         const std::vector<DetectionReport>& reports) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorCode::Io, "cannot write detections: " + path);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    json j;
    j["path"] = sample_paths[i];
    j["predicted_class"] = r.scores.predicted_class;
    j["confidence"] = r.scores.confidence;
    j["non_me"] = r.scores.non_me;
    j["k_density"] = r.scores.k_density;
    j["metric"] = to_string(r.policy.metric);
    j["threshold"] = r.policy.threshold;
    j["verdict"] = to_string(r.verdict);
    j["margin"] = r.margin;
    os << j.dump() << "\n";
  }
}

}  // namespace

std::vector<LabeledSample<float>> load_split(const ExperimentConfig& cfg,
                                             const std::string& split, AugmentMode mode) {
  require(!cfg.dataset_root.empty(), ErrorCode::Format, "config is missing dataset.root");
  const std::string root = (fs::path(cfg.dataset_root) / split).string();
  const ClassificationDataset ds = scan_classification_tree(root);
  require(ds.num_classes() <= cfg.train.num_classes, ErrorCode::Validation,
          "dataset has " + std::to_string(ds.num_classes()) + " classes but the head is " +
              std::to_string(cfg.train.num_classes) + "-wide");

  std::vector<LabeledSample<float>> samples(ds.entries.size());
  parallel_for_ordered(ds.entries.size(), cfg.workers, [&](std::size_t i) {
    const auto& entry = ds.entries[i];
    RawImage img = load_image(entry.path);
    img.label = entry.label;
    img.source_path = entry.path;
    AugmentSpec aug;
    aug.crop_size = cfg.crop_size;
    aug.resize_short = cfg.resize_short;
    aug.mode = mode;
    aug.rng_seed = mix_seed(cfg.global_seed, fnv1a64(entry.path));
    aug.flip_probability = cfg.flip_probability;
    aug.scale_min = cfg.crop_scale_min;
    aug.scale_max = cfg.crop_scale_max;
    aug.aspect_min = cfg.crop_aspect_min;
    aug.aspect_max = cfg.crop_aspect_max;
    samples[i] = {preprocess<float>(img, aug, cfg.norm), entry.label, entry.path};
  });
  return samples;
}

ClassifierModel<float> build_model(const ExperimentConfig& cfg) {
  ClassifierModel<float> model = make_classifier<float>(
      cfg.backbone, cfg.train.num_classes, cfg.norm, cfg.crop_size, cfg.global_seed, cfg.tiny);
  if (cfg.backbone != BackboneId::TinyCnn && !cfg.backbone_weights.empty()) {
    load_named_tensors_into(model.backbone->params(), cfg.backbone_weights);
    std::const_pointer_cast<Backbone<float>>(model.backbone)
        ->set_weights_ref(cfg.backbone_weights);
  }
  return model;
}

void cmd_make_dataset(const SynthSpec& spec, const std::string& root) {
  generate_synth_dataset(spec, root);
  std::cout << "dataset: " << root << " (" << spec.num_classes << " classes, "
            << spec.train_per_class << "/" << spec.val_per_class << "/" << spec.test_per_class
            << " per class)\n";
}

void cmd_train(const ExperimentConfig& cfg) {
  StageTimer timer;
  const std::string run_dir = cfg.output_dir;
  RunManifest manifest = load_manifest_or_empty(run_dir);
  manifest.toolkit_version = kToolkitVersion;
  manifest.config_hash = write_config_copy(cfg, run_dir);

  auto train_samples = load_split(cfg, "train", AugmentMode::Train);
  std::vector<LabeledSample<float>> val_samples;
  if (fs::is_directory(fs::path(cfg.dataset_root) / "val")) {
    val_samples = load_split(cfg, "val", AugmentMode::Eval);
  }

  ClassifierModel<float> model = build_model(cfg);
  TrainResult<float> result = train_head(model, train_samples, val_samples, cfg.train);

  save_checkpoint(model, cfg.train, (fs::path(run_dir) / "checkpoint_last.ckpt").string());
  ClassifierModel<float> best = model;
  best.head = result.best_head;
  save_checkpoint(best, cfg.train, (fs::path(run_dir) / "checkpoint_best.ckpt").string());
  write_epoch_log_csv(result.log, (fs::path(run_dir) / "epoch_log.csv").string());

  record_artifact(manifest, run_dir, "train", "config", "config.ini");
  record_artifact(manifest, run_dir, "train", "checkpoint_last", "checkpoint_last.ckpt");
  record_artifact(manifest, run_dir, "train", "checkpoint_best", "checkpoint_best.ckpt");
  record_artifact(manifest, run_dir, "train", "epoch_log", "epoch_log.csv");
  manifest.stages["train"].wall_clock_sec = timer.seconds();
  save_manifest(manifest, run_dir);

  double final_train_acc = 0.0, final_val_acc = 0.0;
  for (const auto& row : result.log) {
    (row.phase == Phase::Train ? final_train_acc : final_val_acc) = row.accuracy;
  }
  std::cout << "train: " << cfg.train.epochs << " epochs, final train acc "
            << format_number(final_train_acc) << ", final val acc "
            << format_number(final_val_acc) << ", best val acc "
            << format_number(result.best_val_accuracy) << " (epoch " << result.best_epoch
            << ")\n";
}

void cmd_sweep(const ExperimentConfig& cfg) {
  StageTimer timer;
  const std::string run_dir = cfg.output_dir;
  RunManifest manifest = load_manifest_or_empty(run_dir);
  manifest.toolkit_version = kToolkitVersion;
  manifest.config_hash = write_config_copy(cfg, run_dir);

  ClassifierModel<float> model = load_run_checkpoint(cfg);
  auto test_samples = load_split(cfg, "test", AugmentMode::Eval);

  SweepOptions opt;
  opt.loss_target = cfg.attack.loss_target;
  opt.clamp = cfg.attack.clamp;
  opt.baseline = cfg.sweep_baseline;
  opt.workers = cfg.workers;
  SweepResult result = epsilon_sweep(model, test_samples, cfg.eps_grid, opt);

  write_sweep_csv(result.rows, (fs::path(run_dir) / "sweep.csv").string());

  {
    std::ofstream os((fs::path(run_dir) / "sweep_details.jsonl").string());
    require(static_cast<bool>(os), ErrorCode::Io, "cannot write sweep details");
    for (const auto& detail : result.details) {
      for (const auto& img : detail.images) {
        json j;
        j["epsilon"] = detail.epsilon;
        j["path"] = img.path;
        j["linf_achieved"] = img.linf_achieved;
        j["flipped"] = img.flipped;
        os << j.dump() << "\n";
      }
    }
  }
  {
    json lost = json::array();
    for (const auto& detail : result.details) {
      json entry;
      entry["epsilon"] = detail.epsilon;
      entry["lost_classes"] = json::array();
      for (int c : detail.lost) entry["lost_classes"].push_back(c);
      lost.push_back(entry);
    }
    std::ofstream os((fs::path(run_dir) / "lost_classes.json").string());
    os << lost.dump(2) << "\n";
  }
  for (const auto& detail : result.details) {
    write_per_class_csv(detail.aggregate,
                        (fs::path(run_dir) / ("per_class_eps" + eps_tag(detail.epsilon) + ".csv"))
                            .string());
  }
  {
    // Full metric bundle per attack strength, including flagged-undefined
    // per-class entries.
    json bundles = json::array();
    for (std::size_t i = 0; i < result.details.size(); ++i) {
      const auto& detail = result.details[i];
      const auto& row = result.rows[i];
      json b;
      b["epsilon"] = detail.epsilon;
      b["pixel_acc"] = row.pixel_acc;
      b["miou"] = row.miou;
      b["pa"] = row.pa;
      b["macc"] = row.macc;
      b["miou_agg"] = row.miou_agg;
      b["dice_f1"] = row.mf1;
      b["per_class_iou"] = json::array();
      for (const auto& iou : detail.per_class_iou) {
        b["per_class_iou"].push_back(iou ? json(*iou) : json(nullptr));
      }
      b["lost_classes"] = json::array();
      for (int c : detail.lost) b["lost_classes"].push_back(c);
      bundles.push_back(b);
    }
    std::ofstream os((fs::path(run_dir) / "metrics.json").string());
    os << bundles.dump(2) << "\n";
  }

  {
    std::vector<PlotSeries> series(6);
    const char* names[] = {"pixel_acc", "mIoU", "PA", "mAcc", "mIoU_agg", "mF1"};
    for (int i = 0; i < 6; ++i) series[i].name = names[i];
    for (const auto& row : result.rows) {
      const double vals[] = {row.pixel_acc, row.miou, row.pa, row.macc, row.miou_agg, row.mf1};
      for (int i = 0; i < 6; ++i) {
        series[i].x.push_back(row.epsilon);
        series[i].y.push_back(vals[i]);
      }
    }
    write_line_chart_svg((fs::path(run_dir) / "sweep.svg").string(),
                         "attack strength vs segmentation metrics", "epsilon", "metric value",
                         series);
  }

  // Clean/adversarial panel: one column per sample, one row per epsilon.
  {
    const int cols = std::min<int>(cfg.panel_columns, static_cast<int>(test_samples.size()));
    std::vector<std::vector<Tensor3<float>>> grid;
    for (double eps : cfg.eps_grid) {
      std::vector<Tensor3<float>> row;
      for (int c = 0; c < cols; ++c) {
        const auto& sample = test_samples[static_cast<std::size_t>(c) * test_samples.size() /
                                          std::max(1, cols)];
        AttackSpec spec = cfg.attack;
        spec.epsilon = eps;
        auto pair = fgsm(model, sample.image, sample.label, spec);
        row.push_back(denormalize(pair.adversarial).data);
      }
      grid.push_back(std::move(row));
    }
    write_image_panel_png((fs::path(run_dir) / "panel.png").string(), grid);
  }

  record_artifact(manifest, run_dir, "sweep", "config", "config.ini");
  record_artifact(manifest, run_dir, "sweep", "sweep_csv", "sweep.csv");
  record_artifact(manifest, run_dir, "sweep", "sweep_details", "sweep_details.jsonl");
  record_artifact(manifest, run_dir, "sweep", "metrics", "metrics.json");
  record_artifact(manifest, run_dir, "sweep", "lost_classes", "lost_classes.json");
  record_artifact(manifest, run_dir, "sweep", "sweep_plot", "sweep.svg");
  record_artifact(manifest, run_dir, "sweep", "panel", "panel.png");
  for (const auto& detail : result.details) {
    const std::string name = "per_class_eps" + eps_tag(detail.epsilon) + ".csv";
    record_artifact(manifest, run_dir, "sweep", name, name);
  }
  manifest.stages["sweep"].wall_clock_sec = timer.seconds();
  save_manifest(manifest, run_dir);

  std::cout << "sweep: " << result.rows.size() << " rows -> " << run_dir << "/sweep.csv\n";
  for (const auto& row : result.rows) {
    std::cout << "  eps " << format_number(row.epsilon) << ": mIoU "
              << format_number(row.miou) << ", PA " << format_number(row.pa) << "\n";
  }
}

void cmd_detect(const ExperimentConfig& cfg) {
  StageTimer timer;
  const std::string run_dir = cfg.output_dir;
  RunManifest manifest = load_manifest_or_empty(run_dir);
  manifest.toolkit_version = kToolkitVersion;
  manifest.config_hash = write_config_copy(cfg, run_dir);

  ClassifierModel<float> model = load_run_checkpoint(cfg);

  // Reference set: reuse when configured and present, else build from clean
  // training features and persist.
  ReferenceSet ref;
  std::string ref_rel = "reference_set.bin";
  const std::string configured = cfg.reference_set_path;
  if (!configured.empty() && fs::exists(configured)) {
    ref = load_reference_set(configured);
    ref_rel = configured;
  } else {
    auto train_samples = load_split(cfg, "train", AugmentMode::Eval);
    std::map<int, std::vector<Eigen::VectorXd>> by_class;
    for (const auto& s : train_samples) {
      by_class[s.label].push_back(model.forward(s.image).z.cast<double>());
    }
    ReferenceBuildOptions opts;
    opts.max_per_class = cfg.max_per_class;
    opts.seed = mix_seed(cfg.global_seed, 0x5ef5);
    opts.bandwidth_override = cfg.bandwidth_override;
    ref = build_reference_set(by_class, opts);
    save_reference_set(ref, (fs::path(run_dir) / ref_rel).string());
  }

  // Calibration on the clean validation split.
  auto val_samples = load_split(cfg, "val", AugmentMode::Eval);
  require(val_samples.size() >= 20, ErrorCode::InvalidArgument,
          "calibration split needs at least 20 samples, got " +
              std::to_string(val_samples.size()));
  std::vector<DetectionScores> val_scores(val_samples.size());
  parallel_for_ordered(val_samples.size(), cfg.workers, [&](std::size_t i) {
    val_scores[i] = score_input(model, val_samples[i].image, ref);
  });
  std::vector<double> calib;
  for (const auto& s : val_scores) calib.push_back(s.get(cfg.detector_metric));
  const ThresholdPolicy policy =
      calibrate_threshold(calib, cfg.target_fpr, cfg.detector_metric);
  {
    json j;
    j["metric"] = to_string(policy.metric);
    j["threshold"] = policy.threshold;
    j["target_fpr"] = policy.target_fpr;
    j["calibration_set_size"] = policy.calibration_set_size;
    std::ofstream os((fs::path(run_dir) / "calibration.json").string());
    os << j.dump(2) << "\n";
  }

  auto test_samples = load_split(cfg, "test", AugmentMode::Eval);
  const std::size_t n = test_samples.size();

  auto score_batch = [&](const std::vector<TensorImage<float>>& images) {
    std::vector<DetectionScores> scores(images.size());
    parallel_for_ordered(images.size(), cfg.workers, [&](std::size_t i) {
      scores[i] = score_input(model, images[i], ref);
    });
    return scores;
  };
  auto to_reports = [&](const std::vector<DetectionScores>& scores) {
    std::vector<DetectionReport> reports(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      reports[i] = render_verdict(scores[i], policy);
    }
    return reports;
  };
  auto flagged_fraction = [](const std::vector<DetectionReport>& reports) {
    std::size_t flagged = 0;
    for (const auto& r : reports) flagged += r.verdict == Verdict::Adversarial ? 1 : 0;
    return reports.empty() ? 0.0 : static_cast<double>(flagged) / reports.size();
  };

  std::vector<TensorImage<float>> clean_images;
  std::vector<std::string> clean_paths;
  for (const auto& s : test_samples) {
    clean_images.push_back(s.image);
    clean_paths.push_back(s.path);
  }
  const auto clean_scores = score_batch(clean_images);
  const auto clean_reports = to_reports(clean_scores);
  write_jsonl_reports((fs::path(run_dir) / "detections_clean.jsonl").string(), clean_paths,
                      clean_reports);

  json summary;
  summary["metric"] = to_string(cfg.detector_metric);
  summary["threshold"] = policy.threshold;
  summary["clean_flagged_fraction"] = flagged_fraction(clean_reports);
  summary["per_epsilon"] = json::array();

  std::vector<std::string> auroc_lines;  // epsilon,metric,auroc
  const DetectionMetric metrics[] = {DetectionMetric::Confidence,
                                     DetectionMetric::NonMaxEntropy,
                                     DetectionMetric::KernelDensity};

  std::vector<PlotSeries> auroc_series(3);
  for (int m = 0; m < 3; ++m) auroc_series[m].name = to_string(metrics[m]);

  for (double eps : cfg.detector_eps) {
    std::vector<TensorImage<float>> adv_images(n);
    AttackSpec spec = cfg.attack;
    spec.epsilon = eps;
    parallel_for_ordered(n, cfg.workers, [&](std::size_t i) {
      adv_images[i] =
          fgsm(model, test_samples[i].image, test_samples[i].label, spec).adversarial;
    });
    const auto adv_scores = score_batch(adv_images);
    const auto adv_reports = to_reports(adv_scores);
    write_jsonl_reports(
        (fs::path(run_dir) / ("detections_eps" + eps_tag(eps) + ".jsonl")).string(),
        clean_paths, adv_reports);

    json entry;
    entry["epsilon"] = eps;
    entry["adv_flagged_fraction"] = flagged_fraction(adv_reports);
    for (int m = 0; m < 3; ++m) {
      std::vector<double> cs, as;
      for (const auto& s : clean_scores) cs.push_back(s.get(metrics[m]));
      for (const auto& s : adv_scores) as.push_back(s.get(metrics[m]));
      const RocResult roc = evaluate_detector(cs, as);
      const std::string tag =
          std::string(to_string(metrics[m])) + "_eps" + eps_tag(eps);
      write_roc_csv(roc.points, (fs::path(run_dir) / ("roc_" + tag + ".csv")).string());
      auroc_lines.push_back(format_number(eps) + "," + to_string(metrics[m]) + "," +
                            format_number(roc.auroc));
      entry["auroc_" + std::string(to_string(metrics[m]))] = roc.auroc;
      auroc_series[m].x.push_back(eps);
      auroc_series[m].y.push_back(roc.auroc);
    }
    summary["per_epsilon"].push_back(entry);
  }

  {
    std::ofstream os((fs::path(run_dir) / "auroc.csv").string());
    os << "epsilon,metric,auroc\n";
    for (const auto& line : auroc_lines) os << line << "\n";
  }
  {
    std::ofstream os((fs::path(run_dir) / "detect_summary.json").string());
    os << summary.dump(2) << "\n";
  }
  if (!auroc_series[0].x.empty()) {
    write_line_chart_svg((fs::path(run_dir) / "auroc.svg").string(),
                         "detector separability vs attack strength", "epsilon", "AUROC",
                         auroc_series);
  }

  record_artifact(manifest, run_dir, "detect", "config", "config.ini");
  if (ref_rel == "reference_set.bin") {
    record_artifact(manifest, run_dir, "detect", "reference_set", ref_rel);
  }
  record_artifact(manifest, run_dir, "detect", "calibration", "calibration.json");
  record_artifact(manifest, run_dir, "detect", "detections_clean", "detections_clean.jsonl");
  for (double eps : cfg.detector_eps) {
    const std::string name = "detections_eps" + eps_tag(eps) + ".jsonl";
    record_artifact(manifest, run_dir, "detect", name, name);
    for (int m = 0; m < 3; ++m) {
      const std::string roc_name =
          "roc_" + std::string(to_string(metrics[m])) + "_eps" + eps_tag(eps) + ".csv";
      record_artifact(manifest, run_dir, "detect", roc_name, roc_name);
    }
  }
  record_artifact(manifest, run_dir, "detect", "auroc", "auroc.csv");
  record_artifact(manifest, run_dir, "detect", "summary", "detect_summary.json");
  manifest.stages["detect"].wall_clock_sec = timer.seconds();
  save_manifest(manifest, run_dir);

  std::cout << "detect: threshold " << format_number(policy.threshold) << " ("
            << to_string(policy.metric) << "), clean flagged "
            << format_number(summary["clean_flagged_fraction"].get<double>()) << "\n";
  for (const auto& entry : summary["per_epsilon"]) {
    std::cout << "  eps " << format_number(entry["epsilon"].get<double>()) << ": adv flagged "
              << format_number(entry["adv_flagged_fraction"].get<double>()) << ", AUROC(kd) "
              << format_number(entry["auroc_k_density"].get<double>()) << "\n";
  }
}

VerifyReport cmd_verify(const std::string& run_dir) {
  VerifyReport report;
  auto check = [&](bool ok, const std::string& what) {
    (ok ? report.passes : report.failures).push_back(what);
  };

  RunManifest manifest = load_manifest(run_dir);

  const std::string config_path = (fs::path(run_dir) / "config.ini").string();
  if (fs::exists(config_path)) {
    check(to_hex(fnv1a64_file(config_path)) == manifest.config_hash,
          "config.ini hash matches manifest");
  } else {
    check(false, "config.ini present");
  }

  for (const auto& [stage, record] : manifest.stages) {
    for (const auto& [key, artifact] : record.artifacts) {
      const std::string full = (fs::path(run_dir) / artifact.path).string();
      if (!fs::exists(full)) {
        check(false, stage + "/" + key + ": file exists (" + artifact.path + ")");
        continue;
      }
      check(to_hex(fnv1a64_file(full)) == artifact.fnv1a64,
            stage + "/" + key + ": content hash matches (" + artifact.path + ")");
    }
  }

  const std::string sweep_path = (fs::path(run_dir) / "sweep.csv").string();
  if (fs::exists(sweep_path)) {
    try {
      const auto rows = parse_sweep_csv(sweep_path);
      check(!rows.empty(), "sweep.csv has rows");
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].epsilon <= rows[i - 1].epsilon) {
          check(false, "sweep.csv epsilon column strictly ascending");
          break;
        }
      }
      if (!rows.empty() && rows.front().epsilon == 0.0) {
        const auto& r = rows.front();
        const bool ones = r.pixel_acc == 1.0 && r.miou == 1.0 && r.pa == 1.0 &&
                          r.macc == 1.0 && r.miou_agg == 1.0 && r.mf1 == 1.0;
        check(ones, "sweep.csv zero-epsilon row is exactly all-ones");
      }
    } catch (const Error& e) {
      check(false, std::string("sweep.csv schema valid: ") + e.what());
    }
  }

  const std::string epoch_path = (fs::path(run_dir) / "epoch_log.csv").string();
  if (fs::exists(epoch_path)) {
    try {
      const CsvTable table = read_csv(epoch_path);
      std::string header;
      for (std::size_t i = 0; i < table.header.size(); ++i) {
        header += (i ? "," : "") + table.header[i];
      }
      check(header == kEpochCsvHeader, "epoch_log.csv header matches schema");
      bool ranges_ok = true;
      for (const auto& cells : table.rows) {
        if (cells.size() != 7) {
          ranges_ok = false;
          break;
        }
        for (int f = 3; f < 7; ++f) {
          const double v = std::stod(cells[f]);
          if (v < 0.0 || v > 1.0) ranges_ok = false;
        }
      }
      check(ranges_ok, "epoch_log.csv metric columns within [0,1]");
    } catch (const std::exception& e) {
      check(false, std::string("epoch_log.csv parse: ") + e.what());
    }
  }

  static const std::set<std::string> kVerdictKeys = {
      "path",      "predicted_class", "confidence", "non_me", "k_density",
      "metric",    "threshold",       "verdict",    "margin"};
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("detections_", 0) != 0 || entry.path().extension() != ".jsonl") continue;
    std::ifstream is(entry.path());
    std::string line;
    bool ok = true;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      try {
        const json j = json::parse(line);
        for (const auto& k : kVerdictKeys) {
          if (!j.contains(k)) ok = false;
        }
      } catch (...) {
        ok = false;
      }
    }
    check(ok, name + ": verdict JSONL schema valid");
  }

  for (const auto& p : report.passes) std::cout << "[PASS] " << p << "\n";
  for (const auto& f : report.failures) std::cout << "[FAIL] " << f << "\n";
  std::cout << "verify: " << report.passes.size() << " passed, " << report.failures.size()
            << " failed\n";
  return report;
}

}  // namespace advdet
