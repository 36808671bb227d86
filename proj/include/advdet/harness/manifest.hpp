#pragma once

#include <map>
#include <string>

namespace advdet {

struct ArtifactRecord {
  std::string path;  // relative to the run directory
  std::string fnv1a64;
};

struct StageRecord {
  std::map<std::string, ArtifactRecord> artifacts;
  double wall_clock_sec = 0.0;
};

/// Per-run ledger of stage artifacts and their content hashes; the input to
/// integrity verification.
struct RunManifest {
  std::string toolkit_version;
  std::string config_hash;
  std::map<std::string, StageRecord> stages;
};

inline constexpr const char* kManifestFileName = "manifest.json";

void save_manifest(const RunManifest& manifest, const std::string& run_dir);

/// Loads run_dir/manifest.json; returns an empty manifest when absent so
/// stages can accrete.
RunManifest load_manifest_or_empty(const std::string& run_dir);
RunManifest load_manifest(const std::string& run_dir);

/// Hashes the artifact file and records it under (stage, key).
void record_artifact(RunManifest& manifest, const std::string& run_dir,
                     const std::string& stage, const std::string& key,
                     const std::string& relative_path);

}  // namespace advdet
