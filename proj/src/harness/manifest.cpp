#include "advdet/harness/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "advdet/common.hpp"
#include "advdet/core/hash.hpp"

namespace advdet {

namespace fs = std::filesystem;
using nlohmann::json;

void save_manifest(const RunManifest& manifest, const std::string& run_dir) {
  json j;
  j["toolkit_version"] = manifest.toolkit_version;
  j["config_hash"] = manifest.config_hash;
  j["stages"] = json::object();
  for (const auto& [stage, record] : manifest.stages) {
    json s;
    s["wall_clock_sec"] = record.wall_clock_sec;
    s["artifacts"] = json::object();
    for (const auto& [key, artifact] : record.artifacts) {
      s["artifacts"][key] = {{"path", artifact.path}, {"fnv1a64", artifact.fnv1a64}};
    }
    j["stages"][stage] = s;
  }
  fs::create_directories(run_dir);
  const std::string path = (fs::path(run_dir) / kManifestFileName).string();
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorCode::Io, "cannot write manifest: " + path);
  os << j.dump(2) << "\n";
}

RunManifest load_manifest(const std::string& run_dir) {
  const std::string path = (fs::path(run_dir) / kManifestFileName).string();
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorCode::Io, "manifest not found: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::Format, "malformed manifest " + path + ": " + e.what());
  }
  RunManifest manifest;
  manifest.toolkit_version = j.value("toolkit_version", "");
  manifest.config_hash = j.value("config_hash", "");
  if (j.contains("stages")) {
    for (const auto& [stage, s] : j["stages"].items()) {
      StageRecord record;
      record.wall_clock_sec = s.value("wall_clock_sec", 0.0);
      if (s.contains("artifacts")) {
        for (const auto& [key, a] : s["artifacts"].items()) {
          record.artifacts[key] = {a.value("path", ""), a.value("fnv1a64", "")};
        }
      }
      manifest.stages[stage] = record;
    }
  }
  return manifest;
}

RunManifest load_manifest_or_empty(const std::string& run_dir) {
  if (!fs::exists(fs::path(run_dir) / kManifestFileName)) {
    RunManifest manifest;
    manifest.toolkit_version = kToolkitVersion;
    return manifest;
  }
  return load_manifest(run_dir);
}

void record_artifact(RunManifest& manifest, const std::string& run_dir,
                     const std::string& stage, const std::string& key,
                     const std::string& relative_path) {
  const std::string full = (fs::path(run_dir) / relative_path).string();
  manifest.stages[stage].artifacts[key] = {relative_path, to_hex(fnv1a64_file(full))};
}

}  // namespace advdet
