#include "advdet/core/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

namespace advdet {

namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

ClassificationDataset scan_classification_tree(const std::string& root) {
  require(fs::is_directory(root), ErrorCode::Io, "dataset root is not a directory: " + root);

  std::vector<std::string> class_names;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_names.push_back(entry.path().filename().string());
  }
  std::sort(class_names.begin(), class_names.end());
  require(!class_names.empty(), ErrorCode::Validation,
          "dataset root has no class directories: " + root);

  ClassificationDataset ds;
  ds.class_names = class_names;
  for (int label = 0; label < static_cast<int>(class_names.size()); ++label) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(fs::path(root) / class_names[label])) {
      if (entry.is_regular_file() && is_image_file(entry.path())) {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    for (auto& f : files) {
      ds.entries.push_back({std::move(f), label, class_names[label]});
    }
  }
  require(!ds.entries.empty(), ErrorCode::Validation, "dataset tree has no images: " + root);
  return ds;
}

std::vector<SegmentationPair> scan_segmentation_pairs(const std::string& images_dir,
                                                      const std::string& masks_dir) {
  require(fs::is_directory(images_dir), ErrorCode::Io,
          "images directory missing: " + images_dir);
  require(fs::is_directory(masks_dir), ErrorCode::Io, "masks directory missing: " + masks_dir);

  std::map<std::string, std::string> masks;
  for (const auto& entry : fs::directory_iterator(masks_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      masks[entry.path().stem().string()] = entry.path().string();
    }
  }

  std::vector<SegmentationPair> pairs;
  std::vector<std::string> missing;
  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(images_dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) images.push_back(entry.path());
  }
  std::sort(images.begin(), images.end());
  for (const auto& img : images) {
    auto it = masks.find(img.stem().string());
    if (it == masks.end()) {
      missing.push_back(img.string());
      continue;
    }
    pairs.push_back({img.string(), it->second});
  }
  require(missing.empty(), ErrorCode::Validation,
          "images without matching masks, first: " + (missing.empty() ? "" : missing.front()));
  require(!pairs.empty(), ErrorCode::Validation, "no image/mask pairs found");
  return pairs;
}

}  // namespace advdet
