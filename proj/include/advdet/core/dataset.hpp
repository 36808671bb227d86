#pragma once

#include <string>
#include <vector>

#include "advdet/core/image.hpp"

namespace advdet {

struct DatasetEntry {
  std::string path;
  int label = -1;
  std::string class_name;
};

/// Classification layout: root/<class_name>/<image files>. Class ids follow
/// the lexicographic order of the class directory names; files are sorted
/// within each class so scans are deterministic.
struct ClassificationDataset {
  std::vector<DatasetEntry> entries;
  std::vector<std::string> class_names;

  int num_classes() const { return static_cast<int>(class_names.size()); }
};

ClassificationDataset scan_classification_tree(const std::string& root);

/// Segmentation layout: paired images/ and masks/ directories with identical
/// stems (images are PNG/JPEG, masks single-channel PNG).
struct SegmentationPair {
  std::string image_path;
  std::string mask_path;
};

std::vector<SegmentationPair> scan_segmentation_pairs(const std::string& images_dir,
                                                      const std::string& masks_dir);

}  // namespace advdet
