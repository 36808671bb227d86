#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "advdet/common.hpp"
#include "advdet/core/rng.hpp"

namespace advdet {

enum class KernelKind : std::uint8_t { Rbf = 0 };

/// Per-class bank of clean feature vectors backing the kernel-density
/// score. Immutable after construction.
struct ReferenceSet {
  std::map<int, Eigen::MatrixXd> per_class;  // D x N_c, one column per reference vector
  double bandwidth = 1.0;
  KernelKind kernel = KernelKind::Rbf;

  void validate() const {
    require(bandwidth > 0.0, ErrorCode::Validation, "reference bandwidth must be positive");
    require(!per_class.empty(), ErrorCode::Validation, "reference set has no classes");
    Eigen::Index dim = -1;
    for (const auto& [cls, mat] : per_class) {
      require(mat.cols() >= 1, ErrorCode::Validation,
              "reference class " + std::to_string(cls) + " has no vectors");
      require(dim < 0 || mat.rows() == dim, ErrorCode::Validation,
              "reference set mixes feature dimensions");
      dim = mat.rows();
    }
  }

  int feature_dim() const {
    return per_class.empty() ? 0 : static_cast<int>(per_class.begin()->second.rows());
  }
};

struct ReferenceBuildOptions {
  int max_per_class = 200;       // reservoir-sampled cap
  std::uint64_t seed = 0;
  double bandwidth_override = 0.0;  // <= 0: median within-class pairwise distance
};

/// Builds the per-class bank from clean features grouped by class. The
/// default bandwidth is the median of within-class pairwise distances pooled
/// over all classes (falls back to 1 when no class has two vectors).
ReferenceSet build_reference_set(const std::map<int, std::vector<Eigen::VectorXd>>& by_class,
                                 const ReferenceBuildOptions& opts);

// Versioned binary container:
//   magic "ADVREFS\0", u32 version 1, u32 class count, u32 feature dim,
//   f64 bandwidth, u8 kernel id, u8[3] reserved,
//   per class: u32 class id, u32 count, f32 data[count * dim] column-major.
void save_reference_set(const ReferenceSet& ref, const std::string& path);
ReferenceSet load_reference_set(const std::string& path);

}  // namespace advdet
