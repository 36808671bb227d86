#include "advdet/detect/reference.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "advdet/core/binio.hpp"

namespace advdet {

namespace {

/// Reservoir sample of up to cap vectors, preserving first-seen order for
/// the kept slots.
std::vector<const Eigen::VectorXd*> reservoir(const std::vector<Eigen::VectorXd>& vecs, int cap,
                                              std::mt19937_64& rng) {
  std::vector<const Eigen::VectorXd*> kept;
  kept.reserve(std::min<std::size_t>(vecs.size(), cap));
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    if (static_cast<int>(kept.size()) < cap) {
      kept.push_back(&vecs[i]);
    } else {
      std::uniform_int_distribution<std::size_t> dist(0, i);
      const std::size_t j = dist(rng);
      if (j < static_cast<std::size_t>(cap)) kept[j] = &vecs[i];
    }
  }
  return kept;
}

}  // namespace

ReferenceSet build_reference_set(const std::map<int, std::vector<Eigen::VectorXd>>& by_class,
                                 const ReferenceBuildOptions& opts) {
  require(opts.max_per_class >= 1, ErrorCode::InvalidArgument,
          "max_per_class must be positive");
  require(!by_class.empty(), ErrorCode::InvalidArgument, "no classes to build references from");

  ReferenceSet ref;
  auto rng = make_rng(opts.seed);
  for (const auto& [cls, vecs] : by_class) {
    require(!vecs.empty(), ErrorCode::InvalidArgument,
            "class " + std::to_string(cls) + " has no feature vectors");
    auto kept = reservoir(vecs, opts.max_per_class, rng);
    Eigen::MatrixXd mat(kept.front()->size(), kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) mat.col(static_cast<Eigen::Index>(i)) = *kept[i];
    ref.per_class.emplace(cls, std::move(mat));
  }

  if (opts.bandwidth_override > 0.0) {
    ref.bandwidth = opts.bandwidth_override;
  } else {
    std::vector<double> dists;
    for (const auto& [cls, mat] : ref.per_class) {
      for (Eigen::Index i = 0; i < mat.cols(); ++i) {
        for (Eigen::Index j = i + 1; j < mat.cols(); ++j) {
          dists.push_back((mat.col(i) - mat.col(j)).norm());
        }
      }
    }
    if (dists.empty()) {
      ref.bandwidth = 1.0;
    } else {
      std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
      ref.bandwidth = std::max(dists[dists.size() / 2], 1e-12);
    }
  }
  ref.validate();
  return ref;
}

void save_reference_set(const ReferenceSet& ref, const std::string& path) {
  ref.validate();
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::Io, "cannot open reference set for writing: " + path);
  const char magic[8] = {'A', 'D', 'V', 'R', 'E', 'F', 'S', '\0'};
  os.write(magic, sizeof(magic));
  write_le<std::uint32_t>(os, 1);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ref.per_class.size()));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ref.feature_dim()));
  write_le<double>(os, ref.bandwidth);
  write_le<std::uint8_t>(os, static_cast<std::uint8_t>(ref.kernel));
  for (int i = 0; i < 3; ++i) write_le<std::uint8_t>(os, 0);
  for (const auto& [cls, mat] : ref.per_class) {
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cls));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(mat.cols()));
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        write_le<float>(os, static_cast<float>(mat(r, c)));
      }
    }
  }
  require(static_cast<bool>(os), ErrorCode::Io, "failed writing reference set: " + path);
}

ReferenceSet load_reference_set(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorCode::Io, "cannot open reference set: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  require(static_cast<bool>(is) && std::memcmp(magic, "ADVREFS\0", 8) == 0, ErrorCode::Format,
          "not a reference-set file: " + path);
  const auto version = read_le<std::uint32_t>(is, "version");
  require(version == 1, ErrorCode::Format, "reference-set version unsupported: " + path);
  const auto n_classes = read_le<std::uint32_t>(is, "class count");
  const auto dim = read_le<std::uint32_t>(is, "feature dim");
  ReferenceSet ref;
  ref.bandwidth = read_le<double>(is, "bandwidth");
  const auto kernel = read_le<std::uint8_t>(is, "kernel id");
  require(kernel == 0, ErrorCode::Format, "unknown kernel id in reference set: " + path);
  ref.kernel = KernelKind::Rbf;
  for (int i = 0; i < 3; ++i) read_le<std::uint8_t>(is, "reserved");
  for (std::uint32_t c = 0; c < n_classes; ++c) {
    const auto cls = read_le<std::uint32_t>(is, "class id");
    const auto count = read_le<std::uint32_t>(is, "vector count");
    Eigen::MatrixXd mat(dim, count);
    for (std::uint32_t v = 0; v < count; ++v) {
      for (std::uint32_t r = 0; r < dim; ++r) {
        mat(r, v) = read_le<float>(is, "reference vector");
      }
    }
    ref.per_class.emplace(static_cast<int>(cls), std::move(mat));
  }
  is.peek();
  require(is.eof(), ErrorCode::Format, "trailing bytes in reference set: " + path);
  ref.validate();
  return ref;
}

}  // namespace advdet
