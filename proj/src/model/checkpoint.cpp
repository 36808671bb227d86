#include "advdet/model/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "advdet/core/binio.hpp"

namespace advdet {

namespace {

void write_norm(std::ostream& os, const NormSpec& norm) {
  for (double m : norm.mean) write_le<float>(os, static_cast<float>(m));
  for (double s : norm.std) write_le<float>(os, static_cast<float>(s));
}

NormSpec read_norm(std::istream& is) {
  NormSpec norm;
  for (double& m : norm.mean) m = read_le<float>(is, "norm mean");
  for (double& s : norm.std) s = read_le<float>(is, "norm std");
  norm.validate();
  return norm;
}

}  // namespace

void save_checkpoint(const ClassifierModel<float>& model, const TrainConfig& cfg,
                     const std::string& path) {
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::Io, "cannot open checkpoint for writing: " + path);

  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_le<std::uint32_t>(os, kCheckpointVersion);
  write_le<std::uint8_t>(os, static_cast<std::uint8_t>(model.backbone->id()));
  for (int i = 0; i < 3; ++i) write_le<std::uint8_t>(os, 0);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.num_classes()));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.feature_dim()));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.input_size));
  write_norm(os, model.norm);
  write_le<float>(os, static_cast<float>(cfg.learning_rate));
  write_le<float>(os, static_cast<float>(cfg.momentum));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.batch_size));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.epochs));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.num_classes));
  write_le<std::uint64_t>(os, cfg.rng_seed);
  write_le<std::uint64_t>(os, model.backbone->init_seed());
  write_le<std::uint64_t>(os, model.head_seed);
  write_string(os, model.backbone->weights_ref());

  const bool tiny = model.backbone->id() == BackboneId::TinyCnn;
  if (tiny) {
    const auto& tc = model.backbone->tiny_config();
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(tc.in_channels));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(tc.widths.size()));
    for (int w : tc.widths) write_le<std::uint32_t>(os, static_cast<std::uint32_t>(w));
    const auto params = model.backbone->params();
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
      write_string(os, p.name);
      write_le<std::uint64_t>(os, static_cast<std::uint64_t>(p.size));
      write_f32_array(os, p.data, static_cast<std::size_t>(p.size));
    }
  } else {
    write_le<std::uint32_t>(os, 0);
    write_le<std::uint32_t>(os, 0);
    write_le<std::uint32_t>(os, 0);
  }

  write_f32_array(os, model.head.weight.data(), static_cast<std::size_t>(model.head.weight.size()));
  write_f32_array(os, model.head.bias.data(), static_cast<std::size_t>(model.head.bias.size()));
  require(static_cast<bool>(os), ErrorCode::Io, "failed writing checkpoint: " + path);
}

ClassifierModel<float> load_checkpoint(const std::string& path,
                                       std::optional<BackboneId> expected_backbone,
                                       TrainConfig* cfg_out) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorCode::Io, "cannot open checkpoint: " + path);

  char magic[8];
  is.read(magic, sizeof(magic));
  require(static_cast<bool>(is) && std::memcmp(magic, kCheckpointMagic, 8) == 0,
          ErrorCode::Format, "not a checkpoint file (bad magic): " + path);
  const auto version = read_le<std::uint32_t>(is, "version");
  require(version == kCheckpointVersion, ErrorCode::Format,
          "checkpoint format version " + std::to_string(version) + " unsupported (expected " +
              std::to_string(kCheckpointVersion) + "): " + path);

  const auto backbone_byte = read_le<std::uint8_t>(is, "backbone id");
  require(backbone_byte <= 2, ErrorCode::Format, "invalid backbone id in header: " + path);
  const auto backbone_id = static_cast<BackboneId>(backbone_byte);
  require(!expected_backbone || *expected_backbone == backbone_id, ErrorCode::Format,
          "checkpoint declares backbone " + to_string(backbone_id) + ", expected " +
              to_string(expected_backbone.value_or(backbone_id)) + ": " + path);
  for (int i = 0; i < 3; ++i) read_le<std::uint8_t>(is, "reserved");

  const auto num_classes = read_le<std::uint32_t>(is, "num_classes");
  const auto feature_dim = read_le<std::uint32_t>(is, "feature_dim");
  const auto input_size = read_le<std::uint32_t>(is, "input_size");
  const NormSpec norm = read_norm(is);

  TrainConfig cfg;
  cfg.learning_rate = read_le<float>(is, "learning_rate");
  cfg.momentum = read_le<float>(is, "momentum");
  cfg.batch_size = static_cast<int>(read_le<std::uint32_t>(is, "batch_size"));
  cfg.epochs = static_cast<int>(read_le<std::uint32_t>(is, "epochs"));
  cfg.num_classes = static_cast<int>(read_le<std::uint32_t>(is, "cfg num_classes"));
  cfg.rng_seed = read_le<std::uint64_t>(is, "train seed");
  const auto init_seed = read_le<std::uint64_t>(is, "init seed");
  const auto head_seed = read_le<std::uint64_t>(is, "head seed");
  const std::string weights_ref = read_string(is, "weights_ref");

  TinyCnnConfig tiny_cfg;
  const auto tiny_in = read_le<std::uint32_t>(is, "tiny in_channels");
  const auto tiny_n = read_le<std::uint32_t>(is, "tiny width count");
  tiny_cfg.widths.clear();
  for (std::uint32_t i = 0; i < tiny_n; ++i) {
    tiny_cfg.widths.push_back(static_cast<int>(read_le<std::uint32_t>(is, "tiny width")));
  }
  if (tiny_in > 0) tiny_cfg.in_channels = static_cast<int>(tiny_in);

  ClassifierModel<float> model;
  std::shared_ptr<Backbone<float>> backbone;
  if (backbone_id == BackboneId::TinyCnn) {
    require(tiny_in > 0 && tiny_n > 0, ErrorCode::Format,
            "tiny-cnn checkpoint missing block widths: " + path);
    backbone = make_tiny_cnn<float>(tiny_cfg, init_seed);
  } else {
    require(tiny_n == 0, ErrorCode::Format,
            "resnet checkpoint unexpectedly carries tiny-cnn widths: " + path);
    backbone = make_resnet<float>(backbone_id, init_seed);
  }
  require(backbone->feature_dim() == static_cast<int>(feature_dim), ErrorCode::Format,
          "feature_dim " + std::to_string(feature_dim) + " in header does not match backbone " +
              to_string(backbone_id) + ": " + path);

  const auto n_tensors = read_le<std::uint32_t>(is, "tensor count");
  if (backbone_id == BackboneId::TinyCnn) {
    auto params = backbone->params();
    std::map<std::string, ParamRef<float>*> by_name;
    for (auto& p : params) by_name[p.name] = &p;
    require(n_tensors == params.size(), ErrorCode::Format,
            "embedded tensor count mismatch: " + path);
    for (std::uint32_t i = 0; i < n_tensors; ++i) {
      const std::string name = read_string(is, "tensor name");
      const auto numel = read_le<std::uint64_t>(is, "tensor numel");
      auto it = by_name.find(name);
      require(it != by_name.end(), ErrorCode::Format, "unknown tensor '" + name + "': " + path);
      require(numel == static_cast<std::uint64_t>(it->second->size), ErrorCode::Format,
              "tensor '" + name + "' has wrong element count: " + path);
      read_f32_array(is, it->second->data, static_cast<std::size_t>(numel), name);
    }
  } else {
    require(n_tensors == 0, ErrorCode::Format,
            "resnet checkpoints must reference external weights, not embed them: " + path);
    if (!weights_ref.empty()) {
      std::filesystem::path ref(weights_ref);
      if (ref.is_relative()) ref = std::filesystem::path(path).parent_path() / ref;
      load_named_tensors_into(backbone->params(), ref.string());
      backbone->set_weights_ref(weights_ref);
    }
  }
  model.backbone = backbone;

  model.head.weight.resize(num_classes, feature_dim);
  model.head.bias.resize(num_classes);
  read_f32_array(is, model.head.weight.data(),
                 static_cast<std::size_t>(model.head.weight.size()), "head weight");
  read_f32_array(is, model.head.bias.data(), static_cast<std::size_t>(model.head.bias.size()),
                 "head bias");
  is.peek();
  require(is.eof(), ErrorCode::Format, "trailing bytes after checkpoint payload: " + path);

  model.norm = norm;
  model.input_size = static_cast<int>(input_size);
  model.head_seed = head_seed;
  if (cfg_out) *cfg_out = cfg;
  return model;
}

std::uint64_t checkpoint_size_bytes(const ClassifierModel<float>& model) {
  std::uint64_t size = 0;
  size += 8 + 4;            // magic + version
  size += 4;                // backbone id + reserved
  size += 4 + 4 + 4;        // num_classes, feature_dim, input_size
  size += 6 * 4;            // norm
  size += 4 + 4 + 4 + 4 + 4 + 8;  // train config
  size += 8 + 8;            // init seed + head seed
  size += 4 + model.backbone->weights_ref().size();
  size += 4 + 4;            // tiny in_channels + width count
  if (model.backbone->id() == BackboneId::TinyCnn) {
    size += 4ULL * model.backbone->tiny_config().widths.size();
    size += 4;  // tensor count
    for (const auto& p : model.backbone->params()) {
      size += 4 + p.name.size() + 8 + 4ULL * static_cast<std::uint64_t>(p.size);
    }
  } else {
    size += 4;  // tensor count (zero)
  }
  size += 4ULL * static_cast<std::uint64_t>(model.head.weight.size());
  size += 4ULL * static_cast<std::uint64_t>(model.head.bias.size());
  return size;
}

void save_named_tensors(const std::vector<ParamRef<float>>& params, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::Io, "cannot open weights file for writing: " + path);
  const char magic[8] = {'A', 'D', 'V', 'W', 'T', 'S', '\0', '\0'};
  os.write(magic, sizeof(magic));
  write_le<std::uint32_t>(os, 1);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    write_string(os, p.name);
    write_le<std::uint32_t>(os, 1);
    write_le<std::uint64_t>(os, static_cast<std::uint64_t>(p.size));
    write_f32_array(os, p.data, static_cast<std::size_t>(p.size));
  }
  require(static_cast<bool>(os), ErrorCode::Io, "failed writing weights file: " + path);
}

void load_named_tensors_into(const std::vector<ParamRef<float>>& params,
                             const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorCode::Io, "cannot open weights file: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  require(static_cast<bool>(is) && std::memcmp(magic, "ADVWTS\0\0", 8) == 0, ErrorCode::Format,
          "not a named-tensor weights file: " + path);
  const auto version = read_le<std::uint32_t>(is, "weights version");
  require(version == 1, ErrorCode::Format, "weights file version unsupported: " + path);
  const auto count = read_le<std::uint32_t>(is, "tensor count");

  std::map<std::string, const ParamRef<float>*> by_name;
  for (const auto& p : params) by_name[p.name] = &p;
  std::size_t filled = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = read_string(is, "tensor name");
    const auto ndim = read_le<std::uint32_t>(is, "tensor ndim");
    std::uint64_t numel = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      numel *= read_le<std::uint64_t>(is, "tensor dim");
    }
    auto it = by_name.find(name);
    require(it != by_name.end(), ErrorCode::Format,
            "weights file names unknown tensor '" + name + "': " + path);
    require(numel == static_cast<std::uint64_t>(it->second->size), ErrorCode::Format,
            "tensor '" + name + "' element count mismatch: " + path);
    read_f32_array(is, it->second->data, static_cast<std::size_t>(numel), name);
    ++filled;
  }
  require(filled == params.size(), ErrorCode::Format,
          "weights file is missing " + std::to_string(params.size() - filled) +
              " tensors: " + path);
}

}  // namespace advdet
