#pragma once

#include <string>
#include <vector>

#include "advdet/attack/sweep.hpp"
#include "advdet/detect/roc.hpp"
#include "advdet/model/train.hpp"

namespace advdet {

inline constexpr const char* kEpochCsvHeader =
    "epoch,phase,loss,accuracy,precision_macro,recall_macro,f1_macro";
inline constexpr const char* kRocCsvHeader = "fpr,tpr,threshold";
inline constexpr const char* kPerClassCsvHeader = "class_id,iou,dice,accuracy,support";

/// Numbers are written with enough digits to round-trip a double within the
/// toolkit's 1e-6 reproducibility contract; report renderers do any rounding.
std::string format_number(double v);

void write_epoch_log_csv(const std::vector<EpochLogRow>& rows, const std::string& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);
void write_roc_csv(const std::vector<RocPoint>& points, const std::string& path);
void write_per_class_csv(const ConfusionMatrix& cm, const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Minimal reader for the toolkit's own unquoted comma CSVs.
CsvTable read_csv(const std::string& path);

std::vector<SweepRow> parse_sweep_csv(const std::string& path);

}  // namespace advdet
