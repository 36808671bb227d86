#include "advdet/harness/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "advdet/metrics/bundle.hpp"

namespace advdet {

namespace {

std::ofstream open_out(const std::string& path) {
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorCode::Io, "cannot open CSV for writing: " + path);
  return os;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_epoch_log_csv(const std::vector<EpochLogRow>& rows, const std::string& path) {
  auto os = open_out(path);
  os << kEpochCsvHeader << "\n";
  for (const auto& r : rows) {
    os << r.epoch << ',' << to_string(r.phase) << ',' << format_number(r.loss) << ','
       << format_number(r.accuracy) << ',' << format_number(r.precision_macro) << ','
       << format_number(r.recall_macro) << ',' << format_number(r.f1_macro) << "\n";
  }
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  auto os = open_out(path);
  os << kSweepCsvHeader << "\n";
  for (const auto& r : rows) {
    os << format_number(r.epsilon) << ',' << format_number(r.pixel_acc) << ','
       << format_number(r.miou) << ',' << format_number(r.pa) << ',' << format_number(r.macc)
       << ',' << format_number(r.miou_agg) << ',' << format_number(r.mf1) << "\n";
  }
}

void write_roc_csv(const std::vector<RocPoint>& points, const std::string& path) {
  auto os = open_out(path);
  os << kRocCsvHeader << "\n";
  for (const auto& p : points) {
    os << format_number(p.fpr) << ',' << format_number(p.tpr) << ','
       << format_number(p.threshold) << "\n";
  }
}

void write_per_class_csv(const ConfusionMatrix& cm, const std::string& path) {
  auto os = open_out(path);
  os << kPerClassCsvHeader << "\n";
  const auto ious = iou_per_class(cm);
  const auto dices = dice_per_class(cm);
  for (int c = 0; c < cm.num_classes(); ++c) {
    const std::int64_t support = cm.row_sum(c);
    std::optional<double> acc;
    if (support > 0) {
      acc = static_cast<double>(cm.counts(c, c)) / static_cast<double>(support);
    }
    auto cell = [](const std::optional<double>& v) {
      return v ? format_number(*v) : std::string("undefined");
    };
    os << c << ',' << cell(ious[c]) << ',' << cell(dices[c]) << ',' << cell(acc) << ','
       << support << "\n";
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorCode::Io, "cannot open CSV: " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = cells;
      first = false;
    } else {
      table.rows.push_back(cells);
    }
  }
  require(!table.header.empty(), ErrorCode::Format, "CSV has no header: " + path);
  return table;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  std::string header;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    header += (i ? "," : "") + table.header[i];
  }
  require(header == kSweepCsvHeader, ErrorCode::Format,
          "unexpected sweep CSV header '" + header + "' in " + path);
  std::vector<SweepRow> rows;
  for (const auto& cells : table.rows) {
    require(cells.size() == 7, ErrorCode::Format, "sweep CSV row has wrong arity in " + path);
    SweepRow r;
    try {
      r.epsilon = std::stod(cells[0]);
      r.pixel_acc = std::stod(cells[1]);
      r.miou = std::stod(cells[2]);
      r.pa = std::stod(cells[3]);
      r.macc = std::stod(cells[4]);
      r.miou_agg = std::stod(cells[5]);
      r.mf1 = std::stod(cells[6]);
    } catch (...) {
      fail(ErrorCode::Format, "non-numeric sweep CSV cell in " + path);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace advdet
