#include "pvgp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "pvgp/csv.hpp"
#include "pvgp/error.hpp"

namespace pvgp {

namespace {

std::string fixed2(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string csv_number(double v) {
  return std::isfinite(v) ? format_double(v) : "";
}

std::string patch_label(int px) {
  return std::to_string(px) + "x" + std::to_string(px);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

const CellResult* find_cell(const ReportRow& row, SystemId id) {
  for (const auto& c : row.cells)
    if (c.system_id == id) return &c;
  return nullptr;
}

std::string render(const std::vector<std::vector<std::string>>& table) {
  std::vector<std::size_t> width;
  for (const auto& line : table) {
    if (width.size() < line.size()) width.resize(line.size(), 0);
    for (std::size_t i = 0; i < line.size(); ++i)
      width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::string text;
    for (std::size_t i = 0; i < table[r].size(); ++i) {
      if (i) text += " | ";
      text += table[r][i];
      if (i + 1 < table[r].size())
        text += std::string(width[i] - table[r][i].size(), ' ');
    }
    out += text + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < width.size(); ++i) total += width[i] + (i ? 3 : 0);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

std::string cell_text(const CellResult* cell) {
  if (!cell) return "";
  return cell->ok ? fixed2(cell->mae) : "FAILED";
}

}  // namespace

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "row,block,training_days,patch_px,kernel,horizon,cloud_mode";
  for (SystemId id : report.systems) out << ",system_" << id;
  out << ",average_mae_w,failed,failures\n";
  for (const ReportRow& row : report.rows) {
    const ExperimentConfig& c = row.config;
    out << row.key << ',' << sanitize(c.block) << ',' << c.training_days << ','
        << c.patch_px << ',' << sanitize(kernel_label(c.kernel)) << ','
        << horizon_label(c.horizon) << ',' << cloud_mode_label(c.cloud_mode);
    std::string failures;
    for (SystemId id : report.systems) {
      const CellResult* cell = find_cell(row, id);
      out << ',';
      if (!cell) continue;
      if (cell->ok) {
        out << format_double(cell->mae);
      } else {
        out << "FAILED";
        failures += (failures.empty() ? "" : "; ") + std::to_string(id) + ": " +
                    sanitize(cell->failure);
      }
    }
    out << ',' << csv_number(row.average_mae) << ',' << row.failed << ','
        << failures << '\n';
  }
  return out.str();
}

std::string day_samples_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "row,system_id,forecast_start_utc,time_index,mae_w,mae_daylight_w\n";
  for (const ReportRow& row : report.rows)
    for (const CellResult& cell : row.cells)
      for (const DaySample& d : cell.days)
        out << row.key << ',' << cell.system_id << ','
            << format_utc(index_to_timestamp(d.start, report.epoch)) << ','
            << d.start.value << ',' << format_double(d.mae) << ','
            << csv_number(d.mae_daylight) << '\n';
  return out.str();
}

std::string render_config_table(const ExperimentReport& report) {
  std::vector<std::vector<std::string>> t;
  std::vector<std::string> head{"Training Period", "Sky Coverage",
                                "Kernel Structure"};
  for (SystemId id : report.systems) head.push_back("System " + std::to_string(id));
  head.push_back("Average (MAE)");
  t.push_back(head);
  for (const ReportRow& row : report.rows) {
    const ExperimentConfig& c = row.config;
    std::vector<std::string> line{training_period_label(c.training_days),
                                  patch_label(c.patch_px) + " pixels",
                                  kernel_label(c.kernel)};
    for (SystemId id : report.systems) line.push_back(cell_text(find_cell(row, id)));
    line.push_back(fixed2(row.average_mae));
    t.push_back(line);
  }
  std::string title = report.title.empty() ? "" : report.title + "\n";
  return title + render(t);
}

std::string render_system_table(const ExperimentReport& report) {
  std::vector<std::vector<std::string>> t;
  std::vector<std::string> head{"System Number"};
  for (const ReportRow& row : report.rows) {
    const ExperimentConfig& c = row.config;
    head.push_back((c.cloud_mode == CloudMode::Given ? "With Cloud "
                                                     : "Without Cloud ") +
                   patch_label(c.patch_px));
  }
  t.push_back(head);
  for (SystemId id : report.systems) {
    std::vector<std::string> line{std::to_string(id)};
    for (const ReportRow& row : report.rows)
      line.push_back(cell_text(find_cell(row, id)));
    t.push_back(line);
  }
  std::vector<std::string> avg{"Average"};
  for (const ReportRow& row : report.rows) avg.push_back(fixed2(row.average_mae));
  t.push_back(avg);
  std::string title = report.title.empty() ? "" : report.title + "\n";
  return title + render(t);
}

std::vector<DaySampleRecord> day_sample_records(const ExperimentReport& report) {
  std::vector<DaySampleRecord> out;
  for (const ReportRow& row : report.rows)
    for (const CellResult& cell : row.cells)
      for (const DaySample& d : cell.days)
        out.push_back({row.key, cell.system_id, d.start.value, d.mae, d.mae_daylight});
  return out;
}

std::vector<DaySampleRecord> read_day_samples_csv(const std::filesystem::path& path) {
  CsvReader reader(path);
  reader.expect_header({"row", "system_id", "forecast_start_utc", "time_index",
                        "mae_w", "mae_daylight_w"});
  std::vector<DaySampleRecord> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    DaySampleRecord r;
    long long id = 0, idx = 0;
    bool ok = f.size() == 6 && !f[0].empty() && parse_int64(f[1], id) &&
              parse_int64(f[3], idx) && parse_double(f[4], r.mae);
    if (ok && f[5].empty()) {
      r.mae_daylight = std::numeric_limits<double>::quiet_NaN();
    } else if (ok) {
      ok = parse_double(f[5], r.mae_daylight);
    }
    if (!ok)
      throw DataError(reader.source() + ":" + std::to_string(reader.line()) +
                      ": malformed day sample row");
    r.row = f[0];
    r.system_id = id;
    r.time_index = idx;
    out.push_back(std::move(r));
  }
  return out;
}

BoxPlotData boxplot_from_samples(const std::vector<DaySampleRecord>& samples,
                                 BoxGroupBy group_by) {
  std::vector<std::string> order;
  std::map<std::string, std::map<std::string, std::vector<double>>> rows;
  for (const DaySampleRecord& s : samples) {
    if (!rows.contains(s.row)) order.push_back(s.row);
    const std::string name =
        group_by == BoxGroupBy::System
            ? "system " + std::to_string(s.system_id)
            : "day " + std::to_string(s.time_index / kStepsPerDay);
    rows[s.row][name].push_back(s.mae);
  }
  BoxPlotData out;
  for (const std::string& row : order)
    for (auto& [name, values] : rows[row]) {
      if (values.empty()) {
        out.warnings.push_back("row " + row + " group '" + name +
                               "' has no samples; omitted");
        continue;
      }
      out.groups.push_back({row, name, box_summary(std::move(values))});
    }
  return out;
}

BoxPlotData export_boxplot_data(const ExperimentReport& report,
                                BoxGroupBy group_by) {
  BoxPlotData out = boxplot_from_samples(day_sample_records(report), group_by);
  // Cells that produced no launch at all still deserve a warning.
  for (const ReportRow& row : report.rows)
    for (const CellResult& cell : row.cells)
      if (cell.days.empty())
        out.warnings.push_back("row " + row.key + " system " +
                               std::to_string(cell.system_id) +
                               " has no samples; omitted");
  return out;
}

std::string boxplot_csv(const BoxPlotData& data) {
  std::ostringstream out;
  out << "row,group,n,min,q1,median,q3,max,lower_whisker,upper_whisker,outliers\n";
  for (const BoxGroup& g : data.groups) {
    const BoxSummary& b = g.box;
    out << g.row << ',' << sanitize(g.group) << ',' << b.count << ','
        << format_double(b.min) << ',' << format_double(b.q1) << ','
        << format_double(b.median) << ',' << format_double(b.q3) << ','
        << format_double(b.max) << ',' << format_double(b.lower_whisker) << ','
        << format_double(b.upper_whisker) << ',';
    for (std::size_t i = 0; i < b.outliers.size(); ++i)
      out << (i ? ";" : "") << format_double(b.outliers[i]);
    out << '\n';
  }
  return out.str();
}

std::vector<PredictionRow> prediction_rows(const ForecastResult& forecast,
                                           UtcTime epoch) {
  const Vector sd = forecast.prediction.stddev();
  std::vector<PredictionRow> rows;
  for (Eigen::Index k = 0; k < forecast.query.rows(); ++k) {
    const auto idx = static_cast<std::int64_t>(forecast.query(k, 0));
    rows.push_back({idx, index_to_timestamp(TimeIndex{idx}, epoch),
                    forecast.clamped_mean(k), sd(k)});
  }
  return rows;
}

std::string prediction_csv(const std::vector<PredictionRow>& rows) {
  std::ostringstream out;
  out << "time_index,timestamp_utc,mean_w,sd_w\n";
  for (const auto& r : rows)
    out << r.time_index << ',' << format_utc(r.timestamp) << ','
        << format_double(r.mean_w) << ',' << format_double(r.sd_w) << '\n';
  return out.str();
}

std::vector<PredictionRow> read_prediction_csv(const std::filesystem::path& path) {
  CsvReader reader(path);
  reader.expect_header({"time_index", "timestamp_utc", "mean_w", "sd_w"});
  std::vector<PredictionRow> rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    PredictionRow r;
    long long idx = 0;
    if (f.size() != 4 || !parse_int64(f[0], idx) || !parse_double(f[2], r.mean_w) ||
        !parse_double(f[3], r.sd_w))
      throw DataError(reader.source() + ":" + std::to_string(reader.line()) +
                      ": malformed prediction row");
    r.time_index = idx;
    r.timestamp = parse_utc(f[1]);
    rows.push_back(r);
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace pvgp
