#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace affordlab::harness {

// One row of a phase metric log. Absent values are written as empty cells.
struct MetricRow {
  int phase = 1;
  int update = 0;
  long long env_steps = 0;
  double env_time = 0.0;
  std::optional<double> mean_return;
  int episodes = 0;
  std::optional<double> success_button;
  std::optional<double> success_slider;
  std::optional<double> success_deceptive;
  std::optional<double> p_press;
  std::optional<double> p_slide;
  std::optional<double> probe_success;
  std::optional<double> policy_loss;
  std::optional<double> value_loss;
  std::optional<double> entropy;
  std::optional<double> kl;
  std::optional<double> clip_frac;
};

const std::vector<std::string>& metric_columns();

// Streams rows to a CSV file: provenance comment, header, then rows. Wall
// clock time goes to a companion file so the metric file itself depends only
// on configuration and seeds.
class MetricWriter {
 public:
  MetricWriter(const std::filesystem::path& path, const std::string& provenance);
  void write(const MetricRow& row, double wall_seconds);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::ofstream timing_;
};

std::string format_row(const MetricRow& row);

// Generic CSV table: '#' lines are skipped, the first other line is the header.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // index of `name`, or -1
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Throws std::runtime_error listing the columns of `required` absent from
// `table` (and the columns it does have).
void require_columns(const CsvTable& table, const std::vector<std::string>& required,
                     const std::string& what);

std::vector<MetricRow> read_metrics(const std::filesystem::path& path);

}  // namespace affordlab::harness
