#include "affordlab/harness/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace affordlab::harness {

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> columns{
      "phase",          "update",          "env_steps",     "env_time",
      "mean_return",    "episodes",        "success_button", "success_slider",
      "success_deceptive", "p_press",      "p_slide",       "probe_success",
      "policy_loss",    "value_loss",      "entropy",       "kl",
      "clip_frac"};
  return columns;
}

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", *v);
  return buf;
}

std::string cell(double v) { return cell(std::optional<double>(v)); }

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> optional_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::runtime_error("bad number '" + text + "'");
  return v;
}

}  // namespace

std::string format_row(const MetricRow& r) {
  return join({std::to_string(r.phase), std::to_string(r.update), std::to_string(r.env_steps),
               cell(r.env_time), cell(r.mean_return), std::to_string(r.episodes),
               cell(r.success_button), cell(r.success_slider), cell(r.success_deceptive),
               cell(r.p_press), cell(r.p_slide), cell(r.probe_success), cell(r.policy_loss),
               cell(r.value_loss), cell(r.entropy), cell(r.kl), cell(r.clip_frac)});
}

MetricWriter::MetricWriter(const std::filesystem::path& path, const std::string& provenance)
    : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path);
  std::filesystem::path timing_path = path;
  timing_path.replace_extension(".timing.csv");
  timing_.open(timing_path);
  if (!out_ || !timing_) throw std::runtime_error("cannot write metrics " + path.string());
  out_ << "# provenance: " << provenance << '\n' << join(metric_columns()) << '\n';
  timing_ << "# provenance: " << provenance << '\n' << "update,wall_seconds\n";
  out_.flush();
  timing_.flush();
}

void MetricWriter::write(const MetricRow& row, double wall_seconds) {
  out_ << format_row(row) << '\n';
  timing_ << row.update << ',' << cell(wall_seconds) << '\n';
  out_.flush();
  timing_.flush();
  if (!out_ || !timing_) throw std::runtime_error("failed writing metrics " + path_.string());
}

void MetricWriter::close() {
  out_.close();
  timing_.close();
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line);
    if (!have_header) {
      table.columns = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(table.columns.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw std::runtime_error(path.string() + ": missing CSV header");
  return table;
}

void require_columns(const CsvTable& table, const std::vector<std::string>& required,
                     const std::string& what) {
  std::vector<std::string> missing;
  for (const auto& c : required) {
    if (table.column(c) < 0) missing.push_back(c);
  }
  if (missing.empty()) return;
  std::string msg = what + ": schema mismatch; missing columns: ";
  for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
  msg += "; found columns: ";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    msg += (i ? ", " : "") + table.columns[i];
  }
  throw std::runtime_error(msg);
}

std::vector<MetricRow> read_metrics(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  require_columns(table, metric_columns(), path.string());
  std::vector<int> idx;
  for (const auto& c : metric_columns()) idx.push_back(table.column(c));
  std::vector<MetricRow> rows;
  for (const auto& f : table.rows) {
    auto at = [&](int k) -> const std::string& { return f[static_cast<std::size_t>(idx[k])]; };
    MetricRow r;
    r.phase = std::stoi(at(0));
    r.update = std::stoi(at(1));
    r.env_steps = std::stoll(at(2));
    r.env_time = optional_number(at(3)).value_or(0.0);
    r.mean_return = optional_number(at(4));
    r.episodes = std::stoi(at(5));
    r.success_button = optional_number(at(6));
    r.success_slider = optional_number(at(7));
    r.success_deceptive = optional_number(at(8));
    r.p_press = optional_number(at(9));
    r.p_slide = optional_number(at(10));
    r.probe_success = optional_number(at(11));
    r.policy_loss = optional_number(at(12));
    r.value_loss = optional_number(at(13));
    r.entropy = optional_number(at(14));
    r.kl = optional_number(at(15));
    r.clip_frac = optional_number(at(16));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace affordlab::harness
