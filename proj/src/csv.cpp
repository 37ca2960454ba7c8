#include "betashap/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "betashap/error.hpp"

namespace betashap {

namespace {

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail_cell(std::string_view source, std::size_t row, std::string_view column,
                            std::string_view text, std::string_view why) {
  std::ostringstream msg;
  msg << source << ": row " << row << ", column '" << column << "': " << why << " ('" << text
      << "')";
  throw Error(ErrorKind::parse_error, msg.str());
}

double parse_number(std::string_view text, std::string_view source, std::size_t row,
                    std::string_view column) {
  const std::string_view cell = trim(text);
  if (!cell.empty() && cell.front() == '+') return parse_number(cell.substr(1), source, row, column);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || end != cell.data() + cell.size() || cell.empty()) {
    fail_cell(source, row, column, cell, "not a number");
  }
  if (!std::isfinite(value)) fail_cell(source, row, column, cell, "non-finite value");
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

Dataset parse_csv(std::istream& in, const CsvSchema& schema, std::string_view source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::parse_error, std::string(source) + ": missing header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header;
  for (auto cell : split_row(line)) header.emplace_back(trim(cell));

  std::optional<std::size_t> label_col;
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.label_column) {
      label_col = c;
    } else {
      feature_cols.push_back(c);
      feature_names.push_back(header[c]);
    }
  }
  if (!label_col) {
    throw Error(ErrorKind::schema_mismatch,
                std::string(source) + ": no label column '" + schema.label_column + "'");
  }
  if (feature_cols.empty()) {
    throw Error(ErrorKind::schema_mismatch, std::string(source) + ": no feature columns");
  }

  std::vector<double> features;
  std::vector<double> labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      std::ostringstream msg;
      msg << source << ": row " << row << " has " << cells.size() << " cells, header has "
          << header.size();
      throw Error(ErrorKind::schema_mismatch, msg.str());
    }
    for (std::size_t c : feature_cols) features.push_back(parse_number(cells[c], source, row, header[c]));
    labels.push_back(parse_number(cells[*label_col], source, row, header[*label_col]));
  }

  LabelKind kind = LabelKind::binary;
  if (schema.label_kind) {
    kind = *schema.label_kind;
  } else {
    for (double y : labels) {
      if (y != 0.0 && y != 1.0) kind = LabelKind::real;
    }
  }
  if (kind == LabelKind::binary) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != 0.0 && labels[i] != 1.0) {
        fail_cell(source, i + 1, schema.label_column, format_double(labels[i]),
                  "binary label must be 0 or 1");
      }
    }
  }
  return Dataset::with_row_ids(feature_cols.size(), std::move(features), std::move(labels), kind,
                               std::move(feature_names));
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  auto in = open_input(path);
  return parse_csv(in, schema, path.string());
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (const auto& name : data.feature_names()) out << name << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double x : data.row(i)) out << format_double(x) << ',';
    out << format_double(data.label(i)) << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  write_csv(out, data);
  if (!out) throw Error(ErrorKind::io_error, "failed writing " + path.string());
}

ValueVector load_values_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse_error, source + ": missing header row");
  std::optional<std::size_t> id_col;
  std::optional<std::size_t> value_col;
  const auto header = split_row(line);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (trim(header[c]) == "id") id_col = c;
    if (trim(header[c]) == "value") value_col = c;
  }
  if (!id_col || !value_col) {
    throw Error(ErrorKind::schema_mismatch, source + ": values file needs 'id' and 'value' columns");
  }
  ValueVector out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::schema_mismatch, source + ": ragged row " + std::to_string(row));
    }
    const double id = parse_number(cells[*id_col], source, row, "id");
    if (id != std::floor(id)) fail_cell(source, row, "id", cells[*id_col], "id must be an integer");
    out.ids.push_back(static_cast<PointId>(id));
    out.values.push_back(parse_number(cells[*value_col], source, row, "value"));
  }
  return out;
}

void write_values_csv(std::ostream& out, const ValueVector& values) {
  out << "id,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << values.ids[i] << ',' << format_double(values.values[i]) << '\n';
  }
}

void write_report_csv(std::ostream& out, const ValueReport& report) {
  out << "id,value,se,rhat\n";
  const auto& v = report.values;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << v.ids[i] << ',' << format_double(v.values[i]) << ','
        << format_double(report.standard_error[i]) << ',' << format_double(report.rhat[i]) << '\n';
  }
}

void write_profiles_csv(std::ostream& out, std::span<const MarginalProfile> profiles) {
  out << "id,j,mean,var,count\n";
  for (const auto& p : profiles) {
    for (std::size_t j = 0; j < p.mean.size(); ++j) {
      out << p.id << ',' << j + 1 << ',' << format_double(p.mean[j]) << ','
          << format_double(p.variance[j]) << ',' << p.count[j] << '\n';
    }
  }
}

}  // namespace betashap
