#include "usdr/dataset.hpp"

#include "usdr/error.hpp"
#include "usdr/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace usdr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool parse_real(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string cell_ref(std::size_t line_no, const std::string& column) {
  return "row " + std::to_string(line_no) + ", column '" + column + "'";
}

}  // namespace

void validate(const Dataset& data) {
  if (data.inputs.rows() < 1)
    throw Error(Errc::InvalidArgument, "dataset must contain at least one sample");
  if (data.targets.rows() != data.inputs.rows())
    throw Error(Errc::DimensionMismatch, "targets row count differs from inputs");
  if (!data.inputs.allFinite() || !data.targets.allFinite())
    throw Error(Errc::NonFinite, "dataset contains non-finite values");
  const auto n = static_cast<std::size_t>(data.inputs.rows());
  if (data.labels) {
    if (data.labels->size() != n)
      throw Error(Errc::DimensionMismatch, "label count differs from sample count");
    for (int l : *data.labels)
      if (l != 0 && l != 1) throw Error(Errc::InvalidLabel, "labels must be 0 or 1");
  }
  if (data.health) {
    if (data.health->size() != n)
      throw Error(Errc::DimensionMismatch, "health count differs from sample count");
    for (double h : *data.health)
      if (!(h >= 0.0 && h <= 1.0))
        throw Error(Errc::InvalidHealth, "health values must lie in [0,1]");
  }
}

Dataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line))
    throw Error(Errc::Parse, path.string() + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::vector<std::string> header;
  for (auto f : split_fields(line)) header.emplace_back(f);

  auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto label_col = find_col(schema.label_column);
  const auto health_col = find_col(schema.health_column);

  std::vector<std::size_t> feature_cols;
  if (!schema.features.empty()) {
    for (const auto& name : schema.features) {
      auto c = find_col(name);
      if (!c) throw Error(Errc::Parse, path.string() + ": no column named '" + name + "'");
      feature_cols.push_back(*c);
    }
  } else if (schema.feature_range) {
    auto [first, last] = *schema.feature_range;
    if (first >= last || last > header.size())
      throw Error(Errc::InvalidArgument, path.string() + ": feature range out of bounds");
    for (std::size_t c = first; c < last; ++c) feature_cols.push_back(c);
  } else {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != label_col && c != health_col) feature_cols.push_back(c);
  }
  if (feature_cols.empty()) throw Error(Errc::Parse, path.string() + ": no feature columns");

  std::vector<double> values;
  std::vector<int> labels;
  std::vector<double> health;
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw Error(Errc::RaggedRow, path.string() + ": row " + std::to_string(line_no) +
                                       " has " + std::to_string(fields.size()) +
                                       " fields, header has " + std::to_string(header.size()));
    for (auto c : feature_cols) {
      double v = 0.0;
      if (!parse_real(fields[c], v) || !std::isfinite(v))
        throw Error(Errc::Parse, path.string() + ": non-numeric value '" +
                                     std::string(fields[c]) + "' at " +
                                     cell_ref(line_no, header[c]));
      values.push_back(v);
    }
    if (label_col) {
      double v = 0.0;
      if (!parse_real(fields[*label_col], v) || (v != 0.0 && v != 1.0))
        throw Error(Errc::InvalidLabel, path.string() + ": label must be 0 or 1 at " +
                                            cell_ref(line_no, header[*label_col]));
      labels.push_back(static_cast<int>(v));
    }
    if (health_col) {
      double v = 0.0;
      if (!parse_real(fields[*health_col], v) || !(v >= 0.0 && v <= 1.0))
        throw Error(Errc::InvalidHealth, path.string() + ": health must lie in [0,1] at " +
                                             cell_ref(line_no, header[*health_col]));
      health.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(Errc::Parse, path.string() + ": no data rows");

  Dataset d;
  const auto cols = static_cast<Eigen::Index>(feature_cols.size());
  d.inputs.resize(static_cast<Eigen::Index>(rows), cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      d.inputs(static_cast<Eigen::Index>(r), c) = values[r * feature_cols.size() + c];
  d.targets = d.inputs;
  for (auto c : feature_cols) d.feature_names.push_back(header[c]);
  if (label_col) d.labels = std::move(labels);
  if (health_col) d.health = std::move(health);
  validate(d);
  return d;
}

std::string to_csv_string(const Dataset& data) {
  std::ostringstream out;
  const auto cols = data.inputs.cols();
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (c) out << ',';
    if (static_cast<std::size_t>(c) < data.feature_names.size())
      out << data.feature_names[c];
    else
      out << 'x' << c;
  }
  if (data.labels) out << ",label";
  if (data.health) out << ",health";
  out << '\n';
  for (Eigen::Index r = 0; r < data.inputs.rows(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << format_real(data.inputs(r, c));
    }
    if (data.labels) out << ',' << (*data.labels)[r];
    if (data.health) out << ',' << format_real((*data.health)[r]);
    out << '\n';
  }
  return out.str();
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  write_file(path.string(), to_csv_string(data));
}

Dataset as_reconstruction(Dataset data) {
  data.targets = data.inputs;
  return data;
}

bool is_reconstruction(const Dataset& data) noexcept {
  return data.inputs.rows() == data.targets.rows() &&
         data.inputs.cols() == data.targets.cols() && data.inputs == data.targets;
}

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& indices) {
  Matrix out(static_cast<Eigen::Index>(indices.size()), m.cols());
  for (std::size_t r = 0; r < indices.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(indices[r]));
  return out;
}

Dataset head(const Dataset& data, Eigen::Index n) {
  Dataset out;
  out.inputs = data.inputs.topRows(n);
  out.targets = data.targets.topRows(n);
  out.feature_names = data.feature_names;
  if (data.labels) out.labels = std::vector<int>(data.labels->begin(), data.labels->begin() + n);
  if (data.health)
    out.health = std::vector<double>(data.health->begin(), data.health->begin() + n);
  return out;
}

}  // namespace usdr
