#include "psc/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psc {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits one line on commas; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

} // namespace

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    auto fields = split_line(line);
    if (!have_header) {
      if (line_no == 1 && fields[0].starts_with("\xEF\xBB\xBF")) {
        fields[0].erase(0, 3);
      }
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, header has " +
                               std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) {
    throw std::runtime_error(path.string() + ": empty file");
  }
  return table;
}

double parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite value: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  if (ec != std::errc()) {
    throw std::runtime_error("float formatting failed");
  }
  return std::string(buf.data(), ptr);
}

LabeledMatrix load_csv(const std::filesystem::path& path, std::string_view label_column,
                       const std::set<std::string>& positive_labels) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("missing file: " + path.string());
  }
  const CsvTable table = read_csv_table(path);

  std::size_t label_index = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == label_column) {
      label_index = c;
      break;
    }
  }
  if (label_index == table.header.size()) {
    throw std::runtime_error(path.string() + ": no label column '" + std::string(label_column) +
                             "'");
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != label_index) {
      names.push_back(table.header[c]);
    }
  }
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto d = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd samples(n, d);
  std::vector<int> labels(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    labels[r] = positive_labels.contains(row[label_index]) ? 1 : -1;
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == label_index) {
        continue;
      }
      try {
        samples(static_cast<Eigen::Index>(r), j++) = parse_real(row[c]);
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path.string() + ": row " + std::to_string(r + 1) +
                                 ", column '" + table.header[c] + "': " + e.what());
      }
    }
  }
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
    throw std::runtime_error(path.string() + ": labels collapse to a single class");
  }
  return LabeledMatrix(std::move(samples), std::move(labels), std::move(names));
}

void write_csv(const std::filesystem::path& path, const LabeledMatrix& data,
               std::string_view label_column) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  const auto& names = data.feature_names();
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    out << (names.empty() ? "f" + std::to_string(j) : names[static_cast<std::size_t>(j)]) << ',';
  }
  out << label_column << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      out << format_real(data.samples()(i, j)) << ',';
    }
    out << data.labels()[static_cast<std::size_t>(i)] << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

} // namespace psc
