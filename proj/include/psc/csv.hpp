#pragma once

#include "psc/dataset.hpp"

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace psc {

/// Header-first, comma-separated table of strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv_table(const std::filesystem::path& path);

/// Rows whose label is in `positive_labels` become +1, all others -1. Every
/// other column must parse as a finite real; failures name the data row
/// (1-based, header excluded) and the column.
LabeledMatrix load_csv(const std::filesystem::path& path, std::string_view label_column,
                       const std::set<std::string>& positive_labels);

/// Writes the feature columns then `label_column` holding "1" / "-1".
void write_csv(const std::filesystem::path& path, const LabeledMatrix& data,
               std::string_view label_column = "label");

/// 17 significant digits, the shortest width that round-trips any double.
std::string format_real(double value);

/// Parses a finite real; throws std::invalid_argument otherwise.
double parse_real(std::string_view text);

} // namespace psc
