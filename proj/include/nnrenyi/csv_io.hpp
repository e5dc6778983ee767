#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "nnrenyi/point_set.hpp"

namespace nnrenyi {

struct CsvTable {
  PointSet points;
  std::optional<std::vector<std::string>> header;
};

/// Comma-separated numeric rows, one sample per row. A first row that does
/// not parse as numbers is taken as the header. Blank lines are skipped.
/// Throws DataError("no data") on empty input and names the offending line
/// on malformed rows.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace nnrenyi
