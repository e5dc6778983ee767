#include "nnrenyi/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nnrenyi/error.hpp"

namespace nnrenyi {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  std::vector<double> coords;
  std::optional<std::vector<std::string>> header;
  bool first_row = true;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_fields(view);
    if (first_row) {
      first_row = false;
      d = fields.size();
      double probe = 0.0;
      bool numeric = true;
      for (auto f : fields) numeric = numeric && parse_number(f, probe);
      if (!numeric) {
        header.emplace();
        for (auto f : fields) header->emplace_back(f);
        continue;
      }
    }
    if (fields.size() != d)
      throw DataError("parse error at line " + std::to_string(line_no) + ": expected " + std::to_string(d) +
                      " columns, found " + std::to_string(fields.size()));
    for (auto f : fields) {
      double x = 0.0;
      if (!parse_number(f, x))
        throw DataError("parse error at line " + std::to_string(line_no) + ": not a number: '" + std::string(f) +
                        "'");
      if (!std::isfinite(x))
        throw DataError("parse error at line " + std::to_string(line_no) + ": non-finite value");
      coords.push_back(x);
    }
  }
  if (coords.empty()) throw DataError("no data");
  const std::size_t n = coords.size() / d;
  return CsvTable{PointSet(n, d, std::move(coords)), std::move(header)};
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

CsvTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace nnrenyi
