#include "mmdvar_cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "mmdvar/error.hpp"

namespace mmdvar::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

SampleSet parse_csv(std::string_view text) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_line = true;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        trim(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty()) continue;

    const std::vector<std::string_view> cells = split(line);
    double probe = 0.0;
    if (first_line && !parse_number(cells.front(), probe)) {
      first_line = false;
      continue;  // header
    }
    first_line = false;

    if (cols == 0) {
      cols = cells.size();
    } else if (cells.size() != cols) {
      throw InputError("ragged row " + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " columns, got " +
                       std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      if (!parse_number(cells[j], v)) {
        throw InputError("non-numeric cell '" + std::string(cells[j]) + "' at row " +
                         std::to_string(line_no) + ", column " + std::to_string(j + 1));
      }
      if (!std::isfinite(v)) {
        throw InputError("non-finite value at row " + std::to_string(line_no) +
                         ", column " + std::to_string(j + 1));
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw InputError(line_no <= 1 && text.empty() ? "empty file" : "no data rows");
  return SampleSet(rows, cols, std::move(values));
}

SampleSet load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace mmdvar::cli
