#include "ecve/csv.hpp"

#include "ecve/errors.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace ecve {

namespace {

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ','))
    cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',')
    cells.emplace_back();
  return cells;
}

bool parse_double(const std::string &s, double &out) {
  if (s.empty())
    return false;
  const char *begin = s.data();
  if (*begin == '+')
    ++begin;
  const char *end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

} // namespace

Index CsvTable::column(const std::string &name) const {
  const auto it = std::find(headers.begin(), headers.end(), name);
  if (it == headers.end())
    throw UsageError("column '" + name + "' not found");
  return static_cast<Index>(it - headers.begin());
}

CsvTable CsvTable::drop(const std::vector<std::string> &names) const {
  std::vector<Index> keep;
  for (Index j = 0; j < static_cast<Index>(headers.size()); ++j)
    if (std::find(names.begin(), names.end(), headers[j]) == names.end())
      keep.push_back(j);
  for (const std::string &name : names)
    column(name); // unknown names are an error
  CsvTable out;
  out.data.resize(data.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.headers.push_back(headers[keep[c]]);
    out.data.col(static_cast<Index>(c)) = data.col(keep[c]);
  }
  return out;
}

CsvTable parse_csv(std::istream &in, const std::string &source) {
  std::string line;
  long line_no = 0;
  CsvTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty())
      break;
  }
  if (trim(line).empty())
    throw ParseError(source + ": empty file");
  table.headers = split(line);
  // tolerate a UTF-8 byte order mark
  if (table.headers[0].rfind("\xEF\xBB\xBF", 0) == 0)
    table.headers[0].erase(0, 3);
  for (std::size_t j = 0; j < table.headers.size(); ++j)
    if (table.headers[j].empty())
      throw ParseError(source + ": empty header in column " + std::to_string(j + 1),
                       line_no, static_cast<long>(j + 1));
  const std::size_t cols = table.headers.size();

  std::vector<double> values;
  Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != cols)
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(cols) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no, -1);
    for (std::size_t j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!parse_double(cells[j], v))
        throw ParseError(source + ":" + std::to_string(line_no) + ": column " +
                             std::to_string(j + 1) + " ('" + table.headers[j] +
                             "'): non-numeric value '" + cells[j] + "'",
                         line_no, static_cast<long>(j + 1));
      values.push_back(v);
    }
    ++rows;
  }
  table.data.resize(rows, static_cast<Index>(cols));
  for (Index i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      table.data(i, static_cast<Index>(j)) = values[static_cast<std::size_t>(i) * cols + j];
  return table;
}

CsvTable read_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

void write_csv(std::ostream &out, const std::vector<std::string> &headers,
               const Matrix &data) {
  for (std::size_t j = 0; j < headers.size(); ++j)
    out << (j ? "," : "") << headers[j];
  out << '\n' << std::setprecision(17);
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j)
      out << (j ? "," : "") << data(i, j);
    out << '\n';
  }
}

void atomic_write(const std::string &path, const std::string &content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename into '" + path + "'");
  }
}

} // namespace ecve
