#pragma once

#include "ecve/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ecve {

/// Numeric table with named columns. Comma separated, header row first,
/// `.` as decimal point, no quoting.
struct CsvTable {
  std::vector<std::string> headers;
  Matrix data;

  /// 0-based index of the named column; throws UsageError when absent.
  Index column(const std::string &name) const;
  /// Copy of the table without the listed columns.
  CsvTable drop(const std::vector<std::string> &names) const;
};

/// Throws ParseError with the 1-based file line and column of the first
/// malformed cell.
CsvTable parse_csv(std::istream &in, const std::string &source = "<input>");
CsvTable read_csv(const std::string &path);

void write_csv(std::ostream &out, const std::vector<std::string> &headers,
               const Matrix &data);

/// Writes `content` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
void atomic_write(const std::string &path, const std::string &content);

} // namespace ecve
