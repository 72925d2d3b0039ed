#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace treekz {

/// 17 significant digits: parses back to the same double.
std::string format_real(double x);

/// Comma-separated rows with a header line.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

/// Whitespace-aligned text table.
std::string format_aligned(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace treekz
