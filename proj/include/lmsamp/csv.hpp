#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lmsamp::csvio {

/// Numeric table written as CSV: one '#' metadata comment line (version,
/// seed, free-form info), then a header row, then the data rows.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string format_number(double v);

void write_csv(const std::string& path, const std::string& meta,
               const Table& table);

/// Reads the last column of a CSV produced by this tool (or any plain CSV);
/// '#' comments and a non-numeric header row are skipped.
std::vector<double> read_last_column(const std::string& path);

}  // namespace lmsamp::csvio
