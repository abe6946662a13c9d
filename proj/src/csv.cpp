#include "lmsamp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lmsamp::csvio {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_csv(const std::string& path, const std::string& meta,
               const Table& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "# " << meta << "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_number(row[i]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> read_last_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open file: " + path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find_last_of(',');
    std::string cell = comma == std::string::npos ? line
                                                  : line.substr(comma + 1);
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      if (!out.empty())
        throw std::domain_error("non-numeric cell in " + path + ": " + cell);
      // else: header row, skip
    }
  }
  if (out.empty()) throw std::domain_error("no numeric data in " + path);
  return out;
}

}  // namespace lmsamp::csvio
