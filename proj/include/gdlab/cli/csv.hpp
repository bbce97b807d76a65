#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gdlab::cli {

/// "%.17g": round-trips every double, '.' decimal separator.
std::string format_double(double v);

/// Header-first CSV writer. Throws ValidationError if the file cannot be
/// opened or a row has the wrong width.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  void row_numbers(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t width_;
  std::filesystem::path path_;
};

/// Parses a CSV file with a header row into numeric rows. Empty lines are
/// skipped. Used by tests and for schedule files.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace gdlab::cli
