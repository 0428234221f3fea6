#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace mscale {

/// Shortest-unambiguous is not guaranteed; 17 significant digits always
/// round-trip a double.
std::string format_double(double value);

/// Opens a file for writing, creating parent directories. Throws Error(io_error).
std::ofstream open_output(const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws Error(parse_error) when absent.
  std::size_t column(const std::string& name) const;
};

/// Plain comma-separated reader (no quoting). Throws Error(io_error) or
/// Error(parse_error) on ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

double parse_double(const std::string& text);

}  // namespace mscale
