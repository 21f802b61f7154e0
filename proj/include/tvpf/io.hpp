#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tvpf {

// A numeric table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws IoError if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

// Values are written with 17 significant digits so reading back is lossless.
std::string format_double(double value);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Creates the directory (and parents) if needed.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace tvpf
