#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace descentlab::harness {

/// Shortest decimal string that parses back to the same double. Infinities
/// render as "inf" / "-inf", NaN as "nan".
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  /// Throws std::invalid_argument if the cell count differs from the header.
  void add_row(std::vector<std::string> cells);

  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  [[nodiscard]] std::size_t size() const { return rows_.size(); }

  /// `# `-prefixed comment lines, then the header, then the rows.
  [[nodiscard]] std::string render(const std::vector<std::string>& comments = {}) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, std::string_view content);

/// Everything after the leading `#` comment lines.
std::string csv_body(std::string_view text);

}  // namespace descentlab::harness
