#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace grnlab {

/// Writes via a sibling temp file and a rename, so readers never see a
/// partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double ("nan" for NaN).
std::string format_double(double v);

/// Minimal CSV: header line then comma separated rows, no quoting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  ///< throws if absent
    std::string to_string() const;
    static CsvTable parse(std::string_view text);
};

}  // namespace grnlab
