#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qadv {

/// Shortest representation that round-trips a double exactly (%.17g).
std::string format_double(double v);

/// strtod with full-string validation; `field` names the value in errors.
double parse_double(const std::string& text, const std::string& field);
long long parse_int(const std::string& text, const std::string& field);
std::uint64_t parse_uint64(const std::string& text, const std::string& field);

/// Write-temp-then-rename so partially written files are never observed.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_entire_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

/// "key = value" line; throws naming `expected_key` when absent/mismatched.
std::string expect_kv(const std::string& line, const std::string& expected_key,
                      const std::string& context);

/// Minimal CSV support for the emitted artifacts: '#'-prefixed metadata
/// lines, one header row, '.'-decimal cells.
struct CsvTable {
    std::vector<std::string> meta;  // leading '#' lines, stripped of '#'
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);
std::string format_csv(const CsvTable& table);

}  // namespace qadv
