// Minimal CSV reader/writer for the artifact's tabular interchange files.
// Cells are plain tokens: no quoting or embedded commas/newlines (unit ids and
// covariate names are identifier-like by contract). Values are kept as strings
// so callers control numeric parsing and error reporting.
#pragma once

#include <string>
#include <vector>

namespace deforsc {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name; throws SchemaError when absent.
    std::size_t col(const std::string& name) const;
    // Column index or npos when absent.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t col_opt(const std::string& name) const;
};

// Parse a file. Throws SchemaError on unreadable files or ragged rows.
CsvTable read_csv(const std::string& path);

// Parse from an in-memory string (tests, round trips).
CsvTable parse_csv(const std::string& text);

// Serialize; caller guarantees cells contain no commas/newlines.
std::string to_csv(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

// Strict numeric parsing helpers with positional error messages.
double parse_double(const std::string& cell, const std::string& context);
long long parse_int(const std::string& cell, const std::string& context);

}  // namespace deforsc
