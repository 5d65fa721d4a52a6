#pragma once

// Plot-ready CSV tables: header row plus homogeneous numeric rows, emitted
// with 17 significant digits so parsed values round-trip exactly.

#include <string>
#include <vector>

namespace weakval {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Renders the table: comma-separated header, one line per row, "%.17g"
/// values, newline-terminated, UTF-8/ASCII. Throws on rows whose length does
/// not match the header.
std::string to_csv(const Table& table);

/// to_csv + write to `path`. I/O failures throw std::runtime_error.
void write_csv(const Table& table, const std::string& path);

/// Parses text produced by to_csv (used by round-trip checks).
Table parse_csv(const std::string& text);

}  // namespace weakval
