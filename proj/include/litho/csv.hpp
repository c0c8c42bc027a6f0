#pragma once

#include <string>
#include <vector>

namespace litho::csv {

// Minimal comma-separated reader for the toolkit's schemas: no quoting,
// UTF-8, LF line endings (a trailing CR is stripped for tolerance).
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows; // raw cells, empty = missing
};

Table read_file(const std::string& path); // throws DataError when unreadable
std::vector<std::string> split_line(const std::string& line);

// Shortest round-trip formatting for doubles so rewritten files are
// byte-stable across runs.
std::string format_double(double v);

} // namespace litho::csv
