#include "litho/csv.hpp"

#include <charconv>
#include <fstream>

#include "litho/errors.hpp"

namespace litho::csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path);
    Table t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace litho::csv
