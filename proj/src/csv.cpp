#include "weakval/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace weakval {

std::string to_csv(const Table& table) {
    std::string out;
    for (size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    char buf[40];
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) {
            throw std::invalid_argument("to_csv: row length does not match header");
        }
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_csv(const Table& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_csv: cannot open '" + path + "'");
    f << to_csv(table);
    if (!f) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

Table parse_csv(const std::string& text) {
    Table table;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        if (header) {
            while (std::getline(ls, cell, ',')) table.columns.push_back(cell);
            header = false;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.columns.size()) {
            throw std::invalid_argument("parse_csv: row length does not match header");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace weakval
