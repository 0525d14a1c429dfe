#include "illumwave/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "illumwave/errors.hpp"

namespace ilw {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool CsvTable::has(const std::string& name) const {
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

const std::vector<double>& CsvTable::col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw ConfigError("csv: missing column '" + name + "'");
}

void CsvTable::add_column(const std::string& name) {
    header.push_back(name);
    columns.emplace_back();
}

void CsvTable::append_row(const std::vector<double>& values) {
    if (values.size() != columns.size())
        throw ConfigError("csv: row width mismatch");
    for (size_t i = 0; i < values.size(); ++i) columns[i].push_back(values[i]);
}

void CsvTable::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("csv: cannot write " + path);
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (size_t r = 0; r < rows(); ++r) {
        for (size_t i = 0; i < columns.size(); ++i) {
            if (i) out << ',';
            out << format_double(columns[i][r]);
        }
        out << '\n';
    }
}

CsvTable CsvTable::read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("csv: cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.add_column(cell);
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) {
            if (cell.empty()) {
                vals.push_back(std::nan(""));
            } else {
                vals.push_back(std::strtod(cell.c_str(), nullptr));
            }
        }
        if (vals.size() != t.columns.size())
            throw ConfigError("csv: bad row width at line " + std::to_string(lineno) +
                              " of " + path);
        t.append_row(vals);
    }
    return t;
}

}  // namespace ilw
