#ifndef ILLUMWAVE_CSV_HPP
#define ILLUMWAVE_CSV_HPP

#include <map>
#include <string>
#include <vector>

namespace ilw {

// Formats a double with 17 significant digits; round-trips exactly, so CSV
// output is byte-stable across identical runs.
std::string format_double(double v);

// Column-oriented CSV with a header row, '.' decimal, '\n' terminators, UTF-8.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;  // one vector per header entry

    size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
    bool has(const std::string& name) const;
    const std::vector<double>& col(const std::string& name) const;  // throws if absent

    void add_column(const std::string& name);
    void append_row(const std::vector<double>& values);

    void write(const std::string& path) const;
    static CsvTable read(const std::string& path);
};

}  // namespace ilw

#endif
