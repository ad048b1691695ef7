#include "dispectral/csv.hpp"

#include "dispectral/errors.hpp"

#include <cstdio>
#include <sstream>

namespace dispectral {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, bool append)
    : out_(path, append ? std::ios::app : std::ios::trunc), path_(path) {
    if (!out_) throw validation_error("CsvWriter: cannot open " + path);
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    out_.flush(); // crash-safe row granularity
    if (!out_) throw numerical_error("CsvWriter: write failed for " + path_);
}

void CsvWriter::flush() { out_.flush(); }

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("read_csv: cannot open " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        cells.push_back(cur);
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            table.header = split(line);
            first = false;
        } else {
            table.rows.push_back(split(line));
        }
    }
    return table;
}

} // namespace dispectral
