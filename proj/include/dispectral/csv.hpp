#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace dispectral {

// Floats are always written with 17 significant digits so files round-trip
// bit-exactly. Fields never contain commas or quotes; no escaping.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path, bool append = false);
    void write_row(const std::vector<std::string>& cells);
    void flush();

private:
    std::ofstream out_;
    std::string path_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 when missing
};

CsvTable read_csv(const std::string& path);

} // namespace dispectral
