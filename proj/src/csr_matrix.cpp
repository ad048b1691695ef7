#include "dispectral/csr_matrix.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dispectral {

void write_edgelist(const std::string& path, const SparseReal& a) {
    if (a.n_rows() != a.n_cols())
        throw validation_error("write_edgelist: matrix must be square");
    std::ofstream out(path);
    if (!out) throw validation_error("write_edgelist: cannot open " + path);
    out << "# dispectral-edgelist v1 n=" << a.n_rows() << "\n";
    char buf[64];
    const auto& rp = a.row_ptr();
    const auto& cols = a.col_indices();
    const auto& vals = a.values();
    for (index_t r = 0; r < a.n_rows(); ++r)
        for (index_t p = rp[r]; p < rp[r + 1]; ++p) {
            std::snprintf(buf, sizeof buf, "%.17g", vals[p]);
            out << r << '\t' << cols[p] << '\t' << buf << '\n';
        }
    if (!out) throw numerical_error("write_edgelist: write failed for " + path);
}

SparseReal read_edgelist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("read_edgelist: cannot open " + path);
    std::string header;
    std::getline(in, header);
    index_t n = -1;
    if (std::sscanf(header.c_str(), "# dispectral-edgelist v1 n=%" SCNd64, &n) != 1 || n < 0)
        throw validation_error("read_edgelist: bad header in " + path);
    std::vector<Triplet<double>> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        index_t src, dst;
        double w;
        if (!(ls >> src >> dst >> w))
            throw validation_error("read_edgelist: malformed line: " + line);
        entries.push_back({src, dst, w});
    }
    return SparseReal::from_triplets(n, n, std::move(entries));
}

void write_memberships(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw validation_error("write_memberships: cannot open " + path);
    for (int l : labels) out << l << '\n';
}

std::vector<int> read_memberships(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("read_memberships: cannot open " + path);
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        labels.push_back(std::stoi(line));
    }
    return labels;
}

} // namespace dispectral
