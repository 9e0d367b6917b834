#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimq {

// Sparse binary parity-check matrix as row/column adjacency.  Immutable in
// spirit: build it once, then share freely.
struct ParityCheckMatrix {
    int m = 0;  // check nodes
    int n = 0;  // variable nodes
    std::vector<std::vector<int>> rows;  // per-CN sorted VN indices
    std::vector<std::vector<int>> cols;  // per-VN sorted CN indices

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& r : rows) e += r.size();
        return e;
    }

    void validate() const {
        if (m <= 0 || n <= 0) throw std::invalid_argument("ParityCheckMatrix: empty dimensions");
        if (static_cast<int>(rows.size()) != m || static_cast<int>(cols.size()) != n)
            throw std::invalid_argument("ParityCheckMatrix: adjacency size mismatch");
        std::size_t row_edges = 0, col_edges = 0;
        for (int c = 0; c < m; ++c) {
            const auto& r = rows[c];
            if (r.empty()) throw std::invalid_argument("ParityCheckMatrix: empty row");
            for (std::size_t k = 0; k < r.size(); ++k) {
                if (r[k] < 0 || r[k] >= n)
                    throw std::invalid_argument("ParityCheckMatrix: index out of range");
                if (k > 0 && r[k] <= r[k - 1])
                    throw std::invalid_argument("ParityCheckMatrix: duplicate or unsorted row entry");
            }
            row_edges += r.size();
        }
        for (int v = 0; v < n; ++v) {
            const auto& c = cols[v];
            if (c.empty()) throw std::invalid_argument("ParityCheckMatrix: empty column");
            for (std::size_t k = 0; k < c.size(); ++k) {
                if (c[k] < 0 || c[k] >= m)
                    throw std::invalid_argument("ParityCheckMatrix: index out of range");
                if (k > 0 && c[k] <= c[k - 1])
                    throw std::invalid_argument("ParityCheckMatrix: duplicate or unsorted column entry");
                if (!std::binary_search(rows[c[k]].begin(), rows[c[k]].end(), v))
                    throw std::invalid_argument("ParityCheckMatrix: rows/cols not transpose-consistent");
            }
            col_edges += c.size();
        }
        if (row_edges != col_edges)
            throw std::invalid_argument("ParityCheckMatrix: rows/cols edge counts differ");
    }

    bool operator==(const ParityCheckMatrix& o) const {
        return m == o.m && n == o.n && rows == o.rows && cols == o.cols;
    }

    static ParityCheckMatrix from_rows(int m, int n, std::vector<std::vector<int>> rows) {
        ParityCheckMatrix h;
        h.m = m;
        h.n = n;
        h.rows = std::move(rows);
        h.cols.assign(n, {});
        for (int c = 0; c < m; ++c) {
            std::sort(h.rows[c].begin(), h.rows[c].end());
            for (const int v : h.rows[c]) {
                if (v < 0 || v >= n)
                    throw std::invalid_argument("ParityCheckMatrix: index out of range");
                h.cols[v].push_back(c);
            }
        }
        h.validate();
        return h;
    }
};

// Quasi-cyclic base matrix: entries are circulant shifts, -1 for an all-zero
// block.
struct QcBaseMatrix {
    int mb = 0;
    int nb = 0;
    int z = 0;
    std::vector<std::vector<int>> shifts;  // mb x nb

    void validate() const {
        if (mb <= 0 || nb <= 0 || z <= 0) throw std::invalid_argument("QcBaseMatrix: bad dimensions");
        if (static_cast<int>(shifts.size()) != mb)
            throw std::invalid_argument("QcBaseMatrix: row count mismatch");
        for (const auto& row : shifts) {
            if (static_cast<int>(row.size()) != nb)
                throw std::invalid_argument("QcBaseMatrix: column count mismatch");
            for (const int s : row)
                if (s < -1 || s >= z)
                    throw std::invalid_argument("QcBaseMatrix: shift outside {-1} U [0,Z)");
        }
    }
};

// Edge-perspective degree distributions: rho[i] is the fraction of edges on
// degree-i check nodes, theta[j] the fraction on degree-j variable nodes.
struct DegreeDistribution {
    std::map<int, double> rho;
    std::map<int, double> theta;

    int dc_max() const { return rho.empty() ? 0 : rho.rbegin()->first; }
    int dv_max() const { return theta.empty() ? 0 : theta.rbegin()->first; }

    void validate() const {
        double sr = 0.0, st = 0.0;
        for (const auto& [d, f] : rho) {
            if (d < 1 || f <= 0.0 || f > 1.0)
                throw std::invalid_argument("DegreeDistribution: bad rho entry");
            sr += f;
        }
        for (const auto& [d, f] : theta) {
            if (d < 1 || f <= 0.0 || f > 1.0)
                throw std::invalid_argument("DegreeDistribution: bad theta entry");
            st += f;
        }
        if (std::abs(sr - 1.0) > 1e-12 || std::abs(st - 1.0) > 1e-12)
            throw std::invalid_argument("DegreeDistribution: fractions do not sum to 1");
    }
};

// Column groups of width Z used by the vertical layered schedule.
struct LayerPlan {
    int z = 0;
    int nb = 0;  // number of layers; layer h covers columns [h*z, h*z+z)
};

inline ParityCheckMatrix expand_qc(const QcBaseMatrix& base) {
    base.validate();
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(base.mb) * base.z);
    for (int r = 0; r < base.mb; ++r)
        for (int c = 0; c < base.nb; ++c) {
            const int s = base.shifts[r][c];
            if (s < 0) continue;
            for (int k = 0; k < base.z; ++k)
                rows[static_cast<std::size_t>(r) * base.z + (k + s) % base.z].push_back(c * base.z + k);
        }
    return ParityCheckMatrix::from_rows(base.mb * base.z, base.nb * base.z, std::move(rows));
}

// Degree fractions from exact integer edge counts.
inline DegreeDistribution degree_distributions(const ParityCheckMatrix& h) {
    std::map<int, std::uint64_t> redges, tedges;
    std::uint64_t total = 0;
    for (const auto& r : h.rows) {
        redges[static_cast<int>(r.size())] += r.size();
        total += r.size();
    }
    for (const auto& c : h.cols) tedges[static_cast<int>(c.size())] += c.size();
    DegreeDistribution dd;
    for (const auto& [d, e] : redges) dd.rho[d] = static_cast<double>(e) / static_cast<double>(total);
    for (const auto& [d, e] : tedges) dd.theta[d] = static_cast<double>(e) / static_cast<double>(total);
    return dd;
}

// Layer plan for an expanded matrix: columns are grouped Z at a time in
// ascending order.  Fails if some CN touches a group twice, in which case the
// vertical layered schedule would serialize incorrectly.
inline LayerPlan layer_partition(const ParityCheckMatrix& h, int z) {
    if (z <= 0 || h.n % z != 0)
        throw std::invalid_argument("layer_partition: Z does not divide the column count");
    for (int c = 0; c < h.m; ++c) {
        int prev_group = -1;
        for (const int v : h.rows[c]) {
            const int g = v / z;
            if (g == prev_group)
                throw std::invalid_argument("layer_partition: layer conflict at check node " +
                                            std::to_string(c));
            prev_group = g;
        }
    }
    return LayerPlan{z, h.n / z};
}

inline LayerPlan layer_partition(const QcBaseMatrix& base) {
    return layer_partition(expand_qc(base), base.z);
}

namespace detail {
inline std::vector<int> parse_int_line(const std::string& line, int lineno) {
    std::istringstream ss(line);
    std::vector<int> out;
    long long v;
    while (ss >> v) out.push_back(static_cast<int>(v));
    std::string junk;
    if (ss.bad() || (ss.fail() && !ss.eof()))
        throw std::invalid_argument("alist line " + std::to_string(lineno) + ": not an integer");
    return out;
}
}  // namespace detail

// MacKay alist format, 1-based indices, zero padding tolerated in the
// adjacency lines.
inline ParityCheckMatrix parse_alist(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::vector<int>> lines;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto vals = detail::parse_int_line(raw, lineno);
        if (!vals.empty()) lines.push_back(std::move(vals));
    }
    if (lines.size() < 4) throw std::invalid_argument("alist: truncated header");
    if (lines[0].size() != 2) throw std::invalid_argument("alist line 1: malformed header");
    const int n = lines[0][0], m = lines[0][1];
    if (n <= 0 || m <= 0) throw std::invalid_argument("alist line 1: malformed header");
    if (lines[1].size() != 2) throw std::invalid_argument("alist line 2: malformed max-degree line");
    if (static_cast<int>(lines[2].size()) != n)
        throw std::invalid_argument("alist line 3: expected " + std::to_string(n) + " VN degrees");
    if (static_cast<int>(lines[3].size()) != m)
        throw std::invalid_argument("alist line 4: expected " + std::to_string(m) + " CN degrees");
    if (lines.size() != static_cast<std::size_t>(4 + n + m))
        throw std::invalid_argument("alist: expected " + std::to_string(4 + n + m) + " content lines, got " +
                                    std::to_string(lines.size()));

    std::vector<std::vector<int>> cols(n), rows(m);
    for (int v = 0; v < n; ++v) {
        const int line = 4 + v;
        for (const int raw_idx : lines[line]) {
            if (raw_idx == 0) continue;  // fixed-width padding
            if (raw_idx < 1 || raw_idx > m)
                throw std::invalid_argument("alist line " + std::to_string(line + 1) +
                                            ": index out of range");
            cols[v].push_back(raw_idx - 1);
        }
        if (static_cast<int>(cols[v].size()) != lines[2][v])
            throw std::invalid_argument("alist line " + std::to_string(line + 1) +
                                        ": degree mismatch for variable node " + std::to_string(v + 1));
        std::sort(cols[v].begin(), cols[v].end());
        for (std::size_t k = 1; k < cols[v].size(); ++k)
            if (cols[v][k] == cols[v][k - 1])
                throw std::invalid_argument("alist line " + std::to_string(line + 1) +
                                            ": duplicate edge");
        for (const int c : cols[v]) rows[c].push_back(v);
    }
    for (int c = 0; c < m; ++c) {
        const int line = 4 + n + c;
        std::vector<int> declared;
        for (const int raw_idx : lines[line]) {
            if (raw_idx == 0) continue;
            if (raw_idx < 1 || raw_idx > n)
                throw std::invalid_argument("alist line " + std::to_string(line + 1) +
                                            ": index out of range");
            declared.push_back(raw_idx - 1);
        }
        if (static_cast<int>(declared.size()) != lines[3][c])
            throw std::invalid_argument("alist line " + std::to_string(line + 1) +
                                        ": degree mismatch for check node " + std::to_string(c + 1));
        std::sort(declared.begin(), declared.end());
        if (declared != rows[c])
            throw std::invalid_argument("alist line " + std::to_string(line + 1) +
                                        ": row adjacency disagrees with column lists");
    }

    ParityCheckMatrix h;
    h.m = m;
    h.n = n;
    h.rows = std::move(rows);
    h.cols = std::move(cols);
    h.validate();
    return h;
}

inline std::string serialize_alist(const ParityCheckMatrix& h) {
    std::size_t max_dv = 0, max_dc = 0;
    for (const auto& c : h.cols) max_dv = std::max(max_dv, c.size());
    for (const auto& r : h.rows) max_dc = std::max(max_dc, r.size());
    std::ostringstream out;
    out << h.n << ' ' << h.m << '\n' << max_dv << ' ' << max_dc << '\n';
    for (int v = 0; v < h.n; ++v) out << h.cols[v].size() << (v + 1 == h.n ? '\n' : ' ');
    for (int c = 0; c < h.m; ++c) out << h.rows[c].size() << (c + 1 == h.m ? '\n' : ' ');
    for (const auto& col : h.cols) {
        for (std::size_t k = 0; k < max_dv; ++k)
            out << (k < col.size() ? col[k] + 1 : 0) << (k + 1 == max_dv ? '\n' : ' ');
    }
    for (const auto& row : h.rows) {
        for (std::size_t k = 0; k < max_dc; ++k)
            out << (k < row.size() ? row[k] + 1 : 0) << (k + 1 == max_dc ? '\n' : ' ');
    }
    return out.str();
}

// Plain-text QC shift table: first line "Mb Nb Z", then Mb rows of Nb shifts.
inline QcBaseMatrix parse_qc_table(const std::string& text) {
    std::istringstream in(text);
    QcBaseMatrix base;
    if (!(in >> base.mb >> base.nb >> base.z))
        throw std::invalid_argument("qc table: malformed header");
    base.shifts.assign(base.mb > 0 ? base.mb : 0, std::vector<int>(base.nb > 0 ? base.nb : 0, -1));
    for (int r = 0; r < base.mb; ++r)
        for (int c = 0; c < base.nb; ++c)
            if (!(in >> base.shifts[r][c]))
                throw std::invalid_argument("qc table: truncated at row " + std::to_string(r + 1));
    base.validate();
    return base;
}

inline std::string serialize_qc_table(const QcBaseMatrix& base) {
    std::ostringstream out;
    out << base.mb << ' ' << base.nb << ' ' << base.z << '\n';
    for (const auto& row : base.shifts) {
        for (std::size_t c = 0; c < row.size(); ++c) out << row[c] << (c + 1 == row.size() ? '\n' : ' ');
    }
    return out.str();
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mimq
