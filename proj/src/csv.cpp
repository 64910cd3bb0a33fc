#include "orgrad/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace orgrad {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

double parse_numeric_cell(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw std::runtime_error("csv: bad numeric cell '" + s + "'");
    return v;
}

}  // namespace

std::size_t CsvTable::col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::invalid_argument("csv: no column named '" + name + "'");
}

const std::string& CsvTable::at(std::size_t row, const std::string& name) const {
    if (row >= cells.size()) throw std::out_of_range("csv: row out of range");
    return cells[row][col(name)];
}

double CsvTable::num(std::size_t row, const std::string& name) const {
    return parse_numeric_cell(at(row, name));
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const std::size_t c = col(name);
    std::vector<double> out;
    out.reserve(cells.size());
    for (const auto& row : cells) out.push_back(parse_numeric_cell(row[c]));
    return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const std::string& c : comments) out << "# " << c << "\n";
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open csv: " + path);
    CsvTable t;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string c = line.substr(1);
            if (!c.empty() && c[0] == ' ') c = c.substr(1);
            t.comments.push_back(c);
            continue;
        }
        if (!have_header) {
            t.header = split_commas(line);
            have_header = true;
            continue;
        }
        std::vector<std::string> cells = split_commas(line);
        if (cells.size() != t.header.size())
            throw std::runtime_error("csv line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(t.header.size()) +
                                     " cells, got " + std::to_string(cells.size()));
        t.cells.push_back(std::move(cells));
    }
    if (!have_header) throw std::runtime_error("csv has no header: " + path);
    return t;
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<std::string>& comments,
                          const TrajectoryLog& log) {
    std::vector<std::vector<double>> rows;
    rows.reserve(log.records.size());
    for (const TrajectoryRecord& r : log.records)
        rows.push_back({static_cast<double>(r.t), r.eta, r.fro_err, r.rel_err, r.sup_err,
                        r.incoh, r.regret});
    write_csv(path, comments, {"t", "eta", "fro_err", "rel_err", "sup_err", "incoh", "regret"},
              rows);
}

}  // namespace orgrad
