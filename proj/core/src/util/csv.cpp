#include "deforsc/util/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "deforsc/errors.hpp"

namespace deforsc {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

}  // namespace

std::size_t CsvTable::col(const std::string& name) const {
    std::size_t i = col_opt(name);
    if (i == npos) throw SchemaError("missing column '" + name + "'");
    return i;
}

std::size_t CsvTable::col_opt(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return npos;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size())
                throw SchemaError("csv line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.header.size()) + " cells, got " +
                                  std::to_string(cells.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) throw SchemaError("csv input is empty (no header)");
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open csv file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_csv(ss.str());
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

std::string to_csv(const CsvTable& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    return out.str();
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write csv file: " + path);
    out << to_csv(table);
}

double parse_double(const std::string& cell, const std::string& context) {
    if (cell.empty()) throw SchemaError(context + ": empty numeric cell");
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE)
        throw SchemaError(context + ": cannot parse number '" + cell + "'");
    if (!std::isfinite(v))
        throw SchemaError(context + ": non-finite value '" + cell + "'");
    return v;
}

long long parse_int(const std::string& cell, const std::string& context) {
    if (cell.empty()) throw SchemaError(context + ": empty integer cell");
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(cell.c_str(), &end, 10);
    if (end != cell.c_str() + cell.size() || errno == ERANGE)
        throw SchemaError(context + ": cannot parse integer '" + cell + "'");
    return v;
}

}  // namespace deforsc
