#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rfvar {

/// Rectangular table of doubles with named columns and '#'-prefixed comment
/// lines carrying the configuration echo. Floats are serialized with 17
/// significant digits so parsing the file back reproduces them bit exactly.
struct Table {
    std::vector<std::string> comments;  // emitted as "# <line>"
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Ordered named sections, each a Table; used by outputs that carry more
/// than one logical block (the assimilation demo).
struct TableSet {
    std::vector<std::pair<std::string, Table>> sections;
};

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string to_csv(const Table& t) {
    std::ostringstream out;
    for (const auto& c : t.comments) out << "# " << c << '\n';
    for (std::size_t j = 0; j < t.columns.size(); ++j)
        out << t.columns[j] << (j + 1 < t.columns.size() ? "," : "");
    out << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size())
            throw std::invalid_argument("to_csv: ragged row");
        for (std::size_t j = 0; j < row.size(); ++j)
            out << format_g17(row[j]) << (j + 1 < row.size() ? "," : "");
        out << '\n';
    }
    return out.str();
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

/// Array of row objects keyed by column name. Comments land in a leading
/// "_config" object entry per row set.
inline std::string to_json(const Table& t) {
    std::ostringstream out;
    out << "{\n  \"config\": [";
    for (std::size_t i = 0; i < t.comments.size(); ++i)
        out << (i ? ", " : "") << '"' << json_escape(t.comments[i]) << '"';
    out << "],\n  \"rows\": [\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out << "    {";
        for (std::size_t j = 0; j < t.columns.size(); ++j)
            out << (j ? ", " : "") << '"' << json_escape(t.columns[j])
                << "\": " << format_g17(t.rows[i][j]);
        out << '}' << (i + 1 < t.rows.size() ? "," : "") << '\n';
    }
    out << "  ]\n}\n";
    return out.str();
}

inline std::string to_csv(const TableSet& ts) {
    std::ostringstream out;
    for (std::size_t s = 0; s < ts.sections.size(); ++s) {
        if (s) out << '\n';
        out << "# section: " << ts.sections[s].first << '\n';
        out << to_csv(ts.sections[s].second);
    }
    return out.str();
}

inline std::string to_json(const TableSet& ts) {
    std::ostringstream out;
    out << "{\n";
    for (std::size_t s = 0; s < ts.sections.size(); ++s) {
        std::string body = to_json(ts.sections[s].second);
        if (!body.empty() && body.back() == '\n') body.pop_back();
        out << '"' << json_escape(ts.sections[s].first) << "\": " << body;
        out << (s + 1 < ts.sections.size() ? ",\n" : "\n");
    }
    out << "}\n";
    return out.str();
}

inline Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string c = line.substr(1);
            if (!c.empty() && c[0] == ' ') c.erase(0, 1);
            t.comments.push_back(c);
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!header_seen) {
            t.columns = cells;
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Splits a sectioned CSV stream ("# section: name" markers) back into
/// named tables.
inline TableSet parse_csv_sections(const std::string& text) {
    TableSet ts;
    std::istringstream in(text);
    std::string line;
    std::string current_name;
    std::string current_body;
    auto flush = [&]() {
        if (!current_name.empty()) ts.sections.emplace_back(current_name, parse_csv(current_body));
        current_body.clear();
    };
    const std::string marker = "# section: ";
    while (std::getline(in, line)) {
        if (line.rfind(marker, 0) == 0) {
            flush();
            current_name = line.substr(marker.size());
            continue;
        }
        current_body += line;
        current_body += '\n';
    }
    flush();
    return ts;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_file: cannot open '" + path + "'");
    out << contents;
    if (!out) throw std::runtime_error("write_file: write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace rfvar
