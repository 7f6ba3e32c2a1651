#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "regionlab/error.hpp"

namespace regionlab {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        fail("CSV is missing required column '", name, "'");
    }

    bool has_column(const std::string& name) const {
        for (const auto& h : header)
            if (h == name)
                return true;
        return false;
    }
};

/// Reads a CSV file with a mandatory header row. Quoted fields may contain
/// commas, doubled quotes, and newlines; rows end on LF, CRLF, or lone CR.
/// Blank lines between rows are skipped; values are kept as strings.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open '", path, "'");
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

    CsvTable table;
    bool have_header = false;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool row_has_content = false;

    const auto end_row = [&] {
        fields.push_back(std::move(field));
        field.clear();
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            require(fields.size() == table.header.size(), "'", path, "': row with ",
                    fields.size(), " fields, header has ", table.header.size());
            table.rows.push_back(std::move(fields));
        }
        fields.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
            continue; // the LF below terminates the row
        if (c == '\n' || c == '\r') {
            if (row_has_content || !field.empty() || !fields.empty())
                end_row();
            continue;
        }
        row_has_content = true;
        if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    require(!quoted, "'", path, "': unterminated quoted field");
    if (row_has_content || !field.empty() || !fields.empty())
        end_row();
    require(have_header, "'", path, "': missing header row");
    return table;
}

inline std::string csv_quote(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos)
        return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"')
            quoted += "\"\"";
        else
            quoted.push_back(c);
    }
    quoted.push_back('"');
    return quoted;
}

inline double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        require(used == text.size(), "");
        return value;
    } catch (...) {
        fail("cannot parse '", text, "' as a number (", context, ")");
    }
}

inline bool parse_bool(const std::string& text, const std::string& context) {
    if (text == "1" || text == "true" || text == "True" || text == "TRUE")
        return true;
    if (text == "0" || text == "false" || text == "False" || text == "FALSE")
        return false;
    fail("cannot parse '", text, "' as a boolean (", context, ")");
}

} // namespace regionlab
