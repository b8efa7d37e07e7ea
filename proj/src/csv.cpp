#include "idsfed/csv.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "idsfed/errors.hpp"

namespace idsfed {

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n\f\v";
    const auto begin = s.find_first_not_of(ws);
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

namespace {

bool all_cells_blank(const std::vector<std::string>& cells) {
    for (const auto& c : cells) {
        if (!trim(c).empty()) return false;
    }
    return true;
}

std::vector<std::string> dedupe_headers(std::vector<std::string> headers) {
    std::unordered_set<std::string> seen;
    for (auto& h : headers) {
        if (seen.insert(h).second) continue;
        // CICIDS2017 ships files with a repeated column name; disambiguate
        // deterministically instead of rejecting the file.
        int suffix = 1;
        std::string candidate;
        do {
            candidate = h + "." + std::to_string(suffix++);
        } while (seen.count(candidate));
        h = candidate;
        seen.insert(h);
    }
    return headers;
}

}  // namespace

RawTable parse_csv(const std::string& text, const std::string& source_path) {
    RawTable table;
    table.source_path = source_path;

    std::size_t i = 0;
    const std::size_t n = text.size();
    if (n >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;  // UTF-8 BOM

    std::size_t line = 1;
    bool have_header = false;

    while (i < n) {
        const std::size_t record_line = line;
        std::vector<std::string> cells;
        std::string field;
        bool in_quotes = false;
        bool record_done = false;

        while (i < n && !record_done) {
            const char ch = text[i];
            if (in_quotes) {
                if (ch == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field += '"';
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (ch == '\n') ++line;
                    field += ch;
                    ++i;
                }
            } else if (ch == '"') {
                in_quotes = true;
                ++i;
            } else if (ch == ',') {
                cells.push_back(std::move(field));
                field.clear();
                ++i;
            } else if (ch == '\n' || ch == '\r') {
                if (ch == '\r' && i + 1 < n && text[i + 1] == '\n') ++i;
                ++i;
                ++line;
                record_done = true;
            } else {
                field += ch;
                ++i;
            }
        }
        if (in_quotes) {
            throw DataError(source_path + ": unterminated quoted field starting near line " +
                            std::to_string(record_line));
        }
        cells.push_back(std::move(field));

        if (cells.size() <= 1 && all_cells_blank(cells)) continue;  // blank line

        if (!have_header) {
            for (auto& h : cells) h = trim(h);
            table.headers = dedupe_headers(std::move(cells));
            have_header = true;
            continue;
        }
        if (cells.size() != table.headers.size()) {
            throw DataError(source_path + ": line " + std::to_string(record_line) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(table.headers.size()));
        }
        table.rows.push_back(std::move(cells));
    }

    if (!have_header) throw DataError(source_path + ": empty file, no header row");
    return table;
}

RawTable load_flow_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open CSV file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path);
}

}  // namespace idsfed
