#pragma once

#include <string>
#include <vector>

namespace idsfed {

// One parsed CSV file: trimmed unique headers plus raw string cells.
// Every row has exactly headers.size() cells.
struct RawTable {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
    std::string source_path;
};

// Parses RFC-4180-style CSV text (quoted fields, escaped quotes, CR/LF,
// embedded newlines inside quotes). Header names are whitespace-trimmed;
// duplicate names are disambiguated with .1, .2, ... suffixes. Blank lines
// are skipped. Throws DataError on arity mismatches, naming the 1-based
// physical line the record started on.
RawTable parse_csv(const std::string& text, const std::string& source_path = "<memory>");

// Loads a CICFlowMeter-style flow CSV from disk. Throws DataError if the
// file is missing or malformed.
RawTable load_flow_csv(const std::string& path);

std::string trim(const std::string& s);

}  // namespace idsfed
