#pragma once

// Minimal RFC-4180 reader: comma separated, double-quoted fields with ""
// escapes, CRLF or LF line ends, optional UTF-8 byte-order mark.

#include <istream>
#include <string>
#include <vector>

namespace seer::cli {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header name, or -1.
    long column(const std::string& name) const;
};

/// Throws ConfigError on an unterminated quote, an empty input or a row
/// whose field count differs from the header's.
CsvTable parse_csv(std::istream& in, const std::string& source = "<csv>");
CsvTable read_csv(const std::string& path);

/// Parses a whole cell as a finite double (surrounding blanks allowed).
bool parse_number(const std::string& cell, double& out);

} // namespace seer::cli
