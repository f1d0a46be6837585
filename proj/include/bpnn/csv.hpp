#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bpnn {

// RFC 4180 CSV: comma-delimited, double-quote escaping (embedded quotes
// doubled), fields may contain commas and line breaks when quoted, rows end
// with LF or CRLF. Throws MalformedCsv on unbalanced quoting.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

// Quotes exactly the fields that need it.
void write_csv(std::ostream& out, const std::vector<std::vector<std::string>>& rows);

}  // namespace bpnn
