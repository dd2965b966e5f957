#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lsx::csv {

/// Shortest decimal form that round-trips to the same double.
std::string fmt(double x);

/// RFC 4180 quoting: fields with comma, quote, CR or LF are quoted, quotes doubled.
std::string quote(std::string_view field);

/// Writes one record terminated by CRLF-free "\n".
void write_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace lsx::csv
