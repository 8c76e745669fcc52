#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace propshift::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and
/// newlines. Accepts LF or CRLF; a trailing newline does not add a row.
/// Throws SchemaError on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);

std::string join(const Row& row);

}  // namespace propshift::csv
