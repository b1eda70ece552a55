#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace microtext::csv {

/// Quotes a field when it is empty or contains a comma, space, quote or
/// line break. Embedded quotes are doubled.
std::string escape(std::string_view field);

/// Splits one CSV record. Quoted fields may contain commas and doubled
/// quotes; throws InvalidArgument on an unterminated quote.
std::vector<std::string> split_record(std::string_view line);

std::string join_record(const std::vector<std::string>& fields);

}  // namespace microtext::csv
