#include "microtext/csv.hpp"

#include "microtext/error.hpp"

namespace microtext::csv {

std::string escape(std::string_view field) {
  const bool needs_quotes =
      field.empty() || field.find_first_of(", \"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> split_record(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string current;
  std::size_t i = 0;
  while (true) {
    current.clear();
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            current.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        current.push_back(line[i++]);
      }
      if (!closed) throw InvalidArgument("unterminated quoted CSV field");
      if (i < line.size() && line[i] != ',') {
        throw InvalidArgument("unexpected character after quoted CSV field");
      }
    } else {
      while (i < line.size() && line[i] != ',') current.push_back(line[i++]);
    }
    fields.push_back(current);
    if (i >= line.size()) break;
    ++i;  // comma
  }
  return fields;
}

std::string join_record(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace microtext::csv
