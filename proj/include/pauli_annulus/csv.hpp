#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace pauli_annulus::csv {

/// 17 significant digits, '.' decimal separator regardless of locale.
inline std::string number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

inline std::string number(long long value) { return std::to_string(value); }
inline std::string number(int value) { return std::to_string(value); }

/// RFC-4180 field quoting.
inline std::string field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

/// Writes one record terminated by CRLF.
inline void row(std::ostream& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out << ',';
    out << f;
    first = false;
  }
  out << "\r\n";
}

}  // namespace pauli_annulus::csv
