#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

namespace uoqs::csv {

/// One record plus the 1-based line number it started on.
struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// Incremental RFC-4180 reader: quoted fields, doubled-quote escapes, commas
/// and line breaks inside quotes, LF or CRLF line endings.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::optional<Record> next() {
    int c = in_.get();
    if (c == std::istream::traits_type::eof()) return std::nullopt;
    Record rec;
    rec.line = line_;
    std::string field;
    bool quoted = false;
    while (true) {
      if (c == std::istream::traits_type::eof()) break;
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == '"' && field.empty()) {
        quoted = true;
      } else if (ch == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
      } else if (ch == '\n') {
        ++line_;
        break;
      } else if (ch == '\r' && in_.peek() == '\n') {
        in_.get();
        ++line_;
        break;
      } else {
        field.push_back(ch);
      }
      c = in_.get();
    }
    rec.fields.push_back(std::move(field));
    return rec;
  }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

/// Shortest decimal text that round-trips the value; "nan"/"inf" for
/// non-finite input. Locale-free and deterministic.
inline std::string format_double(double v) {
  char buf[64];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const std::from_chars_result res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_int(const std::string& s) {
  std::int64_t v = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const std::from_chars_result res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return v;
}

/// Quote a field only when RFC-4180 requires it.
inline std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(',');
    out << escape(fields[i]);
  }
  out.put('\n');
}

}  // namespace uoqs::csv
