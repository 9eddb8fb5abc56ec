#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// RFC-4180 CSV reader/writer: quoted fields, "" escapes, embedded commas and
// newlines, CRLF or LF line endings, UTF-8 passthrough. Parse errors carry
// the file name and the physical line where the record starts.

namespace cordel::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based physical line of the record start
};

inline std::vector<Row> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  std::size_t pos = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xef\xbb\xbf") == 0) {
    pos = 3;  // UTF-8 BOM
  }

  std::vector<Row> rows;
  std::size_t line = 1;
  Row row;
  row.line = line;
  std::string field;
  bool in_quotes = false;
  bool record_open = false;  // any char consumed for the current record

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    rows.push_back(std::move(row));
    row = Row{};
  };

  const std::size_t n = text.size();
  while (pos < n) {
    char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < n && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
        } else {
          in_quotes = false;
          ++pos;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
        ++pos;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        record_open = true;
        ++pos;
        break;
      case ',':
        end_field();
        record_open = true;
        ++pos;
        break;
      case '\r':
        if (pos + 1 < n && text[pos + 1] == '\n') ++pos;  // fold CRLF
        [[fallthrough]];
      case '\n':
        ++line;
        end_record();
        row.line = line;
        record_open = false;
        ++pos;
        break;
      default:
        field.push_back(c);
        record_open = true;
        ++pos;
        break;
    }
  }
  if (in_quotes) {
    throw std::runtime_error(path.string() + ":" + std::to_string(row.line) +
                             ": unterminated quoted field");
  }
  if (record_open || !field.empty() || !row.fields.empty()) {
    end_record();  // final record without trailing newline
  }
  return rows;
}

inline std::string escape(const std::string& field) {
  bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
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

}  // namespace cordel::csv
