#pragma once

// Row tables written by every command. CSV uses a header row and %.17g for
// reals so equal inputs give equal bytes; lines starting with '#' before the
// header carry free-form notes (units) and are skipped on parse.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace weaknoise::cli {

enum class Format { Csv, Json };

Format format_from_string(const std::string& name);
std::string to_string(Format format);

enum class ColumnKind { Real, Integer, Boolean, Text };

struct Column {
  std::string name;
  ColumnKind kind;
};

using Cell = std::variant<double, std::int64_t, bool, std::string>;
using Row = std::vector<Cell>;

struct Table {
  std::vector<Column> columns;
  std::vector<Row> rows;
  std::vector<std::string> notes;

  /// Appends a row after checking it against the schema.
  void add(Row row);
};

bool operator==(const Table& a, const Table& b);

std::string format_real(double value);

std::string emit_table(const Table& table, Format format);
void write_table(const std::string& path, const Table& table, Format format);

/// Inverse of emit_table for the given schema; notes are kept.
Table parse_table(const std::string& text, const std::vector<Column>& schema, Format format);

}  // namespace weaknoise::cli
