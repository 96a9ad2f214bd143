#include "table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace weaknoise::cli {

namespace {

bool matches(const Cell& cell, ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Real: return std::holds_alternative<double>(cell);
    case ColumnKind::Integer: return std::holds_alternative<std::int64_t>(cell);
    case ColumnKind::Boolean: return std::holds_alternative<bool>(cell);
    case ColumnKind::Text: return std::holds_alternative<std::string>(cell);
  }
  return false;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_real(v);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "1" : "0";
        else return quote_csv(v);
      },
      cell);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad real '" + s + "'");
  return v;
}

Cell parse_cell(const std::string& s, ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Real: return parse_real(s);
    case ColumnKind::Integer: return static_cast<std::int64_t>(std::stoll(s));
    case ColumnKind::Boolean:
      if (s == "1") return true;
      if (s == "0") return false;
      throw std::runtime_error("bad boolean '" + s + "'");
    case ColumnKind::Text: return s;
  }
  return s;
}

nlohmann::json cell_json(const Cell& cell) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, cell);
}

Cell json_cell(const nlohmann::json& j, ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Real: return j.is_null() ? std::nan("") : j.get<double>();
    case ColumnKind::Integer: return j.get<std::int64_t>();
    case ColumnKind::Boolean: return j.get<bool>();
    case ColumnKind::Text: return j.get<std::string>();
  }
  return std::string{};
}

}  // namespace

Format format_from_string(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw std::invalid_argument("unknown format '" + name + "' (expected csv or json)");
}

std::string to_string(Format format) { return format == Format::Csv ? "csv" : "json"; }

void Table::add(Row row) {
  if (row.size() != columns.size()) throw std::logic_error("row width differs from the schema");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!matches(row[i], columns[i].kind)) throw std::logic_error("cell type differs from column '" + columns[i].name + "'");
  }
  rows.push_back(std::move(row));
}

bool operator==(const Table& a, const Table& b) {
  if (a.columns.size() != b.columns.size() || a.rows != b.rows || a.notes != b.notes) return false;
  for (std::size_t i = 0; i < a.columns.size(); ++i) {
    if (a.columns[i].name != b.columns[i].name || a.columns[i].kind != b.columns[i].kind) return false;
  }
  return true;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string emit_table(const Table& table, Format format) {
  if (format == Format::Json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Row& row : table.rows) {
      nlohmann::json o = nlohmann::json::object();
      for (std::size_t i = 0; i < row.size(); ++i) o[table.columns[i].name] = cell_json(row[i]);
      arr.push_back(o);
    }
    return arr.dump(1) + "\n";
  }
  std::ostringstream out;
  for (const std::string& note : table.notes) out << "# " << note << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i].name;
  out << "\n";
  for (const Row& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << "\n";
  }
  return out.str();
}

void write_table(const std::string& path, const Table& table, Format format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << emit_table(table, format);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Table parse_table(const std::string& text, const std::vector<Column>& schema, Format format) {
  Table table;
  table.columns = schema;
  if (format == Format::Json) {
    const nlohmann::json arr = nlohmann::json::parse(text);
    for (const auto& obj : arr) {
      Row row;
      for (const Column& c : schema) row.push_back(json_cell(obj.at(c.name), c.kind));
      table.add(std::move(row));
    }
    return table;
  }
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!header && line.rfind("# ", 0) == 0) {
      table.notes.push_back(line.substr(2));
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (!header) {
      if (fields.size() != schema.size()) throw std::runtime_error("header width differs from the schema");
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] != schema[i].name) throw std::runtime_error("unexpected column '" + fields[i] + "'");
      }
      header = true;
      continue;
    }
    if (fields.size() != schema.size()) throw std::runtime_error("row width differs from the schema");
    Row row;
    for (std::size_t i = 0; i < fields.size(); ++i) row.push_back(parse_cell(fields[i], schema[i].kind));
    table.add(std::move(row));
  }
  if (!header) throw std::runtime_error("missing header row");
  return table;
}

}  // namespace weaknoise::cli
