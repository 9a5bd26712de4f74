#include "fastgen/table.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include <json.hpp>

#include "fastgen/error.hpp"

namespace fastgen {

Table::Table(std::vector<Column> columns) {
  if (!columns.empty()) row_count_ = columns.front().values.size();
  for (auto& c : columns) add_column(std::move(c));
}

void Table::add_column(Column column) {
  if (find(column.name) != nullptr) {
    throw InputError("duplicate column name '" + column.name + "'");
  }
  if (columns_.empty() && row_count_ == 0) row_count_ = column.values.size();
  if (column.values.size() != row_count_) {
    throw InputError("column '" + column.name + "' has " + std::to_string(column.values.size()) +
                     " values, expected " + std::to_string(row_count_));
  }
  columns_.push_back(std::move(column));
}

const Column* Table::find(std::string_view name) const noexcept {
  auto it = std::find_if(columns_.begin(), columns_.end(),
                         [&](const Column& c) { return c.name == name; });
  return it == columns_.end() ? nullptr : &*it;
}

const Column& Table::column(std::string_view name) const {
  if (const Column* c = find(name)) return *c;
  throw InputError("no column named '" + std::string(name) + "'");
}

namespace {

struct Record {
  std::vector<std::string> cells;
  bool blank = false;  // a line with no characters at all
};

std::vector<Record> split_records(std::string_view raw) {
  std::vector<Record> records;
  Record current;
  std::string cell;
  bool in_quotes = false;
  bool after_quote = false;  // just closed a quoted cell
  bool line_has_content = false;
  std::size_t line = 1;

  auto end_cell = [&] {
    current.cells.push_back(std::move(cell));
    cell.clear();
    after_quote = false;
  };
  auto end_record = [&] {
    end_cell();
    current.blank = !line_has_content;
    records.push_back(std::move(current));
    current = Record{};
    line_has_content = false;
    ++line;
  };

  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < raw.size() && raw[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      line_has_content = true;
      end_cell();
    } else if (c == '\n' || (c == '\r' && i + 1 < raw.size() && raw[i + 1] == '\n')) {
      if (c == '\r') ++i;
      end_record();
    } else if (after_quote) {
      throw InputError("CSV syntax error at row " + std::to_string(line) +
                       ": unexpected character after closing quote");
    } else if (c == '"' && cell.empty()) {
      in_quotes = true;
      line_has_content = true;
    } else {
      cell.push_back(c);
      line_has_content = true;
    }
  }
  if (in_quotes) {
    throw InputError("CSV syntax error at row " + std::to_string(line) +
                     ": unterminated quoted field");
  }
  // A trailing line terminator does not start a new record.
  if (line_has_content || !cell.empty()) end_record();
  return records;
}

bool needs_quotes(const std::string& cell, bool single_column) {
  if (cell.empty()) return single_column;
  return cell.find_first_of(",\"\r\n") != std::string::npos;
}

void append_cell(std::string& out, const std::string& cell, bool single_column) {
  if (!needs_quotes(cell, single_column)) {
    out += cell;
    return;
  }
  out.push_back('"');
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

}  // namespace

Table parse_table(std::string_view raw) {
  if (raw.empty()) throw InputError("CSV input is empty");
  std::vector<Record> records = split_records(raw);
  if (records.empty()) throw InputError("CSV input is empty");

  const std::vector<std::string>& header = records.front().cells;
  const bool single_column = header.size() == 1;
  std::vector<Column> columns(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) columns[c].name = header[c];

  for (std::size_t r = 1; r < records.size(); ++r) {
    const Record& rec = records[r];
    if (rec.blank && !single_column) continue;
    if (rec.cells.size() != header.size()) {
      throw InputError("ragged row at row " + std::to_string(r + 1) + ": expected " +
                       std::to_string(header.size()) + " cells, found " +
                       std::to_string(rec.cells.size()));
    }
    for (std::size_t c = 0; c < header.size(); ++c) columns[c].values.push_back(rec.cells[c]);
  }
  return Table(std::move(columns));
}

std::string serialize_table(const Table& table) {
  std::string out;
  const auto columns = table.columns();
  const bool single_column = columns.size() == 1;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out.push_back(',');
    append_cell(out, columns[c].name, single_column);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out.push_back(',');
      append_cell(out, columns[c].values[r], single_column);
    }
    out.push_back('\n');
  }
  return out;
}

std::string serialize_table_jsonl(const Table& table) {
  std::string out;
  const auto columns = table.columns();
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (const Column& c : columns) row[c.name] = c.values[r];
    out += row.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out.push_back('\n');
  }
  return out;
}

}  // namespace fastgen
