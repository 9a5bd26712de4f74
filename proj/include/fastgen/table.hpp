#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fastgen {

struct Column {
  std::string name;
  std::vector<std::string> values;
  friend bool operator==(const Column&, const Column&) = default;
};

// Ordered, named, string-typed columns of equal length. Numeric
// interpretation is left to consumers.
class Table {
 public:
  Table() = default;
  explicit Table(std::size_t row_count) : row_count_(row_count) {}
  // Throws InputError on duplicate names or ragged columns.
  explicit Table(std::vector<Column> columns);

  void add_column(Column column);

  [[nodiscard]] std::size_t row_count() const noexcept { return row_count_; }
  [[nodiscard]] std::size_t column_count() const noexcept { return columns_.size(); }
  [[nodiscard]] std::span<const Column> columns() const noexcept { return columns_; }

  // nullptr when absent.
  [[nodiscard]] const Column* find(std::string_view name) const noexcept;
  // Throws InputError when absent.
  [[nodiscard]] const Column& column(std::string_view name) const;

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
};

// RFC-4180 CSV with a header row. LF and CRLF line endings are accepted.
// Row numbers in errors are 1-based and count the header as row 1.
[[nodiscard]] Table parse_table(std::string_view raw);

// Emits LF line endings. Cells are quoted only when needed; an empty cell in
// a single-column table is written as "" so that every row is non-blank.
[[nodiscard]] std::string serialize_table(const Table& table);

// One JSON object per row, keys in column order, string values.
[[nodiscard]] std::string serialize_table_jsonl(const Table& table);

}  // namespace fastgen
