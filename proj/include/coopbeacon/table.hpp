#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "coopbeacon/config.hpp"

namespace coopbeacon {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws std::logic_error when the row width does not match the header.
  void add_row(std::vector<Cell> row);
};

/// Header plus one line per row; doubles with 10 significant digits.
void write_csv(const Table& table, std::ostream& out);

/// {"meta": {...}, "rows": [{column: value, ...}, ...]} with doubles at full precision.
void write_json(const Table& table, const std::map<std::string, std::string>& meta, std::ostream& out);

/// Writes to `path` (stdout when empty). I/O failures raise IoError.
void emit_table(const Table& table, const std::map<std::string, std::string>& meta, TableFormat format,
                const std::filesystem::path& path, std::ostream& stdout_sink);

/// Reads a JSON table written by write_json.
Table read_json_table(std::istream& in, std::map<std::string, std::string>* meta = nullptr);

}  // namespace coopbeacon
