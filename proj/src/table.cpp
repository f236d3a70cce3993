#include "coopbeacon/table.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace coopbeacon {

namespace {
std::string csv_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *d);
    return buf;
  }
  if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) {
    return std::to_string(*i);
  }
  return std::get<std::string>(c);
}
}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("table row has " + std::to_string(row.size()) + " cells, header has " +
                           std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << csv_cell(row[i]);
    }
    out << '\n';
  }
}

void write_json(const Table& table, const std::map<std::string, std::string>& meta, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["meta"] = meta;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit([&](const auto& v) { obj[table.columns[i]] = v; }, row[i]);
    }
    doc["rows"].push_back(std::move(obj));
  }
  out << doc.dump(2) << '\n';
}

void emit_table(const Table& table, const std::map<std::string, std::string>& meta, TableFormat format,
                const std::filesystem::path& path, std::ostream& stdout_sink) {
  auto write = [&](std::ostream& os) {
    if (format == TableFormat::Csv) {
      write_csv(table, os);
    } else {
      write_json(table, meta, os);
    }
  };
  if (path.empty()) {
    write(stdout_sink);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
  }
  write(file);
  file.flush();
  if (!file) {
    throw IoError("write to '" + path.string() + "' failed: " + std::strerror(errno));
  }
}

Table read_json_table(std::istream& in, std::map<std::string, std::string>* meta) {
  const nlohmann::ordered_json doc = nlohmann::ordered_json::parse(in);
  Table table;
  if (meta != nullptr) {
    *meta = doc.at("meta").get<std::map<std::string, std::string>>();
  }
  const auto& rows = doc.at("rows");
  if (!rows.empty()) {
    for (const auto& [key, _] : rows.front().items()) {
      table.columns.push_back(key);
    }
  }
  for (const auto& obj : rows) {
    std::vector<Cell> row;
    for (const auto& name : table.columns) {
      const auto& v = obj.at(name);
      if (v.is_number_integer()) {
        row.emplace_back(v.get<std::int64_t>());
      } else if (v.is_number()) {
        row.emplace_back(v.get<double>());
      } else {
        row.emplace_back(v.get<std::string>());
      }
    }
    table.add_row(std::move(row));
  }
  return table;
}

}  // namespace coopbeacon
