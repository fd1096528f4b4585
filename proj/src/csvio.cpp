#include "hapsim/csvio.hpp"

#include <cstdio>
#include <sstream>

namespace hapsim {

CsvWriter::CsvWriter(const std::string& path, const std::string& schema_name, int major,
                     const std::vector<std::string>& columns)
    : out_(path) {
  if (!out_) throw ConfigError("cannot open '" + path + "' for writing");
  out_ << "# schema=hapsim." << schema_name << "/" << major << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::field(const std::string& v) {
  if (row_open_) out_ << ",";
  out_ << v;
  row_open_ = true;
}

void CsvWriter::field(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  field(std::string(buf));
}

void CsvWriter::field(long v) { field(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << "\n";
  row_open_ = false;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  throw ConfigError("csv column '" + name + "' not found");
}

CsvTable read_csv(const std::string& path, const std::string& expect_schema, int expect_major) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
  CsvTable table;
  const std::string tag = "# schema=hapsim.";
  if (line.rfind(tag, 0) != 0) throw ConfigError("'" + path + "' is missing the schema line");
  const auto slash = line.find('/', tag.size());
  if (slash == std::string::npos) throw ConfigError("'" + path + "' has a malformed schema line");
  table.schema_name = line.substr(tag.size(), slash - tag.size());
  table.major = std::stoi(line.substr(slash + 1));
  if (table.schema_name != expect_schema)
    throw ConfigError("'" + path + "' holds schema '" + table.schema_name + "', expected '" +
                      expect_schema + "'");
  if (table.major != expect_major)
    throw ConfigError("'" + path + "' has unsupported schema major version " +
                      std::to_string(table.major));

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  if (!std::getline(in, line)) throw ConfigError("'" + path + "' is missing a header row");
  table.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split(line));
  }
  return table;
}

}  // namespace hapsim
