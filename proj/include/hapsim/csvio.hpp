#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "hapsim/common.hpp"

namespace hapsim {

// CSV files start with a "# schema=hapsim.<name>/<major>" line; readers
// reject unknown names and major versions.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& schema_name, int major,
            const std::vector<std::string>& columns);

  void field(const std::string& v);
  void field(double v);
  void field(long v);
  void field(int v) { field(static_cast<long>(v)); }
  void end_row();

  template <typename... Ts>
  void row(const Ts&... vs) {
    (field(vs), ...);
    end_row();
  }

 private:
  std::ofstream out_;
  bool row_open_ = false;
};

struct CsvTable {
  std::string schema_name;
  int major = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path, const std::string& expect_schema, int expect_major);

}  // namespace hapsim
