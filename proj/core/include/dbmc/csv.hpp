#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dbmc/matrix.hpp"

namespace dbmc::csv {

// Shortest decimal form that parses back to the same double.
std::string format(double value);
std::string format(long long value);
std::string format(unsigned long long value);
inline std::string format(int value) { return format(static_cast<long long>(value)); }
inline std::string format(unsigned value) { return format(static_cast<unsigned long long>(value)); }
inline std::string format(std::size_t value) { return format(static_cast<unsigned long long>(value)); }
inline std::string format(bool value) { return value ? "true" : "false"; }
inline std::string format(std::string_view value) { return std::string(value); }
inline std::string format(const char* value) { return value; }

using Metadata = std::vector<std::pair<std::string, std::string>>;

// Comma-separated output with a leading block of "# key: value" lines and
// one header row.
class Writer {
 public:
  Writer(std::ostream& out, const Metadata& metadata, std::initializer_list<std::string_view> header);
  Writer(std::ostream& out, const Metadata& metadata, const std::vector<std::string>& header);

  template <typename... Fields>
  void row(const Fields&... fields) {
    std::string line;
    bool first = true;
    ((line += (first ? "" : ","), line += format(fields), first = false), ...);
    out_ << line << '\n';
  }

  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

// Full matrix, header "node_id,0,1,...", one row per node.
void write_matrix(std::ostream& out, const Matrix& m, const Metadata& metadata);

}  // namespace dbmc::csv
