#include "dbmc/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace dbmc::csv {

std::string format(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("csv::format: to_chars failed");
  return std::string(buf, end);
}

std::string format(long long value) { return std::to_string(value); }
std::string format(unsigned long long value) { return std::to_string(value); }

namespace {

void write_metadata(std::ostream& out, const Metadata& metadata) {
  for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << '\n';
}

}  // namespace

Writer::Writer(std::ostream& out, const Metadata& metadata,
               std::initializer_list<std::string_view> header)
    : out_(out) {
  write_metadata(out_, metadata);
  bool first = true;
  for (std::string_view h : header) {
    out_ << (first ? "" : ",") << h;
    first = false;
  }
  out_ << '\n';
}

Writer::Writer(std::ostream& out, const Metadata& metadata, const std::vector<std::string>& header)
    : out_(out) {
  write_metadata(out_, metadata);
  row(header);
}

void Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
  out_ << '\n';
}

void write_matrix(std::ostream& out, const Matrix& m, const Metadata& metadata) {
  std::vector<std::string> header{"node_id"};
  for (std::size_t j = 0; j < m.cols(); ++j) header.push_back(std::to_string(j));
  Writer w(out, metadata, header);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::string> fields{std::to_string(i)};
    for (std::size_t j = 0; j < m.cols(); ++j) fields.push_back(format(m(i, j)));
    w.row(fields);
  }
}

}  // namespace dbmc::csv
