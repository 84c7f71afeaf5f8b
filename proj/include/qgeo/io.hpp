#ifndef QGEO_IO_HPP
#define QGEO_IO_HPP

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qgeo/common.hpp"
#include "qgeo/dataset.hpp"

namespace qgeo {

enum class DatasetFormat { Csv, Binary };

namespace detail {

constexpr char kMagic[4] = {'Q', 'G', 'E', 'O'};

inline void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw FormatError("unexpected end of binary stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline void write_f64(std::ostream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  write_u64(out, bits);
}

inline double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

/// Shortest digit string that round-trips a double (up to 17 significant
/// digits), used for all CSV numeric output.
inline std::string format_double(double x) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf, static_cast<size_t>(len));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

inline double parse_double(const std::string& field, Index row, Index col) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw FormatError("cannot parse number '" + field + "' at row " +
                      std::to_string(row) + ", column " + std::to_string(col));
  }
  return value;
}

}  // namespace detail

/// Writes one matrix block: magic "QGEO", u64 rows, u64 cols, then row-major
/// little-endian float64 entries.
inline void write_qgeo_block(std::ostream& out, const Matrix& m) {
  out.write(detail::kMagic, 4);
  detail::write_u64(out, static_cast<std::uint64_t>(m.rows()));
  detail::write_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) detail::write_f64(out, m(i, j));
  }
}

inline Matrix read_qgeo_block(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, detail::kMagic, 4) != 0) {
    throw FormatError("bad magic, not a QGEO matrix block");
  }
  const auto rows = static_cast<Index>(detail::read_u64(in));
  const auto cols = static_cast<Index>(detail::read_u64(in));
  if (rows < 0 || cols < 0 || (rows > 0 && cols > (1ll << 40) / rows)) {
    throw FormatError("implausible QGEO matrix shape");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = detail::read_f64(in);
  }
  return m;
}

inline void save_dataset(const Dataset& data, const std::string& path,
                         DatasetFormat format) {
  validate(data);
  if (format == DatasetFormat::Binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open file for writing: " + path);
    write_qgeo_block(out, data.points);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  const bool with_ids = !data.ids.empty();
  if (with_ids) out << "id,";
  for (Index j = 0; j < data.dim(); ++j) {
    out << 'x' << j << (j + 1 < data.dim() ? "," : "\n");
  }
  for (Index i = 0; i < data.size(); ++i) {
    if (with_ids) out << data.ids[static_cast<size_t>(i)] << ',';
    for (Index j = 0; j < data.dim(); ++j) {
      out << detail::format_double(data.points(i, j))
          << (j + 1 < data.dim() ? "," : "\n");
    }
  }
}

/// Loads a dataset. CSV requires a header row; a leading "id" column carries
/// sample ids. Binary is the QGEO block format.
inline Dataset load_dataset(const std::string& path, DatasetFormat format) {
  Dataset data;
  if (format == DatasetFormat::Binary) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    data.points = read_qgeo_block(in);
    validate(data);
    return data;
  }
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV file: " + path);
  const auto header = detail::split_csv_line(line);
  const bool with_ids = !header.empty() && header.front() == "id";
  const Index n = static_cast<Index>(header.size()) - (with_ids ? 1 : 0);
  if (n < 1) throw FormatError("CSV header declares no coordinate columns");

  std::vector<double> values;
  Index rows = 0;
  for (Index row = 1; std::getline(in, line); ++row) {
    if (line.empty() && in.eof()) break;
    const auto fields = detail::split_csv_line(line);
    if (static_cast<Index>(fields.size()) != n + (with_ids ? 1 : 0)) {
      throw FormatError("row " + std::to_string(row) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(n + (with_ids ? 1 : 0)));
    }
    if (with_ids) data.ids.push_back(fields.front());
    for (Index j = 0; j < n; ++j) {
      values.push_back(
          detail::parse_double(fields[static_cast<size_t>(j) + (with_ids ? 1 : 0)],
                               row, j));
    }
    ++rows;
  }
  data.points = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(values.data(), rows, n);
  validate(data);
  return data;
}

}  // namespace qgeo

#endif  // QGEO_IO_HPP
