#pragma once

#include "nysvm/types.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

namespace nysvm {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

/// Shortest round-trip decimal representation.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& token, std::size_t line) {
  const char* first = token.data();
  const char* last = first + token.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects '+1'
  double value = 0.0;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(line, "invalid number '" + token + "'");
  return value;
}

inline std::ofstream open_output(const std::filesystem::path& path,
                                 std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_input(const std::filesystem::path& path,
                                std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

namespace detail {

inline void write_u64(std::ostream& out, std::uint64_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

inline void write_f64(std::ostream& out, double value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

inline std::uint64_t read_u64(std::istream& in) {
  std::uint64_t value = 0;
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  if (!in) throw IoError("unexpected end of binary stream");
  return value;
}

inline double read_f64(std::istream& in) {
  double value = 0.0;
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  if (!in) throw IoError("unexpected end of binary stream");
  return value;
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  write_u64(out, static_cast<std::uint64_t>(m.rows()));
  write_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) write_f64(out, m(i, j));
}

inline Matrix read_matrix(std::istream& in) {
  const auto rows = static_cast<Index>(read_u64(in));
  const auto cols = static_cast<Index>(read_u64(in));
  if (rows < 0 || cols < 0 || (rows > 0 && cols > 0 && rows > (1LL << 32) / cols))
    throw IoError("corrupt matrix header");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = read_f64(in);
  return m;
}

inline void write_vector(std::ostream& out, const Vector& v) {
  write_u64(out, static_cast<std::uint64_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) write_f64(out, v(i));
}

inline Vector read_vector(std::istream& in) {
  const auto n = static_cast<Index>(read_u64(in));
  if (n < 0) throw IoError("corrupt vector header");
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = read_f64(in);
  return v;
}

}  // namespace detail

/// Square-matrix text format: first line holds n, then n comma-separated rows.
inline void save_square_matrix_csv(const std::filesystem::path& path,
                                   const Matrix& m) {
  if (m.rows() != m.cols())
    throw InvalidInputError("save_square_matrix_csv: matrix must be square");
  auto out = open_output(path);
  out << m.rows() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline Matrix load_square_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, "missing size header");
  long long n = 0;
  const auto res =
      std::from_chars(header.data(), header.data() + header.size(), n);
  if (res.ec != std::errc() || n < 0)
    throw ParseError(1, "invalid size header '" + header + "'");
  Matrix m(n, n);
  std::string row;
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(in, row)) throw ParseError(i + 2, "missing matrix row");
    std::stringstream cells(row);
    std::string cell;
    for (Index j = 0; j < n; ++j) {
      if (!std::getline(cells, cell, ','))
        throw ParseError(i + 2, "expected " + std::to_string(n) + " columns");
      m(i, j) = parse_double(cell, static_cast<std::size_t>(i + 2));
    }
    if (std::getline(cells, cell))
      throw ParseError(i + 2, "extra columns beyond " + std::to_string(n));
  }
  return m;
}

inline constexpr std::uint64_t kKernelMatrixMagic = 0x314d4b5359564e00ULL;

/// Square-matrix binary format: magic, n, then row-major doubles.
inline void save_square_matrix_binary(const std::filesystem::path& path,
                                      const Matrix& m) {
  if (m.rows() != m.cols())
    throw InvalidInputError("save_square_matrix_binary: matrix must be square");
  auto out = open_output(path, std::ios::binary);
  detail::write_u64(out, kKernelMatrixMagic);
  detail::write_u64(out, static_cast<std::uint64_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) detail::write_f64(out, m(i, j));
}

inline Matrix load_square_matrix_binary(const std::filesystem::path& path) {
  auto in = open_input(path, std::ios::binary);
  if (detail::read_u64(in) != kKernelMatrixMagic)
    throw IoError("not a kernel matrix file: " + path.string());
  const auto n = static_cast<Index>(detail::read_u64(in));
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = detail::read_f64(in);
  return m;
}

/// Accepts either the binary format (detected by magic) or the CSV format.
inline Matrix load_square_matrix(const std::filesystem::path& path) {
  {
    auto in = open_input(path, std::ios::binary);
    std::uint64_t magic = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
    if (in && magic == kKernelMatrixMagic) {
      in.close();
      return load_square_matrix_binary(path);
    }
  }
  return load_square_matrix_csv(path);
}

}  // namespace nysvm
