#include "asctk/nnmx.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "asctk/errors.hpp"

namespace asctk {

namespace {

constexpr char kMagic[4] = {'N', 'N', 'M', 'X'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void write_header(std::ostream& out, bool complex_flag, std::uint64_t rows, std::uint64_t cols) {
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  const char flag = complex_flag ? 1 : 0;
  out.write(&flag, 1);
  put_u64(out, rows);
  put_u64(out, cols);
}

template <typename Writer>
void write_to_file(const std::string& path, Writer writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open for writing: " + path);
  writer(out);
  out.flush();
  if (!out) throw InvalidInputError("write failed: " + path);
}

} // namespace

void write_nnmx(std::ostream& out, const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw InvalidInputError("nnmx: refusing to write non-finite matrix");
  write_header(out, false, static_cast<std::uint64_t>(m.rows()),
               static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_f64(out, m(i, j));
}

void write_nnmx(std::ostream& out, const Eigen::MatrixXcd& m) {
  if (!m.allFinite()) throw InvalidInputError("nnmx: refusing to write non-finite matrix");
  write_header(out, true, static_cast<std::uint64_t>(m.rows()),
               static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_f64(out, m(i, j).real());
      put_f64(out, m(i, j).imag());
    }
}

void write_nnmx_file(const std::string& path, const Eigen::MatrixXd& m) {
  write_to_file(path, [&](std::ostream& out) { write_nnmx(out, m); });
}

void write_nnmx_file(const std::string& path, const Eigen::MatrixXcd& m) {
  write_to_file(path, [&](std::ostream& out) { write_nnmx(out, m); });
}

NnmxMatrix read_nnmx(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw InvalidInputError("nnmx: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != kVersion)
    throw InvalidInputError("nnmx: unsupported version " + std::to_string(version));
  char flag = 0;
  in.read(&flag, 1);
  if (flag != 0 && flag != 1) throw InvalidInputError("nnmx: bad complex flag");
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  if (!in) throw InvalidInputError("nnmx: truncated header");
  if (rows > (1ULL << 32) || cols > (1ULL << 32) ||
      (rows != 0 && cols > (1ULL << 40) / rows))
    throw InvalidInputError("nnmx: implausible dimensions");

  if (flag == 0) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = get_f64(in);
    if (!in) throw InvalidInputError("nnmx: truncated payload");
    return m;
  }
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = get_f64(in);
      const double im = get_f64(in);
      m(i, j) = std::complex<double>(re, im);
    }
  if (!in) throw InvalidInputError("nnmx: truncated payload");
  return m;
}

NnmxMatrix read_nnmx_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open: " + path);
  return read_nnmx(in);
}

Eigen::MatrixXd read_nnmx_real(const std::string& path) {
  NnmxMatrix m = read_nnmx_file(path);
  if (std::holds_alternative<Eigen::MatrixXcd>(m))
    throw InvalidInputError("expected a real matrix: " + path);
  return std::get<Eigen::MatrixXd>(std::move(m));
}

Eigen::MatrixXcd read_nnmx_complex(const std::string& path) {
  NnmxMatrix m = read_nnmx_file(path);
  if (std::holds_alternative<Eigen::MatrixXcd>(m))
    return std::get<Eigen::MatrixXcd>(std::move(m));
  return std::get<Eigen::MatrixXd>(m).cast<std::complex<double>>();
}

std::uint64_t fnv1a(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::uint64_t digest(const Eigen::MatrixXd& m) {
  std::ostringstream buf(std::ios::binary);
  write_nnmx(buf, m);
  const std::string s = buf.str();
  return fnv1a(s.data(), s.size());
}

std::uint64_t digest(const Eigen::MatrixXcd& m) {
  std::ostringstream buf(std::ios::binary);
  write_nnmx(buf, m);
  const std::string s = buf.str();
  return fnv1a(s.data(), s.size());
}

} // namespace asctk
