#ifndef ASCTK_NNMX_HPP
#define ASCTK_NNMX_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>

namespace asctk {

// Binary matrix format "NNMX": 4-byte magic, u32 version (=1), u8 complex
// flag, u64 rows, u64 cols, then row-major little-endian f64 payload
// (re, im interleaved when complex). Round-trips are bit-exact.

using NnmxMatrix = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

void write_nnmx(std::ostream& out, const Eigen::MatrixXd& m);
void write_nnmx(std::ostream& out, const Eigen::MatrixXcd& m);
void write_nnmx_file(const std::string& path, const Eigen::MatrixXd& m);
void write_nnmx_file(const std::string& path, const Eigen::MatrixXcd& m);

NnmxMatrix read_nnmx(std::istream& in);
NnmxMatrix read_nnmx_file(const std::string& path);

/// Reads a real matrix, rejecting complex payloads.
Eigen::MatrixXd read_nnmx_real(const std::string& path);
/// Reads any payload; real matrices are widened to complex.
Eigen::MatrixXcd read_nnmx_complex(const std::string& path);

/// FNV-1a 64-bit digest of a byte buffer; used for deterministic run reports.
std::uint64_t fnv1a(const void* data, std::size_t size);
std::uint64_t digest(const Eigen::MatrixXd& m);
std::uint64_t digest(const Eigen::MatrixXcd& m);

} // namespace asctk

#endif
