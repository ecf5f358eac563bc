#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinext/matrix.hpp"
#include "spinext/tolerances.hpp"

namespace spinext {

/// M x M unitary mode transformation u_ij (row = source orbital, column =
/// target mode). Unitarity is checked at construction.
class ModeUnitary {
 public:
  explicit ModeUnitary(Matrix entries) : u_(std::move(entries)) {
    if (u_.rows() != u_.cols() || u_.rows() == 0)
      throw std::invalid_argument("ModeUnitary: matrix must be square and non-empty");
    const Matrix gram = u_.adjoint() * u_;
    const double dev = (gram - Matrix::identity(u_.rows())).max_abs();
    if (dev > tol::unitary)
      throw std::invalid_argument("ModeUnitary: matrix is not unitary (deviation " +
                                  std::to_string(dev) + ")");
  }

  int dim() const { return static_cast<int>(u_.rows()); }
  const Matrix& entries() const { return u_; }
  std::complex<double> operator()(int i, int j) const { return u_(i, j); }

  ModeUnitary adjoint() const { return ModeUnitary(u_.adjoint()); }

 private:
  Matrix u_;
};

inline ModeUnitary identity_unitary(int m) { return ModeUnitary(Matrix::identity(m)); }

/// Discrete Fourier transform unitary, u_jk = exp(2*pi*i*j*k/M)/sqrt(M) with
/// zero-based indices. For M = 4 the entries are (1/2) i^(j*k).
inline ModeUnitary qft_unitary(int m) {
  if (m < 1) throw std::invalid_argument("qft_unitary: M must be >= 1");
  Matrix u(m, m);
  const double s = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>((j * k) % m) / m;
      u(j, k) = std::polar(s, phi);
    }
  return ModeUnitary(std::move(u));
}

namespace detail {

/// Deterministic Gaussian source: mt19937_64 plus an explicit Box-Muller,
/// so that a seed pins the exact same unitary on every platform.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace detail

/// Haar-like random unitary: QR orthonormalization (modified Gram-Schmidt)
/// of a complex Gaussian matrix drawn from the seeded generator.
inline ModeUnitary random_unitary(int m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("random_unitary: M must be >= 1");
  detail::GaussianRng rng(seed);
  std::vector<std::vector<std::complex<double>>> col(m, std::vector<std::complex<double>>(m));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) col[j][i] = {rng.normal(), rng.normal()};
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < j; ++k) {
      std::complex<double> proj = 0.0;
      for (int i = 0; i < m; ++i) proj += std::conj(col[k][i]) * col[j][i];
      for (int i = 0; i < m; ++i) col[j][i] -= proj * col[k][i];
    }
    double nrm = 0.0;
    for (int i = 0; i < m; ++i) nrm += std::norm(col[j][i]);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) throw std::runtime_error("random_unitary: degenerate draw");
    for (int i = 0; i < m; ++i) col[j][i] /= nrm;
  }
  Matrix u(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) u(i, j) = col[j][i];
  return ModeUnitary(std::move(u));
}

namespace detail {

inline std::complex<double> parse_complex_entry(const std::string& token) {
  // Format "re+imj" / "re-imj"; a trailing j is required.
  if (token.empty() || token.back() != 'j')
    throw std::invalid_argument("unitary file: entry '" + token + "' lacks trailing 'j'");
  const std::string body = token.substr(0, token.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t p = body.size(); p-- > 1;) {
    const char c = body[p];
    if ((c == '+' || c == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  if (split == std::string::npos)
    throw std::invalid_argument("unitary file: entry '" + token + "' has no imaginary part");
  const double re = std::stod(body.substr(0, split));
  const double im = std::stod(body.substr(split));
  return {re, im};
}

inline std::string format_complex_entry(std::complex<double> v) {
  std::ostringstream os;
  os.precision(17);
  os << v.real();
  if (!(v.imag() < 0.0)) os << '+';
  os << v.imag() << 'j';
  return os.str();
}

}  // namespace detail

/// Text format: first line M, then M rows of M entries "re+imj".
inline ModeUnitary load_unitary(std::istream& in) {
  int m = 0;
  if (!(in >> m) || m < 1) throw std::invalid_argument("unitary file: bad dimension line");
  Matrix u(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::string token;
      if (!(in >> token)) throw std::invalid_argument("unitary file: truncated");
      u(i, j) = detail::parse_complex_entry(token);
    }
  return ModeUnitary(std::move(u));
}

inline ModeUnitary load_unitary_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("unitary file: cannot open '" + path + "'");
  return load_unitary(in);
}

inline void save_unitary(const ModeUnitary& u, std::ostream& out) {
  out << u.dim() << '\n';
  for (int i = 0; i < u.dim(); ++i) {
    for (int j = 0; j < u.dim(); ++j) {
      if (j) out << ' ';
      out << detail::format_complex_entry(u(i, j));
    }
    out << '\n';
  }
}

inline void save_unitary_file(const ModeUnitary& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("unitary file: cannot write '" + path + "'");
  save_unitary(u, out);
}

/// Named unitary specs: "identity", "qft", "random:<seed>", "file:<path>".
inline ModeUnitary resolve_unitary(const std::string& spec, int m) {
  if (spec == "identity") return identity_unitary(m);
  if (spec == "qft") return qft_unitary(m);
  if (spec.rfind("random:", 0) == 0) {
    const std::uint64_t seed = std::stoull(spec.substr(7));
    return random_unitary(m, seed);
  }
  if (spec.rfind("file:", 0) == 0) {
    ModeUnitary u = load_unitary_file(spec.substr(5));
    if (u.dim() != m)
      throw std::invalid_argument("unitary file dimension " + std::to_string(u.dim()) +
                                  " does not match M=" + std::to_string(m));
    return u;
  }
  throw std::invalid_argument("unknown unitary spec '" + spec + "'");
}

}  // namespace spinext
