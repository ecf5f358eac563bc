#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace spinext {

/// Dense row-major complex matrix. Dimensions here stay at desk scale
/// (at most 4^K with K <= 6), so no external linear algebra is needed.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, std::complex<double>(0.0, 0.0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::complex<double>& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const std::complex<double>& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Matrix& operator*=(const std::complex<double>& s) {
    for (auto& v : a_) v *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const std::complex<double>& s) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: shape mismatch in product");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const std::complex<double> aik = a(i, k);
        if (aik == std::complex<double>(0.0, 0.0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  Matrix adjoint() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  std::complex<double> trace() const {
    std::complex<double> t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  double hermiticity_residual() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
  }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("Matrix: shape mismatch");
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::complex<double>> a_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          c(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return c;
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> hermitian_eigenvalues(Matrix m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("hermitian_eigenvalues: not square");
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(m(p, q)));
    if (off < 1e-14) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const std::complex<double> apq = m(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double app = m(p, p).real();
        const double aqq = m(q, q).real();
        // Phase removal followed by a real Jacobi rotation.
        const std::complex<double> phase = apq / std::abs(apq);
        const double g = std::abs(apq);
        const double theta = 0.5 * std::atan2(2.0 * g, aqq - app);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
          const std::complex<double> mp = m(k, p);
          const std::complex<double> mq = m(k, q);
          m(k, p) = c * mp - s * std::conj(phase) * mq;
          m(k, q) = s * phase * mp + c * mq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const std::complex<double> mp = m(p, k);
          const std::complex<double> mq = m(q, k);
          m(p, k) = c * mp - s * phase * mq;
          m(q, k) = s * std::conj(phase) * mp + c * mq;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline double min_eigenvalue(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return hermitian_eigenvalues(m).front();
}

}  // namespace spinext
