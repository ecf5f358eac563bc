#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spinext {

/// Exact rational number with 64-bit numerator/denominator, always stored in
/// lowest terms with a positive denominator. Desk-scale coefficients only.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { reduce(); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void reduce() {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_;
  std::int64_t den_;
};

/// Gaussian rational a + b*i with exact rational parts. Used wherever the
/// inputs (identity or four-mode Fourier entries) permit exact arithmetic.
class GaussianRational {
 public:
  constexpr GaussianRational() = default;
  GaussianRational(Rational re, Rational im = Rational()) : re_(re), im_(im) {}
  GaussianRational(std::int64_t n) : re_(n) {}

  static GaussianRational i() { return GaussianRational(Rational(0), Rational(1)); }

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
  }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
  }
  GaussianRational operator-() const { return {-re_, -im_}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) {
    return !(a == b);
  }

  std::complex<double> value() const { return {re_.value(), im_.value()}; }

  std::string str() const {
    if (im_.is_zero()) return re_.str();
    std::string im = im_.str() + "i";
    if (re_.is_zero()) return im;
    return re_.str() + (im_.num() < 0 ? "" : "+") + im;
  }

 private:
  Rational re_;
  Rational im_;
};

// Scalar glue shared by the symbolic layer: the same algorithms run over
// exact Gaussian rationals and over double-precision complex numbers.
using Complex = std::complex<double>;

inline bool scalar_is_zero(const Complex& c) { return c.real() == 0.0 && c.imag() == 0.0; }
inline bool scalar_is_zero(const GaussianRational& g) { return g.is_zero(); }

inline Complex scalar_to_complex(const Complex& c) { return c; }
inline Complex scalar_to_complex(const GaussianRational& g) { return g.value(); }

inline Complex scalar_minus_half(const Complex& c) { return c * Complex(-0.5, 0.0); }
inline GaussianRational scalar_minus_half(const GaussianRational& g) {
  return g * GaussianRational(Rational(-1, 2));
}

inline Complex scalar_half(const Complex& c) { return c * Complex(0.5, 0.0); }
inline GaussianRational scalar_half(const GaussianRational& g) {
  return g * GaussianRational(Rational(1, 2));
}

template <typename Scalar>
Scalar scalar_one();
template <>
inline Complex scalar_one<Complex>() {
  return Complex(1.0, 0.0);
}
template <>
inline GaussianRational scalar_one<GaussianRational>() {
  return GaussianRational(1);
}

}  // namespace spinext
