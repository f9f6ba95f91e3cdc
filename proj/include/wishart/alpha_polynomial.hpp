#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace wishart {

using BigInt = boost::multiprecision::cpp_int;

/// Polynomial in the aspect ratio α with exact integer coefficients.
/// coeffs()[j] multiplies α^j; trailing zeros are trimmed so equality is
/// structural.
class AlphaPolynomial {
 public:
  AlphaPolynomial() = default;
  AlphaPolynomial(std::initializer_list<long long> coeffs);
  explicit AlphaPolynomial(std::vector<BigInt> coeffs);

  static AlphaPolynomial constant(const BigInt& value);
  /// value · α^power
  static AlphaPolynomial monomial(const BigInt& value, std::size_t power);

  const std::vector<BigInt>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  BigInt coeff(std::size_t power) const;

  double evaluate(double alpha) const;
  long double evaluate_long(long double alpha) const;

  AlphaPolynomial& operator+=(const AlphaPolynomial& rhs);
  AlphaPolynomial& operator*=(const AlphaPolynomial& rhs);
  AlphaPolynomial& operator*=(const BigInt& scalar);

  friend AlphaPolynomial operator+(AlphaPolynomial lhs, const AlphaPolynomial& rhs) { return lhs += rhs; }
  friend AlphaPolynomial operator*(AlphaPolynomial lhs, const AlphaPolynomial& rhs) { return lhs *= rhs; }
  friend bool operator==(const AlphaPolynomial&, const AlphaPolynomial&) = default;

  /// e.g. "6a^3 + 16a^2 + 6a"
  std::string to_string() const;

 private:
  void trim();
  std::vector<BigInt> coeffs_;
};

/// Truncated power series in z with α-polynomial coefficients.
using AlphaSeries = std::vector<AlphaPolynomial>;

/// [z^n] of the product of the given series (missing terms are zero).
AlphaPolynomial product_coefficient(std::initializer_list<const AlphaSeries*> factors, std::size_t n);

}  // namespace wishart
