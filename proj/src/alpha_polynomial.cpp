#include "wishart/alpha_polynomial.hpp"

#include <sstream>
#include <utility>

namespace wishart {

AlphaPolynomial::AlphaPolynomial(std::initializer_list<long long> coeffs) {
  coeffs_.reserve(coeffs.size());
  for (long long c : coeffs) coeffs_.emplace_back(c);
  trim();
}

AlphaPolynomial::AlphaPolynomial(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

AlphaPolynomial AlphaPolynomial::constant(const BigInt& value) { return monomial(value, 0); }

AlphaPolynomial AlphaPolynomial::monomial(const BigInt& value, std::size_t power) {
  std::vector<BigInt> c(power + 1);
  c[power] = value;
  return AlphaPolynomial(std::move(c));
}

BigInt AlphaPolynomial::coeff(std::size_t power) const {
  return power < coeffs_.size() ? coeffs_[power] : BigInt(0);
}

double AlphaPolynomial::evaluate(double alpha) const {
  return static_cast<double>(evaluate_long(alpha));
}

long double AlphaPolynomial::evaluate_long(long double alpha) const {
  long double acc = 0.0L;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    acc = acc * alpha + it->convert_to<long double>();
  return acc;
}

AlphaPolynomial& AlphaPolynomial::operator+=(const AlphaPolynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  trim();
  return *this;
}

AlphaPolynomial& AlphaPolynomial::operator*=(const AlphaPolynomial& rhs) {
  if (is_zero() || rhs.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<BigInt> out(coeffs_.size() + rhs.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * rhs.coeffs_[j];
  coeffs_ = std::move(out);
  trim();
  return *this;
}

AlphaPolynomial& AlphaPolynomial::operator*=(const BigInt& scalar) {
  for (auto& c : coeffs_) c *= scalar;
  trim();
  return *this;
}

std::string AlphaPolynomial::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t p = coeffs_.size(); p-- > 0;) {
    const BigInt& c = coeffs_[p];
    if (c == 0) continue;
    BigInt mag = c < 0 ? BigInt(-c) : c;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    if (mag != 1 || p == 0) os << mag;
    if (p >= 1) os << "a";
    if (p >= 2) os << "^" << p;
    first = false;
  }
  return os.str();
}

void AlphaPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

AlphaPolynomial product_coefficient(std::initializer_list<const AlphaSeries*> factors, std::size_t n) {
  // Running product truncated at degree n in z.
  AlphaSeries acc(n + 1);
  acc[0] = AlphaPolynomial{1};
  for (const AlphaSeries* f : factors) {
    AlphaSeries next(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      if (acc[i].is_zero()) continue;
      for (std::size_t j = 0; i + j <= n && j < f->size(); ++j) {
        if ((*f)[j].is_zero()) continue;
        next[i + j] += acc[i] * (*f)[j];
      }
    }
    acc = std::move(next);
  }
  return acc[n];
}

}  // namespace wishart
