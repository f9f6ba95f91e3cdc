#pragma once

// Limiting spectral laws of Wishart matrices: the universal moment formula
// driven by an asymptotic sequence A_k, the Marchenko-Pastur law, the signed
// 1/c correction measure and their Stieltjes transforms.
//
// Stieltjes convention throughout: m(z) = ∫ dμ(x) / (x - z) for Im z > 0, so
// m(z) ~ -mass/z at infinity and density(x) = (1/π) Im m(x + i0).

#include "wishart/alpha_polynomial.hpp"
#include "wishart/treewords.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wishart::limitlaw {

using Complex = std::complex<double>;

/// A_k for 2 <= k <= kmax(). A_1 is zero for centered entry laws and is never
/// stored.
class AsymptoticSequence {
 public:
  /// values[0] is A_2. Throws InvalidParameter unless A_2 == 1 and all
  /// values are finite.
  AsymptoticSequence(std::vector<double> values, double gamma);

  int kmax() const { return static_cast<int>(values_.size()) + 1; }
  double operator[](int k) const;
  double gamma() const { return gamma_; }
  const std::vector<double>& values() const { return values_; }

  /// A_2 = 1, A_k = 0 otherwise: the Marchenko-Pastur sequence.
  static AsymptoticSequence delta2(int kmax);

 private:
  std::vector<double> values_;
  double gamma_;
};

struct MomentVector {
  double alpha = 0.0;
  std::vector<double> moments;  // moments[k-1] = M_k

  double operator[](int k) const { return moments.at(static_cast<std::size_t>(k - 1)); }
  int kmax() const { return static_cast<int>(moments.size()); }
};

nlohmann::json to_json(const MomentVector& m);

/// Edges a = (1-√α)², b = (1+√α)².
struct Support {
  double lo;
  double hi;
  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
};

Support mp_support(double alpha);

/// An evaluable, possibly signed, density on [lo, hi] with an optional atom at
/// zero. `on_circle`, when set, returns density(x(θ)) · dx/dθ for
/// x(θ) = center + half_width · sin θ in closed form, cancelling inverse
/// square-root edge behaviour exactly.
struct DensityModel {
  std::string name;
  Support support;
  double atom0 = 0.0;
  std::function<double(double)> density;
  std::function<Complex(Complex)> stieltjes;
  std::function<double(double)> on_circle;
};

DensityModel mp_model(double alpha);
DensityModel perturb_model(double alpha);
/// μ_α + (1/c) μ_α^(1)
DensityModel combined_model(double alpha, double c);

/// Σ_a Σ_l α^l Σ_b |W_k(a,a+1,l,b)| Π A_{b_i} for k = 1..kmax.
MomentVector limit_moments(const AsymptoticSequence& A, double alpha, int kmax,
                           treewords::CountTableCache& tables);

/// Exact coefficients a_k, b_k (k = 0..kmax) of A = 1 + αzAB, B = 1 + zAB.
struct MpSeries {
  AlphaSeries a;
  AlphaSeries b;
};
MpSeries mp_series(int kmax);

/// Moments of μ_α from the generating-series recursion, independent of the
/// enumeration.
MomentVector mp_moments(double alpha, int kmax);

double mp_density(double x, double alpha);

/// √((z-a)(z-b)) on the branch with positive imaginary part for Im z > 0
/// (equivalently, the branch asymptotic to z).
Complex edge_sqrt(Complex z, const Support& s);

Complex mp_stieltjes(Complex z, double alpha);

/// Coefficients a_k^(1), b_k^(1) (k = 0..kmax) of the 1/c correction series.
struct PerturbSeries {
  AlphaSeries a;
  AlphaSeries b;
};
PerturbSeries perturb_series(int kmax);

/// (x² - 2x(α+1) + α² + 1) / (2απ √((b-x)(x-a))) on (a, b), zero elsewhere.
double perturb_density(double x, double alpha);

Complex perturb_stieltjes(Complex z, double alpha);

/// ∫ f dμ over the continuous part of `model`, using x = center + h sin θ and
/// Gauss-Legendre in θ. Throws NumericError on non-finite integrand values.
double signed_quadrature(const std::function<double(double)>& f, const DensityModel& model,
                         int order = 256);

/// Gauss-Legendre rule on [-1, 1], cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

}  // namespace wishart::limitlaw
