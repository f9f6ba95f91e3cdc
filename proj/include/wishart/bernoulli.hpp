#pragma once

// Bernoulli(c/n) entries: moments of μ_{α,c}, their 1/c expansion around the
// Marchenko-Pastur law, and a population-dynamics solver for the resolvent of
// the limiting bipartite Poisson Galton-Watson tree.

#include "wishart/alpha_polynomial.hpp"
#include "wishart/limitlaw.hpp"
#include "wishart/treewords.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wishart::bernoulli {

using limitlaw::Complex;

struct BernoulliParams {
  double alpha = 1.0;
  double c = 1.0;
  /// Entries X = A - c/n normalized by n·M₂(P_n), instead of raw 0/1 entries
  /// normalized by c.
  bool centered = false;

  void validate() const;
};

/// A_k = c^(1 - k/2) for 2 <= k <= kmax; γ = max(1, c^(-1/2)).
limitlaw::AsymptoticSequence bernoulli_A(double c, int kmax);

limitlaw::MomentVector bernoulli_moments(const BernoulliParams& p, int kmax, treewords::CountTableCache& tables);

/// M_k(μ_{α,c}) = Σ_j P_j(α) c^(-j), j = 0..k-1, exactly: a word whose
/// multiplicities are 2d_1, ..., 2d_a carries c^(a-k). P_0 is the MP moment,
/// P_1 the quadruple-edge count a_k^(1).
std::vector<AlphaPolynomial> moment_expansion(int k, treewords::CountTableCache& tables);

/// c · (M_k(μ_{α,c}) - M_k(μ_α)) - a_k^(1)(α), summed from the exact
/// expansion so no cancellation occurs for large c.
double expansion_residual(const BernoulliParams& p, int k, treewords::CountTableCache& tables);

struct PopdynConfig {
  std::size_t pool_size = 100000;
  int sweeps = 200;
  /// Weight of the newest sweep in the running mixture estimate.
  double damping = 0.5;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Sweep-to-sweep oscillation allowed on top of 4 standard errors.
  double tolerance = 1e-3;
  /// Entries per RNG stream; results depend on this, not on `workers`.
  std::size_t chunk = 4096;

  void validate() const;
};

/// Samples of X₁(z) (vertices with Poisson(c) offspring: column side) and
/// X₂(z) (Poisson(αc) offspring: row side).
class PopulationPool {
 public:
  PopulationPool(const BernoulliParams& p, Complex z, std::size_t size);

  /// One synchronous update of both pools from the previous pools. Throws
  /// NumericError if any value leaves the upper half-plane.
  void sweep(std::uint64_t seed, unsigned workers, std::size_t chunk);

  Complex mean1() const;
  Complex mean2() const;
  /// Stieltjes transform of μ′_c: (α/(α+1)) E X₁ + (1/(α+1)) E X₂.
  Complex mixture() const;
  /// Standard error of mixture() (real and imaginary parts combined).
  double mixture_stderr() const;
  double min_imag() const;

  std::size_t size() const { return pool1_.size(); }
  int iterations() const { return iterations_; }
  Complex z() const { return z_; }

 private:
  BernoulliParams params_;
  Complex z_;
  std::vector<Complex> pool1_;
  std::vector<Complex> pool2_;
  int iterations_ = 0;
};

struct PopdynResult {
  Complex m;
  double stderr_ = 0.0;
  int sweeps = 0;
  std::size_t pool_size = 0;
  std::uint64_t seed = 0;
  /// Largest |Δ mixture| over the last 10 sweeps.
  double oscillation = 0.0;
  /// |Δ mixture| produced by one extra sweep after the run, and the standard
  /// error it is compared with.
  double fixed_point_shift = 0.0;
  double fixed_point_stderr = 0.0;
  bool converged = true;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const PopdynResult& r);

/// Population-dynamics estimate of m_{μ′_c}(z) for the hermitized adjacency
/// operator (unnormalized by c).
PopdynResult popdyn_resolvent(const BernoulliParams& p, Complex z, const PopdynConfig& cfg);

/// Wishart-scale Stieltjes transform from the hermitized one:
/// m_W(z) = (1+α) c m_H(w) / (2w) + (α-1)/(2z), w = √(cz), Im w > 0.
Complex wishart_stieltjes_from_hermitized(double alpha, double c, Complex z, Complex m_hermitized);

struct DensityEstimate {
  double x = 0.0;
  double density = 0.0;
  double stderr_ = 0.0;
};

/// μ′_c{0} ≈ ε Im m(iε).
double popdyn_hermitized_atom(const BernoulliParams& p, double epsilon, const PopdynConfig& cfg);

/// Mass of μ_{α,c} at zero from the hermitized atom: (μ′{0}(1+α) + 1-α)/2,
/// clamped to [0, 1].
double wishart_atom_from_hermitized(double alpha, double hermitized_atom);

/// Continuous density of μ_{α,c} at x > 0 from
/// g(t) = (1/π) (Im m_{μ′_c}(t + iε) - μ′{0} ε/(t² + ε²)):
/// f(x) = g(√(cx)) · √(c/x) · (1+α)/2.
/// The Lorentzian of the atom at zero is removed; pass `hermitized_atom` to
/// reuse one estimate along a curve, otherwise it is computed.
DensityEstimate popdyn_wishart_density(const BernoulliParams& p, double x, double epsilon, const PopdynConfig& cfg,
                                       std::optional<double> hermitized_atom = std::nullopt);

double popdyn_wishart_atom(const BernoulliParams& p, double epsilon, const PopdynConfig& cfg);

/// 0.05 √c: a fixed width 0.05 on the scale t/√c = √x. The fixed-point map
/// contracts at a rate set by Im z/√c, so this keeps the sweep count
/// independent of c.
double default_epsilon(double c);

}  // namespace wishart::bernoulli
