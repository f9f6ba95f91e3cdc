#pragma once

// Truncated heavy-tailed entries: P(dx) = C(β)/(1+|x|^β) dx cut at ±T with
// T = B·n^(1/(β-1)); each boundary atom carries the mass of one discarded tail.

#include "wishart/limitlaw.hpp"
#include "wishart/treewords.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wishart::heavytail {

struct HeavyTailParams {
  double beta = 2.0;
  double B = 1.0;
  double alpha = 1.0;

  void validate() const;
};

/// (∫ dx / (1+|x|^β))^(-1) by tanh-sinh quadrature. Throws InvalidParameter
/// for β <= 1.
double c_beta(double beta);

/// Closed form 2(π/β)/sin(π/β) of the normalization integral.
double normalization_closed_form(double beta);

/// A_k = (2C)^(1-k/2) (1/(k+1-β) + 1/(β-1)) / (1/(3-β) + 1/(β-1))^(k/2)
///       · B^((β-1)(k/2-1))
/// for even k, zero for odd k. Throws InvalidParameter on a pole.
limitlaw::AsymptoticSequence heavy_A(const HeavyTailParams& p, int kmax);

/// A_4 = B^(β-1)/(2C) · (3-β)²(β-1)/(5-β)
double heavy_A4(const HeavyTailParams& p);

limitlaw::MomentVector heavy_moments(const HeavyTailParams& p, int kmax, treewords::CountTableCache& tables);

struct ExpansionCheck {
  double beta = 0.0;
  double B = 0.0;
  double alpha = 0.0;
  int k = 0;
  /// M_k(μ_{α,β,B}) - M_k(μ_α)
  double lhs = 0.0;
  /// B^(β-1)/(2C) · (3-β)²/((2-β)(5-β)) · a_k^(1); absent at β = 2.
  std::optional<double> rhs_theorem;
  /// A_4 · a_k^(1)
  double rhs_A4 = 0.0;
  /// lhs / rhs_theorem when defined, else lhs / rhs_A4.
  double ratio = 0.0;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const ExpansionCheck& e);

ExpansionCheck expansion_check(const HeavyTailParams& p, int k, treewords::CountTableCache& tables);

/// Cutoff T = B·n^(1/(β-1)).
double cutoff(const HeavyTailParams& p, double n);

/// ∫_T^∞ dx / (1+x^β), the per-side tail integral.
double tail_integral(double beta, double T);

/// M_k(P_n) by adaptive quadrature on [1, T] (logarithmic variable), the
/// core [0, 1] and the two boundary atoms.
double truncated_moment(const HeavyTailParams& p, double n, int k);

/// M_k(P_n) / (n^(k/2-1) M_2(P_n)^(k/2)), the finite-n version of A_k.
double prelimit_A(const HeavyTailParams& p, double n, int k);

/// Independent draws from P_n: inverse CDF of the continuous part through the
/// incomplete beta function, boundary atoms by Bernoulli selection. Results
/// depend on (seed, chunk), not on `workers`.
std::vector<double> sample_truncated(const HeavyTailParams& p, double n, std::size_t count, std::uint64_t seed,
                                     unsigned workers = 1, std::size_t chunk = 65536);

}  // namespace wishart::heavytail
