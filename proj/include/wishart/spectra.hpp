#pragma once

// Monte Carlo spectra of Wishart matrices with Bernoulli(c/n) or truncated
// heavy-tailed entries, and the empirical-measure statistics compared against
// the limit laws.

#include "wishart/bernoulli.hpp"
#include "wishart/heavytail.hpp"
#include "wishart/limitlaw.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace wishart::spectra {

using limitlaw::Complex;
using Model = std::variant<bernoulli::BernoulliParams, heavytail::HeavyTailParams>;

/// Default ceiling on the matrix dimension n.
inline constexpr int kMaxDimension = 4000;

struct SpectralSample {
  std::vector<double> eigenvalues;  // ascending, length n
  int n = 0;
  int m = 0;
  Model model;
  std::uint64_t seed = 0;
};

nlohmann::json model_to_json(const Model& model);
nlohmann::json metadata(const SpectralSample& s);

/// m = round(α n); throws InvalidParameter when m < 1.
int column_count(int n, double alpha);

/// Row-major adjacency lists of the n × m Bernoulli(c/n) 0/1 matrix.
std::vector<std::vector<int>> bernoulli_pattern(int n, int m, double c, std::uint64_t seed);

/// W = A Aᵀ / c, or with `centered`, (A - c/n)(A - c/n)ᵀ / (n (c/n)(1 - c/n)).
/// c = 0 gives the zero matrix.
Eigen::MatrixXd bernoulli_wishart_matrix(int n, const bernoulli::BernoulliParams& p, std::uint64_t seed);

/// W = Y Yᵀ / (n M_2(P_n)) with entries drawn from P_n.
Eigen::MatrixXd heavy_wishart_matrix(int n, const heavytail::HeavyTailParams& p, std::uint64_t seed,
                                     unsigned workers = 1);

/// All eigenvalues, ascending. Throws NumericError with matrix statistics if
/// the solver fails.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& w);

/// Requires 2 <= n <= max_dimension and 0 <= c < n.
SpectralSample sample_wishart_bernoulli(int n, const bernoulli::BernoulliParams& p, std::uint64_t seed,
                                        int max_dimension = kMaxDimension);
SpectralSample sample_wishart_heavy(int n, const heavytail::HeavyTailParams& p, std::uint64_t seed,
                                    unsigned workers = 1, int max_dimension = kMaxDimension);

limitlaw::MomentVector empirical_moments(std::span<const double> eigenvalues, int kmax, double alpha = 0.0);
limitlaw::MomentVector empirical_moments(const SpectralSample& s, int kmax);

/// (1/n) Σ 1/(λ_i - z)
Complex empirical_stieltjes(std::span<const double> eigenvalues, Complex z);

/// Stieltjes transform at z of the spectrum of the hermitized adjacency
/// matrix [[0, A], [Aᵀ, 0]] recovered from the eigenvalues λ of AAᵀ/c:
/// ±√(cλ_i) plus |m - n| zeros, each with weight 1/(n + m).
Complex hermitized_stieltjes(const SpectralSample& s, double c, Complex z);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> centers;
  std::vector<double> density;
  /// Fraction of values outside [lo, hi).
  double overflow = 0.0;

  double width() const { return (hi - lo) / static_cast<double>(density.size()); }
};

Histogram histogram(std::span<const double> values, int bins, double lo, double hi);

/// 80 bins on [0, (1+√α)² + 1].
Histogram default_histogram(std::span<const double> values, double alpha);

/// Fraction of `sorted` values <= x.
double empirical_cdf(std::span<const double> sorted, double x);

/// sup_x |F_a(x) - F_b(x)| for two sorted samples.
double cdf_distance(std::span<const double> sorted_a, std::span<const double> sorted_b);

struct VariancePoint {
  int n = 0;
  double variance = 0.0;
  double mean = 0.0;
};

struct VarianceDecay {
  std::vector<VariancePoint> points;
  double slope = 0.0;
};

/// Sample variance of M_k across `trials` independent matrices for each n,
/// with the least-squares slope of log variance against log n.
VarianceDecay variance_decay_test(const bernoulli::BernoulliParams& p, const std::vector<int>& n_list, int trials,
                                  int k, std::uint64_t seed, unsigned workers = 1);

/// Seed of trial `t` in a run seeded with `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t);

/// Eigenvalues one per line (header `eigenvalue`) plus `<path>.json` holding
/// metadata(s).
void write_sample(const SpectralSample& s, const std::filesystem::path& csv);

}  // namespace wishart::spectra
