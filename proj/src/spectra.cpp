#include "wishart/spectra.hpp"

#include "wishart/error.hpp"
#include "wishart/parallel.hpp"
#include "wishart/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>

namespace wishart::spectra {

namespace {

constexpr double kSolverTolerance = 1e-8;

void require_dimension(int n, int max_dimension) {
  if (n < 2) throw InvalidParameter("matrix dimension n must be >= 2");
  if (n > max_dimension)
    throw ResourceLimit("n = " + std::to_string(n) + " exceeds the eigensolver ceiling " + std::to_string(max_dimension));
}

}  // namespace

nlohmann::json model_to_json(const Model& model) {
  return std::visit(
      [](const auto& p) -> nlohmann::json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, bernoulli::BernoulliParams>)
          return {{"model", "bernoulli"}, {"alpha", p.alpha}, {"c", p.c}, {"centered", p.centered}};
        else
          return {{"model", "heavy"}, {"alpha", p.alpha}, {"beta", p.beta}, {"B", p.B}};
      },
      model);
}

nlohmann::json metadata(const SpectralSample& s) {
  return {{"n", s.n},
          {"m", s.m},
          {"seed", s.seed},
          {"params", model_to_json(s.model)},
          {"solver", "Eigen SelfAdjointEigenSolver"},
          {"solver_tolerance", kSolverTolerance},
          {"rng", kRngAlgorithm}};
}

int column_count(int n, double alpha) {
  const auto m = static_cast<long long>(std::llround(alpha * n));
  if (m < 1) throw InvalidParameter("m = round(alpha * n) must be >= 1");
  if (m > 1'000'000) throw ResourceLimit("m = round(alpha * n) is too large");
  return static_cast<int>(m);
}

std::vector<std::vector<int>> bernoulli_pattern(int n, int m, double c, std::uint64_t seed) {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(n));
  const double q = c / n;
  if (q <= 0.0) return rows;
  // Gaps between successes are geometric; one stream per row.
  for (int i = 0; i < n; ++i) {
    Rng rng = make_stream(seed, {0xB0, static_cast<std::uint64_t>(i)});
    std::geometric_distribution<long long> gap(q);
    for (long long j = gap(rng); j < m; j += 1 + gap(rng)) rows[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
  }
  return rows;
}

Eigen::MatrixXd bernoulli_wishart_matrix(int n, const bernoulli::BernoulliParams& p, std::uint64_t seed) {
  if (!(p.alpha > 0.0)) throw InvalidParameter("alpha must be positive");
  if (!(p.c >= 0.0) || !(p.c < n)) throw InvalidParameter("c must satisfy 0 <= c < n");
  const int m = column_count(n, p.alpha);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  if (p.c == 0.0) return w;

  const auto rows = bernoulli_pattern(n, m, p.c, seed);
  std::vector<std::vector<int>> cols(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i)
    for (int j : rows[static_cast<std::size_t>(i)]) cols[static_cast<std::size_t>(j)].push_back(i);
  // (AAᵀ)_{rs} counts shared columns.
  for (const auto& col : cols)
    for (std::size_t a = 0; a < col.size(); ++a)
      for (std::size_t b = 0; b < col.size(); ++b) w(col[a], col[b]) += 1.0;

  if (!p.centered) return w / p.c;

  // (A - q)(A - q)ᵀ = AAᵀ - q(r1ᵀ + 1rᵀ) + q² m 11ᵀ with r the row sums.
  const double q = p.c / n;
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) r(i) = static_cast<double>(rows[static_cast<std::size_t>(i)].size());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  w -= q * (r * ones.transpose() + ones * r.transpose());
  w.array() += q * q * m;
  return w / (n * q * (1.0 - q));
}

Eigen::MatrixXd heavy_wishart_matrix(int n, const heavytail::HeavyTailParams& p, std::uint64_t seed,
                                     unsigned workers) {
  p.validate();
  const int m = column_count(n, p.alpha);
  const auto draws = heavytail::sample_truncated(p, n, static_cast<std::size_t>(n) * m, seed, workers);
  const Eigen::Map<const Eigen::MatrixXd> y(draws.data(), n, m);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w.selfadjointView<Eigen::Lower>().rankUpdate(y);
  w.triangularView<Eigen::StrictlyUpper>() = w.transpose();
  return w / (n * heavytail::truncated_moment(p, n, 2));
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigensolver failed: n = " + std::to_string(w.rows()) +
                       ", max |w| = " + std::to_string(w.cwiseAbs().maxCoeff()) +
                       ", trace = " + std::to_string(w.trace()));
  }
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

SpectralSample sample_wishart_bernoulli(int n, const bernoulli::BernoulliParams& p, std::uint64_t seed,
                                        int max_dimension) {
  require_dimension(n, max_dimension);
  SpectralSample s;
  s.eigenvalues = symmetric_eigenvalues(bernoulli_wishart_matrix(n, p, seed));
  s.n = n;
  s.m = column_count(n, p.alpha);
  s.model = p;
  s.seed = seed;
  return s;
}

SpectralSample sample_wishart_heavy(int n, const heavytail::HeavyTailParams& p, std::uint64_t seed, unsigned workers,
                                    int max_dimension) {
  require_dimension(n, max_dimension);
  SpectralSample s;
  s.eigenvalues = symmetric_eigenvalues(heavy_wishart_matrix(n, p, seed, workers));
  s.n = n;
  s.m = column_count(n, p.alpha);
  s.model = p;
  s.seed = seed;
  return s;
}

limitlaw::MomentVector empirical_moments(std::span<const double> eigenvalues, int kmax, double alpha) {
  if (kmax < 1) throw InvalidParameter("kmax must be >= 1");
  if (eigenvalues.empty()) throw InvalidParameter("empty spectrum");
  limitlaw::MomentVector out{alpha, std::vector<double>(static_cast<std::size_t>(kmax), 0.0)};
  std::vector<long double> acc(static_cast<std::size_t>(kmax), 0.0L);
  for (double lambda : eigenvalues) {
    long double pw = 1.0L;
    for (int k = 0; k < kmax; ++k) {
      pw *= lambda;
      acc[static_cast<std::size_t>(k)] += pw;
    }
  }
  for (int k = 0; k < kmax; ++k)
    out.moments[static_cast<std::size_t>(k)] = static_cast<double>(acc[static_cast<std::size_t>(k)] / eigenvalues.size());
  return out;
}

limitlaw::MomentVector empirical_moments(const SpectralSample& s, int kmax) {
  const double alpha = std::visit([](const auto& p) { return p.alpha; }, s.model);
  return empirical_moments(s.eigenvalues, kmax, alpha);
}

Complex empirical_stieltjes(std::span<const double> eigenvalues, Complex z) {
  if (!(z.imag() > 0.0)) throw InvalidParameter("Stieltjes transform needs Im z > 0");
  if (eigenvalues.empty()) throw InvalidParameter("empty spectrum");
  Complex sum = 0.0;
  for (double lambda : eigenvalues) sum += 1.0 / (lambda - z);
  return sum / static_cast<double>(eigenvalues.size());
}

Complex hermitized_stieltjes(const SpectralSample& s, double c, Complex z) {
  if (!(z.imag() > 0.0)) throw InvalidParameter("Stieltjes transform needs Im z > 0");
  if (!(c > 0.0)) throw InvalidParameter("c must be positive");
  Complex sum = 0.0;
  for (double lambda : s.eigenvalues) {
    const double h = std::sqrt(std::max(0.0, c * lambda));
    sum += 1.0 / (h - z) + 1.0 / (-h - z);
  }
  sum += static_cast<double>(std::abs(s.m - s.n)) * (-1.0 / z);
  return sum / static_cast<double>(s.n + s.m);
}

Histogram histogram(std::span<const double> values, int bins, double lo, double hi) {
  if (bins < 1) throw InvalidParameter("bins must be >= 1");
  if (!(hi > lo)) throw InvalidParameter("histogram range must have hi > lo");
  if (values.empty()) throw InvalidParameter("empty sample");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  std::size_t outside = 0;
  const double width = (hi - lo) / bins;
  for (double v : values) {
    if (!(v >= lo && v < hi)) {
      ++outside;
      continue;
    }
    auto b = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(b, counts.size() - 1)]++;
  }
  const auto total = static_cast<double>(values.size());
  for (int b = 0; b < bins; ++b) {
    h.centers.push_back(lo + (b + 0.5) * width);
    h.density.push_back(static_cast<double>(counts[static_cast<std::size_t>(b)]) / (total * width));
  }
  h.overflow = static_cast<double>(outside) / total;
  return h;
}

Histogram default_histogram(std::span<const double> values, double alpha) {
  return histogram(values, 80, 0.0, limitlaw::mp_support(alpha).hi + 1.0);
}

double empirical_cdf(std::span<const double> sorted, double x) {
  if (sorted.empty()) throw InvalidParameter("empty sample");
  return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
         static_cast<double>(sorted.size());
}

double cdf_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidParameter("empty sample");
  double sup = 0.0;
  for (auto sample : {a, b})
    for (double x : sample) sup = std::max(sup, std::fabs(empirical_cdf(a, x) - empirical_cdf(b, x)));
  return sup;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t) {
  Rng rng = make_stream(seed, {0x7121A1, t});
  return rng();
}

VarianceDecay variance_decay_test(const bernoulli::BernoulliParams& p, const std::vector<int>& n_list, int trials,
                                  int k, std::uint64_t seed, unsigned workers) {
  if (trials < 30) throw InvalidParameter("variance test needs at least 30 trials");
  if (k < 1) throw InvalidParameter("k must be >= 1");
  if (n_list.empty()) throw InvalidParameter("n list is empty");
  VarianceDecay out;
  for (int n : n_list) {
    std::vector<double> mk(static_cast<std::size_t>(trials));
    parallel_for(mk.size(), workers, [&](std::size_t t) {
      const auto s = sample_wishart_bernoulli(n, p, trial_seed(seed ^ static_cast<std::uint64_t>(n), t));
      mk[t] = empirical_moments(s, k)[k];
    });
    const double mean = std::accumulate(mk.begin(), mk.end(), 0.0) / trials;
    double ss = 0.0;
    for (double v : mk) ss += (v - mean) * (v - mean);
    out.points.push_back({n, ss / (trials - 1), mean});
  }
  // Least-squares slope; undefined (left at 0) when any variance vanishes.
  const bool positive = std::all_of(out.points.begin(), out.points.end(), [](const auto& pt) { return pt.variance > 0.0; });
  if (out.points.size() >= 2 && positive) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& pt : out.points) {
      const double x = std::log(pt.n), y = std::log(pt.variance);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double cnt = static_cast<double>(out.points.size());
    out.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }
  return out;
}

void write_sample(const SpectralSample& s, const std::filesystem::path& csv) {
  std::ofstream out(csv);
  if (!out) throw InvalidParameter("cannot write " + csv.string());
  out << "eigenvalue\n" << std::setprecision(17);
  for (double v : s.eigenvalues) out << v << '\n';
  std::ofstream side(csv.string() + ".json");
  if (!side) throw InvalidParameter("cannot write " + csv.string() + ".json");
  side << metadata(s).dump(2) << '\n';
}

}  // namespace wishart::spectra
