#include "wishart/error.hpp"
#include "wishart/spectra.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

using namespace wishart;
using namespace wishart::spectra;
using bernoulli::BernoulliParams;

namespace {

Eigen::MatrixXd dense_pattern(int n, int m, double c, std::uint64_t seed) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, m);
  const auto rows = bernoulli_pattern(n, m, c, seed);
  for (int i = 0; i < n; ++i)
    for (int j : rows[static_cast<std::size_t>(i)]) a(i, j) = 1.0;
  return a;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double stderr_of_mean(const std::vector<double>& v) {
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / (v.size() - 1) / v.size());
}

}  // namespace

TEST_CASE("parameter checks") {
  CHECK_THROWS_AS(sample_wishart_bernoulli(100, {2.0, 100.0}, 1), InvalidParameter);
  CHECK_THROWS_AS(sample_wishart_bernoulli(100, {2.0, 150.0}, 1), InvalidParameter);
  CHECK_THROWS_AS(sample_wishart_bernoulli(1, {2.0, 0.5}, 1), InvalidParameter);
  CHECK_THROWS_AS(sample_wishart_bernoulli(100, {0.001, 5.0}, 1), InvalidParameter);
  CHECK_THROWS_AS(sample_wishart_bernoulli(5000, {2.0, 5.0}, 1), ResourceLimit);
  CHECK_THROWS_AS(histogram(std::vector<double>{1.0}, 0, 0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(variance_decay_test({2.0, 5.0}, {100}, 10, 2, 1), InvalidParameter);
}

TEST_CASE("zero matrix at c = 0") {
  const auto s = sample_wishart_bernoulli(50, {2.0, 0.0}, 1);
  CHECK(s.eigenvalues.size() == 50);
  CHECK(std::all_of(s.eigenvalues.begin(), s.eigenvalues.end(), [](double v) { return v == 0.0; }));
  const auto m = empirical_moments(s, 4);
  for (int k = 1; k <= 4; ++k) CHECK(m[k] == 0.0);
}

TEST_CASE("matrix construction matches a dense build") {
  const int n = 60;
  const double c = 6.0, alpha = 1.5;
  const int m = column_count(n, alpha);
  CHECK(m == 90);
  const auto a = dense_pattern(n, m, c, 4);
  const Eigen::MatrixXd w = bernoulli_wishart_matrix(n, {alpha, c, false}, 4);
  CHECK((w - a * a.transpose() / c).cwiseAbs().maxCoeff() < 1e-12);
  const double q = c / n;
  const Eigen::MatrixXd x = a.array() - q;
  const Eigen::MatrixXd wc = bernoulli_wishart_matrix(n, {alpha, c, true}, 4);
  CHECK((wc - x * x.transpose() / (n * q * (1 - q))).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pattern density") {
  const int n = 400, m = 800;
  const double c = 10.0;
  const auto rows = bernoulli_pattern(n, m, c, 8);
  std::size_t total = 0;
  for (const auto& r : rows) {
    total += r.size();
    CHECK(std::is_sorted(r.begin(), r.end()));
    CHECK(std::adjacent_find(r.begin(), r.end()) == r.end());
  }
  const double expect = n * m * c / n;
  CHECK(std::fabs(total - expect) < 4.0 * std::sqrt(expect));
}

TEST_CASE("eigenvalues: PSD and trace identities") {
  for (bool centered : {false, true}) {
    const int n = 300;
    const BernoulliParams p{2.0, 8.0, centered};
    const auto w = bernoulli_wishart_matrix(n, p, 21);
    const auto ev = symmetric_eigenvalues(w);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    CHECK(ev.front() >= -1e-8 * std::max(1.0, ev.back()));
    const double sum = std::accumulate(ev.begin(), ev.end(), 0.0);
    double sq = 0.0;
    for (double v : ev) sq += v * v;
    CHECK(sum == doctest::Approx(w.trace()).epsilon(1e-8));
    CHECK(sq == doctest::Approx(w.squaredNorm()).epsilon(1e-8));
  }
  const auto heavy = sample_wishart_heavy(200, {1.5, 1.0, 2.0}, 3);
  CHECK(heavy.eigenvalues.front() >= -1e-8 * std::max(1.0, heavy.eigenvalues.back()));
}

TEST_CASE("empirical moments") {
  CHECK(empirical_moments(std::vector<double>{1.0}, 5)[5] == 1.0);
  CHECK(empirical_moments(std::vector<double>{0.0, 0.0}, 3)[2] == 0.0);
  const int n = 50;
  const auto w = bernoulli_wishart_matrix(n, {2.0, 5.0}, 2);
  const auto m = empirical_moments(symmetric_eigenvalues(w), 2);
  CHECK(m[2] == doctest::Approx((w * w).trace() / n).epsilon(1e-10));
  CHECK(m[1] == doctest::Approx(w.trace() / n).epsilon(1e-10));
}

TEST_CASE("Stieltjes transforms") {
  const auto s = sample_wishart_bernoulli(200, {2.0, 10.0}, 5);
  const Complex far(0.0, 1e6);
  CHECK(std::abs(empirical_stieltjes(s.eigenvalues, far) * far + 1.0) < 1e-4);
  for (Complex z : {Complex(1.0, 0.1), Complex(3.0, 0.5)}) CHECK(empirical_stieltjes(s.eigenvalues, z).imag() > 0.0);
  CHECK_THROWS_AS(empirical_stieltjes(s.eigenvalues, {1.0, 0.0}), InvalidParameter);

  // Histogram quadrature against the exact transform.
  const auto big = sample_wishart_bernoulli(1000, {2.0, 10.0}, 6);
  const auto h = histogram(big.eigenvalues, 400, 0.0, big.eigenvalues.back() + 1e-9);
  const Complex z(2.5, 0.5);
  Complex quad = 0.0;
  for (std::size_t b = 0; b < h.density.size(); ++b) quad += h.density[b] * h.width() / (h.centers[b] - z);
  CHECK(std::abs(quad - empirical_stieltjes(big.eigenvalues, z)) < 1e-3);

  // Hermitized transform against a direct eigendecomposition of [[0, A], [Aᵀ, 0]].
  const int n = 40;
  const double c = 4.0;
  const auto small = sample_wishart_bernoulli(n, {2.0, c}, 9);
  const auto a = dense_pattern(n, small.m, c, 9);
  Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(n + small.m, n + small.m);
  hmat.topRightCorner(n, small.m) = a;
  hmat.bottomLeftCorner(small.m, n) = a.transpose();
  const auto hev = symmetric_eigenvalues(hmat);
  for (Complex zz : {Complex(1.0, 0.1), Complex(-2.0, 0.3), Complex(0.0, 0.05)})
    CHECK(std::abs(hermitized_stieltjes(small, c, zz) - empirical_stieltjes(hev, zz)) < 1e-10);
}

TEST_CASE("histogram and CDF") {
  std::vector<double> u(100000);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (i + 0.5) / u.size();
  const auto h = histogram(u, 10, 0.0, 1.0);
  for (double d : h.density) CHECK(d == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(h.overflow == 0.0);

  std::vector<double> v{-1.0, 0.1, 0.2, 0.3, 5.0};
  const auto g = histogram(v, 4, 0.0, 1.0);
  double mass = g.overflow;
  for (double d : g.density) mass += d * g.width();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.overflow == doctest::Approx(0.4));

  const auto d = default_histogram(u, 2.0);
  CHECK(d.density.size() == 80);
  CHECK(d.hi == doctest::Approx(std::pow(1 + std::sqrt(2.0), 2) + 1.0));

  CHECK(empirical_cdf(u, -1.0) == 0.0);
  CHECK(empirical_cdf(u, 2.0) == 1.0);
  CHECK(empirical_cdf(u, 0.5) == doctest::Approx(0.5));
  double prev = 0.0;
  for (double x = -0.1; x < 1.1; x += 0.01) {
    CHECK(empirical_cdf(u, x) >= prev);
    prev = empirical_cdf(u, x);
  }
  CHECK(cdf_distance(u, u) == 0.0);
  CHECK(cdf_distance(std::vector<double>{0.0}, std::vector<double>{1.0}) == 1.0);
}

TEST_CASE("first moment at alpha=2, c=20, n=3000") {
  const int n = 3000;
  const BernoulliParams p{2.0, 20.0};
  const auto s = sample_wishart_bernoulli(n, p, 2024);
  const double q = p.c / n;
  // M_1 = (entry count)/(cn) with binomial entry count.
  const double se = std::sqrt(double(n) * s.m * q * (1 - q)) / (p.c * n);
  CHECK(std::fabs(empirical_moments(s, 1)[1] - p.alpha) < 3.0 * se);
}

TEST_CASE("second moment over 20 seeds") {
  const BernoulliParams p{2.0, 20.0, true};
  std::vector<double> m2;
  for (std::uint64_t t = 0; t < 20; ++t) m2.push_back(empirical_moments(sample_wishart_bernoulli(1500, p, trial_seed(77, t)), 2)[2]);
  CAPTURE(mean(m2));
  CAPTURE(stderr_of_mean(m2));
  CHECK(std::fabs(mean(m2) - 6.1) < 3.0 * stderr_of_mean(m2));
}

TEST_CASE("centered and uncentered spectra agree") {
  const auto a = sample_wishart_bernoulli(2000, {2.0, 20.0, false}, 31);
  const auto b = sample_wishart_bernoulli(2000, {2.0, 20.0, true}, 31);
  CHECK(cdf_distance(a.eigenvalues, b.eigenvalues) < 0.05);
}

TEST_CASE("heavy-tailed samples") {
  const heavytail::HeavyTailParams p{2.0, 1.0, 2.0};
  const int n = 2000;
  const int trials = 4;
  treewords::CountTableCache tables;
  const double m2_limit = heavytail::heavy_moments(p, 2, tables)[2];
  const double M2 = heavytail::truncated_moment(p, n, 2), M4 = heavytail::truncated_moment(p, n, 4);
  std::vector<double> first, second;
  for (int t = 0; t < trials; ++t) {
    const auto s = sample_wishart_heavy(n, p, trial_seed(5, t));
    CHECK(s.eigenvalues.front() >= -1e-8 * std::max(1.0, s.eigenvalues.back()));
    const auto m = empirical_moments(s, 2);
    first.push_back(m[1]);
    second.push_back(m[2]);
  }
  // M_1 = Σ Y²/(n² M_2(P_n)) has variance n m (M_4 - M_2²)/(n⁴ M_2²).
  const double se1 = std::sqrt(double(n) * column_count(n, p.alpha) * (M4 - M2 * M2) / std::pow(n, 4) / (M2 * M2));
  CHECK(std::fabs(first[0] - p.alpha) < 3.0 * se1);
  CAPTURE(mean(second));
  CAPTURE(stderr_of_mean(second));
  CHECK(std::fabs(mean(second) - m2_limit) < 3.0 * stderr_of_mean(second));
}

TEST_CASE("variance decay") {
  const auto zero = variance_decay_test({2.0, 0.0}, {50, 100}, 30, 2, 1);
  for (const auto& pt : zero.points) CHECK(pt.variance == 0.0);

  const auto decay = variance_decay_test({2.0, 5.0, true}, {200, 400, 800}, 50, 2, 3);
  CAPTURE(decay.slope);
  CHECK(decay.slope >= -1.6);
  CHECK(decay.slope <= -0.5);

  // k = 1, uncentered: M_1 = (binomial count)/(cn).
  const int n = 100;
  const double c = 5.0;
  const auto first = variance_decay_test({2.0, c}, {n}, 60, 1, 4);
  const double q = c / n;
  const double var = double(n) * 2 * n * q * (1 - q) / std::pow(c * n, 2);
  CHECK(first.points[0].variance / var > 0.5);
  CHECK(first.points[0].variance / var < 1.6);
}

TEST_CASE("sample dump with sidecar") {
  const auto s = sample_wishart_bernoulli(20, {2.0, 3.0}, 8);
  const auto path = std::filesystem::temp_directory_path() / "wishart_sample_test.csv";
  write_sample(s, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "eigenvalue");
  std::ifstream side(path.string() + ".json");
  const auto j = nlohmann::json::parse(side);
  CHECK(j["n"] == 20);
  CHECK(j["m"] == 40);
  CHECK(j["seed"] == 8);
  CHECK(j["params"]["model"] == "bernoulli");
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}
