#include "wishart/error.hpp"
#include "wishart/heavytail.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace wishart;
using namespace wishart::heavytail;

TEST_CASE("normalization constant") {
  CHECK(c_beta(2.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
  CHECK(1.0 / c_beta(3.0) == doctest::Approx(4.0 * std::numbers::pi / (3.0 * std::sqrt(3.0))).epsilon(1e-12));
  for (double b : {1.2, 1.5, 2.5, 2.9}) {
    CHECK(c_beta(b) > 0.0);
    CHECK(1.0 / c_beta(b) == doctest::Approx(normalization_closed_form(b)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(c_beta(1.0), InvalidParameter);
  CHECK_THROWS_AS(c_beta(0.5), InvalidParameter);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(heavy_A({3.0, 1.0, 1.0}, 4), InvalidParameter);
  CHECK_THROWS_AS(heavy_A({2.0, 0.0, 1.0}, 4), InvalidParameter);
  CHECK_THROWS_AS(heavy_A({2.0, 1.0, -1.0}, 4), InvalidParameter);
  CHECK_THROWS_AS(sample_truncated({2.0, 1.0, 1.0}, 10, 0, 1), InvalidParameter);
}

TEST_CASE("asymptotic sequence") {
  for (double b : {1.5, 2.0, 2.5}) {
    for (double B : {0.1, 0.5, 1.0, 3.0}) {
      const HeavyTailParams p{b, B, 2.0};
      const auto A = heavy_A(p, 12);
      CHECK(A[2] == 1.0);
      CHECK(A[3] == 0.0);
      CHECK(A[4] == doctest::Approx(heavy_A4(p)).epsilon(1e-13));
      const auto A1 = heavy_A({b, 1.0, 2.0}, 12);
      for (int k = 4; k <= 12; k += 2) {
        CHECK(A[k] > 0.0);
        CHECK(A[k] / A1[k] == doctest::Approx(std::pow(B, (b - 1.0) * (0.5 * k - 1.0))).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("asymptotic sequence against finite-n quadrature") {
  for (double b : {1.5, 2.0, 2.5}) {
    for (double B : {0.5, 1.0}) {
      const HeavyTailParams p{b, B, 1.0};
      const auto A = heavy_A(p, 6);
      for (int k = 2; k <= 6; k += 2) {
        CAPTURE(b);
        CAPTURE(B);
        CAPTURE(k);
        CHECK(prelimit_A(p, 1e6, k) == doctest::Approx(A[k]).epsilon(0.05));
      }
      CHECK(prelimit_A(p, 1e6, 3) == 0.0);
    }
  }
}

TEST_CASE("truncated moments") {
  const HeavyTailParams p{2.0, 1.0, 1.0};
  CHECK(truncated_moment(p, 100, 0) == doctest::Approx(1.0).epsilon(1e-10));
  // β = 2: ∫_0^T x²/(1+x²) = T - atan T, tail = π/2 - atan T.
  for (double n : {1.0, 100.0, 1e6}) {
    const double T = cutoff(p, n);
    const double expect = 2.0 / std::numbers::pi * (T - std::atan(T)) + 2.0 / std::numbers::pi * (std::numbers::pi / 2 - std::atan(T)) * T * T;
    CHECK(truncated_moment(p, n, 2) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK(tail_integral(2.0, 1.0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-13));
  CHECK(tail_integral(2.0, 1e8) == doctest::Approx(1e-8).epsilon(1e-7));
}

TEST_CASE("limit moments") {
  treewords::CountTableCache tables;
  const HeavyTailParams p{2.0, 0.1, 2.0};
  const auto m = heavy_moments(p, 4, tables);
  CHECK(m[1] == 2.0);
  CHECK(m[2] == doctest::Approx(6.0 + 2.0 * heavy_A4(p)).epsilon(1e-14));
  const auto tiny = heavy_moments({2.5, 1e-8, 2.0}, 6, tables);
  const auto mp = limitlaw::mp_moments(2.0, 6);
  for (int k = 1; k <= 6; ++k) CHECK(tiny[k] == doctest::Approx(mp[k]).epsilon(1e-10));
}

TEST_CASE("expansion check") {
  treewords::CountTableCache tables;
  const auto k1 = expansion_check({2.5, 0.1, 2.0}, 1, tables);
  CHECK(k1.lhs == 0.0);
  CHECK(k1.rhs_A4 == 0.0);
  CHECK(*k1.rhs_theorem == 0.0);

  for (double b : {1.5, 2.5}) {
    const HeavyTailParams p{b, 0.1, 2.0};
    const auto e = expansion_check(p, 2, tables);
    CHECK(std::fabs(e.lhs - p.alpha * heavy_A4(p)) < 1e-12);
    CHECK(std::fabs(e.rhs_A4 - e.lhs) < 1e-12);
    REQUIRE(e.rhs_theorem.has_value());
    CHECK(e.warnings.empty());
  }

  const auto at2 = expansion_check({2.0, 0.1, 2.0}, 3, tables);
  CHECK_FALSE(at2.rhs_theorem.has_value());
  CHECK(at2.warnings.size() == 1);
  CHECK(at2.ratio == doctest::Approx(at2.lhs / at2.rhs_A4));
  CHECK(to_json(at2)["rhs_theorem"].is_null());

  for (int k = 2; k <= 4; ++k) {
    const double big = expansion_check({2.5, 0.1, 2.0}, k, tables).lhs;
    const double small = expansion_check({2.5, 0.05, 2.0}, k, tables).lhs;
    CHECK(big / small == doctest::Approx(std::pow(2.0, 1.5)).epsilon(0.10));
  }
}

TEST_CASE("sampling: support, symmetry, determinism") {
  const HeavyTailParams p{1.5, 0.5, 1.0};
  const double n = 1000;
  const auto x = sample_truncated(p, n, 1'000'000, 3);
  const double T = cutoff(p, n);
  CHECK(std::all_of(x.begin(), x.end(), [T](double v) { return std::fabs(v) <= T; }));
  double sum = 0.0;
  for (double v : x) sum += v;
  const double sd = std::sqrt(truncated_moment(p, n, 2));
  CHECK(std::fabs(sum / x.size()) < 4.0 * sd / std::sqrt(x.size()));
  const auto atoms = std::count_if(x.begin(), x.end(), [T](double v) { return std::fabs(v) == T; });
  const double expected = 2.0 * c_beta(p.beta) * tail_integral(p.beta, T) * x.size();
  CHECK(std::fabs(atoms - expected) < 5.0 * std::sqrt(expected));

  const auto a = sample_truncated(p, n, 10000, 9, 1, 1000);
  const auto b = sample_truncated(p, n, 10000, 9, 4, 1000);
  CHECK(a == b);
}

TEST_CASE("sampling: moments against quadrature") {
  // Continuous-part CDF check at a few quantiles.
  {
    const HeavyTailParams p{2.0, 1.0, 1.0};
    auto x = sample_truncated(p, 100, 400000, 5);
    for (auto& v : x) v = std::fabs(v);
    std::sort(x.begin(), x.end());
    for (double q : {0.5, 1.0, 3.0, 20.0}) {
      const double F = 2.0 / std::numbers::pi * std::atan(q);
      const double emp = static_cast<double>(std::upper_bound(x.begin(), x.end(), q) - x.begin()) / x.size();
      CHECK(std::fabs(emp - F) < 4.0 * std::sqrt(F * (1 - F) / x.size()));
    }
  }
  for (auto [n, count, rel] : {std::tuple{1e2, 2'000'000, 0.02}, {1e4, 10'000'000, -1.0}}) {
    const HeavyTailParams p{2.0, 1.0, 1.0};
    const auto x = sample_truncated(p, n, static_cast<std::size_t>(count), 17);
    long double m2 = 0, m4 = 0, m8 = 0;
    for (double v : x) {
      const long double v2 = static_cast<long double>(v) * v;
      m2 += v2;
      m4 += v2 * v2;
      m8 += v2 * v2 * v2 * v2;
    }
    m2 /= x.size();
    m4 /= x.size();
    m8 /= x.size();
    const double ratio = static_cast<double>(m4 / (m2 * m2));
    const double expect = truncated_moment(p, n, 4) / std::pow(truncated_moment(p, n, 2), 2);
    // Delta-method standard error of M4/M2², dominated by Var(x⁴).
    const double se = static_cast<double>(std::sqrt((m8 - m4 * m4) / x.size()) / (m2 * m2));
    CAPTURE(n);
    CAPTURE(se / expect);
    CHECK(std::fabs(ratio - expect) < 4.0 * se);
    if (rel > 0) CHECK(ratio == doctest::Approx(expect).epsilon(rel));
  }
}
