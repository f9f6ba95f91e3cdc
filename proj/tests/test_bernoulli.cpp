#include "wishart/bernoulli.hpp"
#include "wishart/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace wishart;
using namespace wishart::bernoulli;

TEST_CASE("asymptotic sequence") {
  const auto A = bernoulli_A(4.0, 6);
  CHECK(A[2] == 1.0);
  CHECK(A[3] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(A[4] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(A.gamma() == 1.0);
  CHECK(bernoulli_A(0.25, 4).gamma() == doctest::Approx(2.0));
  CHECK(bernoulli_A(1e12, 8)[8] < 1e-30);
  CHECK_THROWS_AS(bernoulli_A(0.0, 4), InvalidParameter);
}

TEST_CASE("moments") {
  treewords::CountTableCache tables;
  CHECK(bernoulli_moments({2.0, 20.0}, 1, tables)[1] == 2.0);
  CHECK(bernoulli_moments({2.0, 20.0}, 2, tables)[2] == doctest::Approx(6.1).epsilon(1e-15));
  for (auto [a, c] : {std::pair{0.5, 3.0}, {1.0, 1.0}, {4.0, 20.0}})
    CHECK(bernoulli_moments({a, c}, 2, tables)[2] == doctest::Approx(a * a + a + a / c).epsilon(1e-15));

  const auto series = limitlaw::perturb_series(8);
  const double c = 1e6;
  for (double alpha : {1.0, 2.0}) {
    const auto m = bernoulli_moments({alpha, c}, 6, tables);
    const auto mp = limitlaw::mp_moments(alpha, 6);
    for (int k = 2; k <= 6; ++k) {
      const double ak1 = series.a[static_cast<std::size_t>(k)].evaluate(alpha);
      CHECK(std::fabs(m[k] - mp[k]) < 1e-5 * ak1);
      CHECK(c * (m[k] - mp[k]) == doctest::Approx(ak1).epsilon(1e-3));
    }
  }
  CHECK_THROWS_AS(bernoulli_moments({2.0, -1.0}, 2, tables), InvalidParameter);
}

TEST_CASE("exact 1/c expansion") {
  treewords::CountTableCache tables;
  const auto series = limitlaw::perturb_series(8);
  const auto mp = limitlaw::mp_series(8);
  for (int k = 1; k <= 8; ++k) {
    const auto terms = moment_expansion(k, tables);
    CHECK(terms[0] == mp.a[static_cast<std::size_t>(k)]);
    if (k >= 2) CHECK(terms[1] == series.a[static_cast<std::size_t>(k)]);
  }
  // Summed expansion against the moment formula at moderate c.
  for (double c : {3.0, 10.0}) {
    const auto m = bernoulli_moments({2.0, c}, 7, tables);
    for (int k = 1; k <= 7; ++k) {
      long double sum = 0.0L;
      const auto terms = moment_expansion(k, tables);
      for (std::size_t j = 0; j < terms.size(); ++j) sum += terms[j].evaluate_long(2.0) * std::pow(c, -double(j));
      CHECK(static_cast<double>(sum) == doctest::Approx(m[k]).epsilon(1e-13));
    }
  }
}

TEST_CASE("expansion residual") {
  treewords::CountTableCache tables;
  for (double c : {1.0, 5.0, 100.0}) {
    CHECK(expansion_residual({2.0, c}, 1, tables) == 0.0);
    CHECK(expansion_residual({2.0, c}, 2, tables) == 0.0);
    CHECK(expansion_residual({0.7, c}, 2, tables) == 0.0);
  }
  for (int k : {4, 6}) {
    const double ratio = expansion_residual({2.0, 100.0}, k, tables) / expansion_residual({2.0, 1000.0}, k, tables);
    CHECK(ratio > 9.0);
    CHECK(ratio < 11.0);
  }
  // Direct difference where cancellation is harmless.
  const double c = 7.0;
  const auto m = bernoulli_moments({2.0, c}, 5, tables);
  const auto mp = limitlaw::mp_moments(2.0, 5);
  const double a51 = limitlaw::perturb_series(5).a[5].evaluate(2.0);
  CHECK(expansion_residual({2.0, c}, 5, tables) == doctest::Approx(c * (m[5] - mp[5]) - a51).epsilon(1e-10));
}

TEST_CASE("population dynamics: validation") {
  PopdynConfig cfg;
  cfg.pool_size = 999;
  CHECK_THROWS_AS(popdyn_resolvent({2.0, 5.0}, {1.0, 0.1}, cfg), InvalidParameter);
  cfg.pool_size = 1000;
  cfg.sweeps = 0;
  CHECK_THROWS_AS(popdyn_resolvent({2.0, 5.0}, {1.0, 0.1}, cfg), InvalidParameter);
  cfg.sweeps = 5;
  CHECK_THROWS_AS(popdyn_resolvent({2.0, 5.0}, {1.0, 0.0}, cfg), InvalidParameter);
  CHECK_THROWS_AS(popdyn_resolvent({2.0, 5.0}, {1.0, -0.3}, cfg), InvalidParameter);
  CHECK_THROWS_AS(popdyn_wishart_density({2.0, 5.0}, 0.0, 0.01, cfg), InvalidParameter);
  CHECK_THROWS_AS(popdyn_wishart_density({2.0, 5.0}, -1.0, 0.01, cfg), InvalidParameter);
}

TEST_CASE("population dynamics: tail, symmetry, Herglotz, fixed point") {
  PopdynConfig cfg;
  cfg.pool_size = 20000;
  cfg.sweeps = 40;
  for (auto [a, c] : {std::pair{2.0, 20.0}, {0.5, 3.0}, {4.0, 1.0}}) {
    const Complex z(0.0, 50.0);
    const auto r = popdyn_resolvent({a, c}, z, cfg);
    CHECK(std::abs(r.m - (-1.0 / z)) < 0.02 * std::abs(1.0 / z));
  }
  for (Complex z : {Complex(1.0, 0.1), Complex(3.0, 0.5), Complex(0.2, 0.05), Complex(6.0, 1.0), Complex(-2.0, 0.3)}) {
    const auto r1 = popdyn_resolvent({2.0, 5.0}, z, cfg);
    const auto r2 = popdyn_resolvent({2.0, 5.0}, -std::conj(z), cfg);
    CHECK(std::abs(r2.m + std::conj(r1.m)) < 1e-12);
    CHECK(r1.m.imag() > 0.0);
    CHECK(r1.fixed_point_shift < 3.0 * r1.fixed_point_stderr);
  }
  PopulationPool pool({2.0, 5.0}, {1.5, 0.01}, 5000);
  for (int s = 0; s < 20; ++s) {
    pool.sweep(11, 1, 1024);
    CHECK(pool.min_imag() > 0.0);
  }
  CHECK(pool.iterations() == 20);
}

TEST_CASE("population dynamics: worker count does not change results") {
  PopdynConfig cfg;
  cfg.pool_size = 10000;
  cfg.sweeps = 10;
  cfg.chunk = 1000;
  cfg.workers = 1;
  const auto one = popdyn_resolvent({2.0, 5.0}, {2.0, 0.1}, cfg);
  cfg.workers = 3;
  const auto three = popdyn_resolvent({2.0, 5.0}, {2.0, 0.1}, cfg);
  CHECK(one.m == three.m);
  cfg.seed = 2;
  CHECK(popdyn_resolvent({2.0, 5.0}, {2.0, 0.1}, cfg).m != one.m);
}

TEST_CASE("population dynamics: second moment of the mixture") {
  // m(z) = -1/z - M_1/z² - M_2/z³ - ... with M_2(μ′_c) = 2αc/(1+α).
  PopdynConfig cfg;
  cfg.pool_size = 50000;
  cfg.sweeps = 30;
  const double alpha = 2.0, c = 3.0;
  const Complex z(0.0, 40.0);
  const auto r = popdyn_resolvent({alpha, c}, z, cfg);
  const Complex tail = (r.m + 1.0 / z) * -std::pow(z, 3);
  CHECK(tail.real() == doctest::Approx(2.0 * alpha * c / (1.0 + alpha)).epsilon(0.05));
}

TEST_CASE("Wishart transform identity") {
  // For the Marchenko-Pastur law the hermitized transform is known in closed
  // form through the identity itself; check the inverse direction on MP.
  const double alpha = 2.0, c = 9.0;
  for (Complex z : {Complex(1.0, 0.3), Complex(4.0, 0.1), Complex(0.2, 2.0)}) {
    const Complex w = std::sqrt(c * z);
    const Complex mw = limitlaw::mp_stieltjes(z, alpha);
    // Invert: m_H = (m_W - (α-1)/(2z)) · 2w / ((1+α) c)
    const Complex mh = (mw - (alpha - 1.0) / (2.0 * z)) * 2.0 * w / ((1.0 + alpha) * c);
    CHECK(std::abs(wishart_stieltjes_from_hermitized(alpha, c, z, mh) - mw) < 1e-14);
    CHECK(mh.imag() > 0.0);
  }
}

TEST_CASE("density reconstruction: Marchenko-Pastur limit and support") {
  PopdynConfig cfg;
  cfg.pool_size = 1000;
  cfg.sweeps = 40;
  const BernoulliParams p{2.0, 1e4};
  const auto inside = popdyn_wishart_density(p, 2.0, default_epsilon(p.c), cfg);
  CHECK(std::fabs(inside.density - limitlaw::mp_density(2.0, 2.0)) < 0.02);
  const BernoulliParams q{2.0, 1e3};
  const double beyond = limitlaw::mp_support(2.0).hi * 1.5;
  CHECK(popdyn_wishart_density(q, beyond, default_epsilon(q.c), cfg).density < 0.01);
  CHECK(default_epsilon(400.0) == doctest::Approx(1.0));
}

TEST_CASE("density reconstruction: total mass") {
  const BernoulliParams p{2.0, 20.0};
  PopdynConfig cfg;
  cfg.pool_size = 5000;
  cfg.sweeps = 60;
  const double eps = default_epsilon(p.c);
  const double hermitized = popdyn_hermitized_atom(p, eps, cfg);
  // Rank bound: at least |m - n| / (n + m) of the hermitized spectrum is zero.
  CHECK(hermitized > (p.alpha - 1.0) / (p.alpha + 1.0) - 0.01);
  // Midpoint rule in t = √(cx), where dx = 2t dt / c.
  const double t1 = 13.0, step = 0.125;
  double mass = 0.0;
  for (double t = 0.0; t < t1 - 1e-9; t += step) {
    const double mid = t + 0.5 * step;
    const double x = mid * mid / p.c;
    mass += popdyn_wishart_density(p, x, eps, cfg, hermitized).density * 2.0 * mid * step / p.c;
  }
  const double atom = wishart_atom_from_hermitized(p.alpha, hermitized);
  CHECK(atom >= 0.0);
  CHECK(atom < 0.02);
  CHECK(mass + atom == doctest::Approx(1.0).epsilon(0.05));
}
