#include "wishart/acceptance.hpp"

#include "wishart/bernoulli.hpp"
#include "wishart/error.hpp"
#include "wishart/heavytail.hpp"
#include "wishart/limitlaw.hpp"
#include "wishart/parallel.hpp"
#include "wishart/spectra.hpp"
#include "wishart/treewords.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace wishart::acceptance {

namespace {

using limitlaw::Complex;

constexpr double kPi = std::numbers::pi;

// Tolerances.
constexpr double kMassTol = 1e-10;
constexpr double kPerturbMomentTol = 1e-8;
constexpr double kFirstMomentTol = 1e-9;
constexpr double kQuadraticResidualTol = 1e-12;
constexpr double kInversionTol = 1e-4;
constexpr double kInversionEps = 1e-6;
constexpr double kClosedFormTol = 1e-14;
constexpr double kRateLo = 5.0, kRateHi = 20.0;
constexpr double kStandardErrors = 3.0;
constexpr double kHistogramGap = 0.03;
constexpr double kBulkMargin = 0.2;
constexpr double kStieltjesGap = 0.02;
constexpr double kSlopeLo = -1.6, kSlopeHi = -0.5;
constexpr double kHeavyRelTol = 0.05;
constexpr double kScalingTol = 1e-13;
constexpr double kStabilizationTol = 0.10;
constexpr double kIdentityTol = 1e-12;

// Fixed seeds.
constexpr std::uint64_t kSeedMoments = 7001;
constexpr std::uint64_t kSeedFigure = 7002;
constexpr std::uint64_t kSeedPopdyn = 8001;
constexpr std::uint64_t kSeedVariance = 9001;

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

struct Builder {
  CriterionReport report;
  void check(std::string label, bool pass, std::string detail) {
    report.checks.push_back({std::move(label), pass, std::move(detail)});
  }
  void note(std::string text) { report.notes.push_back(std::move(text)); }
};

void say(const Options& o, const std::string& msg) {
  if (o.progress) *o.progress << "  ... " << msg << std::endl;
}

AlphaPolynomial monomials(const std::map<int, treewords::Count>& by_l) {
  AlphaPolynomial p;
  for (const auto& [l, c] : by_l) p += AlphaPolynomial::monomial(c, static_cast<std::size_t>(l));
  return p;
}

// 1
void oracle_equality(Builder& b, treewords::CountTableCache& tables) {
  b.report.title = "simple-word counts equal the Marchenko-Pastur series, k = 1..8 (exact)";
  const auto series = limitlaw::mp_series(8);
  for (int k = 1; k <= 8; ++k) {
    const std::vector<int> twos(static_cast<std::size_t>(k), 2);
    const auto counted = tables.table(k).weighted_by_j_vertices(twos);
    const auto& expected = series.a[static_cast<std::size_t>(k)];
    b.check("k=" + std::to_string(k), counted == expected, counted.to_string() + " vs " + expected.to_string());
  }
}

// 2
void perturbation_oracle(Builder& b, treewords::CountTableCache& tables) {
  b.report.title = "quadruple-word counts equal the 1/c correction series, k = 2..8 (exact)";
  const auto series = limitlaw::perturb_series(8);
  for (int k = 2; k <= 8; ++k) {
    const auto counted = monomials(treewords::count_quadruple_words(k, tables.max_k_guard()));
    const auto& expected = series.a[static_cast<std::size_t>(k)];
    b.check("k=" + std::to_string(k), counted == expected, counted.to_string() + " vs " + expected.to_string());
  }
}

// 3
void quadrature_identities(Builder& b) {
  b.report.title = "mass and moment identities by quadrature";
  const auto series = limitlaw::perturb_series(6);
  auto one = [](double) { return 1.0; };
  for (double alpha : {1.0, 2.0, 4.0}) {
    const std::string a = "alpha=" + fmt(alpha);
    const auto pt = limitlaw::perturb_model(alpha);
    const double mass = limitlaw::signed_quadrature(one, pt);
    b.check(a + " correction mass", std::fabs(mass) < kMassTol, "|" + fmt(mass, 3) + "| < " + fmt(kMassTol));
    for (int k = 1; k <= 6; ++k) {
      const double q = limitlaw::signed_quadrature([k](double x) { return std::pow(x, k); }, pt);
      const double e = series.a[static_cast<std::size_t>(k)].evaluate(alpha);
      b.check(a + " correction moment k=" + std::to_string(k), std::fabs(q - e) < kPerturbMomentTol,
              fmt(q, 15) + " vs " + fmt(e, 15) + ", |diff| = " + fmt(std::fabs(q - e), 3));
    }
  }
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    const std::string a = "alpha=" + fmt(alpha);
    const auto mp = limitlaw::mp_model(alpha);
    const double mass = limitlaw::signed_quadrature(one, mp);
    b.check(a + " MP continuous mass", std::fabs(mass - std::min(alpha, 1.0)) < kMassTol,
            fmt(mass, 15) + " vs " + fmt(std::min(alpha, 1.0)));
    const double m1 = limitlaw::signed_quadrature([](double x) { return x; }, mp);
    b.check(a + " MP first moment", std::fabs(m1 - alpha) < kFirstMomentTol, fmt(m1, 15) + " vs " + fmt(alpha));
  }
}

std::vector<double> bulk_points(double alpha, int count) {
  const auto s = limitlaw::mp_support(alpha);
  std::vector<double> xs;
  for (int i = 1; i <= count; ++i) xs.push_back(s.lo + (s.hi - s.lo) * i / (count + 1.0));
  return xs;
}

// 4a
void quadratic_residual(Builder& b) {
  b.report.title = "Marchenko-Pastur transform solves its quadratic equation at 20 random points";
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> re(-2.0, 12.0), im(1e-4, 4.0);
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Complex z(re(rng), im(rng));
      const Complex s = limitlaw::mp_stieltjes(z, alpha);
      worst = std::max(worst, std::abs(z * s * s - (alpha - z - 1.0) * s + 1.0));
    }
    b.check("alpha=" + fmt(alpha), worst < kQuadraticResidualTol,
            "max residual " + fmt(worst, 3) + " < " + fmt(kQuadraticResidualTol));
  }
}

// 4b (minus sign) and 4b' (Herglotz sign)
void inversion(Builder& b, double sign) {
  b.report.title = sign < 0 ? "-(1/pi) Im S1(x + 1e-6 i) matches the correction density at 10 bulk points"
                            : "+(1/pi) Im S1(x + 1e-6 i) matches the correction density at 10 bulk points";
  for (double alpha : {1.0, 2.0, 4.0}) {
    double worst = 0.0, at = 0.0;
    for (double x : bulk_points(alpha, 10)) {
      const double rec = sign / kPi * limitlaw::perturb_stieltjes({x, kInversionEps}, alpha).imag();
      const double gap = std::fabs(rec - limitlaw::perturb_density(x, alpha));
      if (gap >= worst) worst = gap, at = x;
    }
    b.check("alpha=" + fmt(alpha), worst < kInversionTol,
            "max gap " + fmt(worst, 3) + " at x=" + fmt(at, 4) + " (tolerance " + fmt(kInversionTol) + ")");
  }
}

// 5
void closed_form(Builder& b, treewords::CountTableCache& tables) {
  b.report.title = "M2 = a^2 + a + a/c from the moment formula";
  for (auto [alpha, c] : {std::pair{2.0, 20.0}, {1.0, 1.0}, {0.5, 3.0}, {4.0, 0.25}, {3.0, 100.0}}) {
    const double m2 = bernoulli::bernoulli_moments({alpha, c}, 2, tables)[2];
    const double e = alpha * alpha + alpha + alpha / c;
    const double rel = std::fabs(m2 - e) / e;
    b.check("alpha=" + fmt(alpha) + " c=" + fmt(c), rel <= kClosedFormTol,
            fmt(m2, 17) + " vs " + fmt(e, 17) + ", rel " + fmt(rel, 3));
  }
}

// 6
void expansion_rate(Builder& b, treewords::CountTableCache& tables) {
  b.report.title = "1/c expansion: residual(c=100)/residual(c=1000) in [5, 20]";
  for (int k : {4, 6}) {
    const double r100 = bernoulli::expansion_residual({2.0, 100.0}, k, tables);
    const double r1000 = bernoulli::expansion_residual({2.0, 1000.0}, k, tables);
    const double ratio = r100 / r1000;
    b.check("k=" + std::to_string(k), ratio >= kRateLo && ratio <= kRateHi,
            "residuals " + fmt(r100) + ", " + fmt(r1000) + ", ratio " + fmt(ratio));
  }
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double stderr_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / (v.size() - 1.0) / v.size());
}

// 7
void monte_carlo(Builder& b, treewords::CountTableCache& tables, const Options& o) {
  b.report.title = "Monte Carlo moments (n=1500, 20 trials) and pooled histograms (n=3000, 100 trials)";
  {
    const bernoulli::BernoulliParams p{2.0, 20.0, true};
    constexpr int n = 1500, trials = 20, kmax = 5;
    say(o, "moments: " + std::to_string(trials) + " eigensolves at n=" + std::to_string(n));
    std::vector<std::vector<double>> per_k(kmax);
    std::vector<limitlaw::MomentVector> results(trials);
    parallel_for(trials, o.workers, [&](std::size_t t) {
      results[t] = spectra::empirical_moments(spectra::sample_wishart_bernoulli(n, p, spectra::trial_seed(kSeedMoments, t)), kmax);
    });
    for (const auto& r : results)
      for (int k = 1; k <= kmax; ++k) per_k[static_cast<std::size_t>(k - 1)].push_back(r[k]);
    const auto formula = bernoulli::bernoulli_moments(p, kmax, tables);
    for (int k = 1; k <= kmax; ++k) {
      const auto& v = per_k[static_cast<std::size_t>(k - 1)];
      const double mu = mean_of(v), se = stderr_of(v);
      const double z = std::fabs(mu - formula[k]) / se;
      b.check("moment k=" + std::to_string(k), z < kStandardErrors,
              "trial mean " + fmt(mu, 8) + " vs " + fmt(formula[k], 8) + ", " + fmt(z, 3) + " SE (SE " + fmt(se, 3) + ")");
    }
  }
  for (double alpha : {2.0, 4.0}) {
    const bernoulli::BernoulliParams p{alpha, 20.0, false};
    constexpr int n = 3000, trials = 100;
    say(o, "histogram alpha=" + fmt(alpha) + ": " + std::to_string(trials) + " eigensolves at n=" + std::to_string(n));
    std::vector<std::vector<double>> spectra_by_trial(trials);
    parallel_for(trials, o.workers, [&](std::size_t t) {
      spectra_by_trial[t] = spectra::sample_wishart_bernoulli(n, p, spectra::trial_seed(kSeedFigure + static_cast<std::uint64_t>(alpha), t)).eigenvalues;
      if (o.progress && (t + 1) % 10 == 0) say(o, "trial " + std::to_string(t + 1));
    });
    std::vector<double> pooled;
    for (const auto& s : spectra_by_trial) pooled.insert(pooled.end(), s.begin(), s.end());
    const auto h = spectra::default_histogram(pooled, alpha);
    const auto model = limitlaw::combined_model(alpha, p.c);
    const auto mp = limitlaw::mp_model(alpha);
    const auto& rule = limitlaw::gauss_legendre(16);
    const double lo = model.support.lo + kBulkMargin, hi = model.support.hi - kBulkMargin;
    double gap = 0.0, gap_mp = 0.0, at = 0.0;
    int used = 0;
    for (std::size_t i = 0; i < h.density.size(); ++i) {
      const double x0 = h.centers[i] - 0.5 * h.width(), x1 = h.centers[i] + 0.5 * h.width();
      if (x0 < lo || x1 > hi) continue;
      double avg = 0.0, avg_mp = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double x = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * rule.nodes[j];
        avg += 0.5 * rule.weights[j] * model.density(x);
        avg_mp += 0.5 * rule.weights[j] * mp.density(x);
      }
      ++used;
      if (std::fabs(h.density[i] - avg) > gap) gap = std::fabs(h.density[i] - avg), at = h.centers[i];
      gap_mp = std::max(gap_mp, std::fabs(h.density[i] - avg_mp));
    }
    b.check("histogram alpha=" + fmt(alpha), gap < kHistogramGap,
            "sup bin gap " + fmt(gap, 4) + " at x=" + fmt(at, 4) + " over " + std::to_string(used) + " bulk bins (overflow " +
                fmt(h.overflow, 3) + ")");
    b.note("alpha=" + fmt(alpha) + ": sup bin gap against the Marchenko-Pastur density alone " + fmt(gap_mp, 4));
  }
}

// 8
void popdyn_vs_simulation(Builder& b, const Options& o) {
  b.report.title = "population dynamics vs hermitized empirical Stieltjes transform (alpha=2, c=20, n=3000)";
  const bernoulli::BernoulliParams p{2.0, 20.0, false};
  constexpr int n = 3000, points = 10;
  constexpr double eta = 0.1;
  say(o, "one eigensolve at n=3000");
  const auto sample = spectra::sample_wishart_bernoulli(n, p, kSeedPopdyn);
  const auto s = limitlaw::mp_support(p.alpha);
  const double t0 = std::sqrt(p.c * (s.lo + kBulkMargin)), t1 = std::sqrt(p.c * (s.hi - kBulkMargin));
  bernoulli::PopdynConfig cfg;
  cfg.pool_size = 100000;
  cfg.seed = kSeedPopdyn;
  cfg.workers = o.workers;
  for (int i = 0; i < points; ++i) {
    const double t = t0 + (t1 - t0) * i / (points - 1.0);
    const Complex z(t, eta);
    say(o, "population dynamics at t=" + fmt(t, 4));
    const auto r = bernoulli::popdyn_resolvent(p, z, cfg);
    const Complex emp = spectra::hermitized_stieltjes(sample, p.c, z);
    const double gap = std::abs(r.m - emp);
    b.check("t=" + fmt(t, 4), gap < kStieltjesGap && r.converged,
            "|m_popdyn - m_emp| = " + fmt(gap, 3) + " (popdyn " + fmt(r.m.real(), 5) + "+" + fmt(r.m.imag(), 5) +
                "i, SE " + fmt(r.stderr_, 2) + (r.converged ? "" : ", not converged") + ")");
  }
}

// 9
void variance_decay(Builder& b, const Options& o) {
  b.report.title = "variance of M2 decays with slope in [-1.6, -0.5] (alpha=2, c=5, 50 trials)";
  say(o, "150 eigensolves at n = 200, 400, 800");
  const auto d = spectra::variance_decay_test({2.0, 5.0, true}, {200, 400, 800}, 50, 2, kSeedVariance, o.workers);
  std::string pts;
  for (const auto& pt : d.points) pts += " n=" + std::to_string(pt.n) + ":" + fmt(pt.variance, 4);
  b.check("slope", d.slope >= kSlopeLo && d.slope <= kSlopeHi, "slope " + fmt(d.slope, 4) + ";" + pts);
}

// 10
void heavy_tail(Builder& b, treewords::CountTableCache& tables) {
  b.report.title = "heavy tail: A_k vs n=1e6 quadrature, normalization, B-scaling, expansion probes";
  for (double beta : {1.5, 2.5}) {
    for (double B : {0.5, 1.0}) {
      const heavytail::HeavyTailParams p{beta, B, 2.0};
      const auto A = heavytail::heavy_A(p, 6);
      const auto A1 = heavytail::heavy_A({beta, 1.0, 2.0}, 6);
      const std::string tag = "beta=" + fmt(beta) + " B=" + fmt(B);
      b.check(tag + " A_2", A[2] == 1.0, "A_2 = " + fmt(A[2], 17));
      double worst = 0.0;
      int worst_k = 0;
      for (int k = 3; k <= 6; ++k) {
        const double pre = heavytail::prelimit_A(p, 1e6, k);
        const double rel = A[k] == 0.0 ? std::fabs(pre) : std::fabs(pre - A[k]) / A[k];
        if (rel >= worst) worst = rel, worst_k = k;
      }
      b.check(tag + " A_k vs n=1e6", worst < kHeavyRelTol,
              "max relative error " + fmt(worst, 3) + " at k=" + std::to_string(worst_k));
      double scaling = 0.0;
      for (int k = 4; k <= 6; k += 2)
        scaling = std::max(scaling, std::fabs(A[k] / A1[k] / std::pow(B, (beta - 1.0) * (0.5 * k - 1.0)) - 1.0));
      b.check(tag + " B-scaling", scaling < kScalingTol, "max relative deviation " + fmt(scaling, 3));
    }
    for (int k = 2; k <= 4; ++k) {
      const auto big = heavytail::expansion_check({beta, 0.1, 2.0}, k, tables);
      const auto small = heavytail::expansion_check({beta, 0.05, 2.0}, k, tables);
      const double r_big = big.lhs / std::pow(0.1, beta - 1.0), r_small = small.lhs / std::pow(0.05, beta - 1.0);
      const double drift = std::fabs(r_big / r_small - 1.0);
      b.check("beta=" + fmt(beta) + " k=" + std::to_string(k) + " lhs/B^(beta-1) stabilizes", drift < kStabilizationTol,
              fmt(r_big) + " (B=0.1) vs " + fmt(r_small) + " (B=0.05), drift " + fmt(drift, 3));
      b.note("beta=" + fmt(beta) + " k=" + std::to_string(k) + " B=0.05: lhs " + fmt(small.lhs) + ", closed-form coefficient " +
             fmt(*small.rhs_theorem) + " (ratio " + fmt(small.ratio, 4) + "), A_4 form " + fmt(small.rhs_A4) +
             " (ratio " + fmt(small.lhs / small.rhs_A4, 4) + ")");
    }
    const heavytail::HeavyTailParams p{beta, 0.1, 2.0};
    const auto e = heavytail::expansion_check(p, 2, tables);
    const double gap = std::fabs(e.lhs - p.alpha * heavytail::heavy_A4(p));
    b.check("beta=" + fmt(beta) + " k=2 identity lhs = alpha A_4", gap < kIdentityTol, "|diff| = " + fmt(gap, 3));
  }
}

}  // namespace

bool CriterionReport::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::vector<std::string> criterion_ids() { return {"1", "2", "3", "4a", "4b", "4b'", "5", "6", "7", "8", "9", "10"}; }

bool is_criterion(const std::string& id) {
  const auto ids = criterion_ids();
  return id == "4" || std::find(ids.begin(), ids.end(), id) != ids.end();
}

CriterionReport run(const std::string& id, const Options& options) {
  if (!is_criterion(id)) throw InvalidParameter("unknown criterion " + id);
  treewords::CountTableCache tables(options.cache_dir);
  Builder b;
  b.report.id = id;
  const auto start = std::chrono::steady_clock::now();
  if (id == "1") oracle_equality(b, tables);
  else if (id == "2") perturbation_oracle(b, tables);
  else if (id == "3") quadrature_identities(b);
  else if (id == "4a") quadratic_residual(b);
  else if (id == "4b") inversion(b, -1.0);
  else if (id == "4b'") inversion(b, 1.0);
  else if (id == "4") {
    for (const char* part : {"4a", "4b", "4b'"}) {
      auto sub = run(part, options);
      for (auto& c : sub.checks) b.check(std::string(part) + " " + c.label, c.pass, c.detail);
    }
    b.report.title = "Stieltjes consistency (4a residual, 4b inversion with -1/pi, 4b' inversion with +1/pi)";
  } else if (id == "5") closed_form(b, tables);
  else if (id == "6") expansion_rate(b, tables);
  else if (id == "7") monte_carlo(b, tables, options);
  else if (id == "8") popdyn_vs_simulation(b, options);
  else if (id == "9") variance_decay(b, options);
  else if (id == "10") heavy_tail(b, tables);
  b.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return b.report;
}

std::vector<std::string> suite(const std::string& name) {
  if (name == "oracles") return {"1", "2", "3", "4", "5"};
  if (name == "expansion") return {"6", "10"};
  if (name == "variance") return {"9"};
  if (name == "popdyn") return {"8"};
  if (name == "montecarlo") return {"7"};
  if (name == "all") return {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10"};
  throw InvalidParameter("unknown suite " + name + " (oracles, expansion, variance, popdyn, montecarlo, all)");
}

void print(const CriterionReport& r, std::ostream& out) {
  out << "criterion " << r.id << ": " << (r.pass() ? "PASS" : "FAIL") << "  " << r.title << " [" << std::fixed
      << std::setprecision(1) << r.seconds << " s]" << std::defaultfloat << '\n';
  for (const auto& c : r.checks) out << "    " << (c.pass ? "ok   " : "FAIL ") << c.label << ": " << c.detail << '\n';
  for (const auto& n : r.notes) out << "    note " << n << '\n';
}

}  // namespace wishart::acceptance
