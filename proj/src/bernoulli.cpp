#include "wishart/bernoulli.hpp"

#include "wishart/error.hpp"
#include "wishart/parallel.hpp"
#include "wishart/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>

namespace wishart::bernoulli {

void BernoulliParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParameter("alpha must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParameter("c must be positive");
}

limitlaw::AsymptoticSequence bernoulli_A(double c, int kmax) {
  if (!(c > 0.0)) throw InvalidParameter("c must be positive");
  if (kmax < 2) throw InvalidParameter("kmax must be >= 2");
  std::vector<double> values;
  for (int k = 2; k <= kmax; ++k) values.push_back(k == 2 ? 1.0 : std::pow(c, 1.0 - 0.5 * k));
  return limitlaw::AsymptoticSequence(std::move(values), std::max(1.0, 1.0 / std::sqrt(c)));
}

limitlaw::MomentVector bernoulli_moments(const BernoulliParams& p, int kmax, treewords::CountTableCache& tables) {
  p.validate();
  return limitlaw::limit_moments(bernoulli_A(p.c, 2 * std::max(kmax, 1)), p.alpha, kmax, tables);
}

std::vector<AlphaPolynomial> moment_expansion(int k, treewords::CountTableCache& tables) {
  const auto& table = tables.table(k);
  std::vector<AlphaPolynomial> out(static_cast<std::size_t>(k));
  for (const auto& [key, count] : table.entries()) {
    const int power = k - key.edges;
    out[static_cast<std::size_t>(power)] += AlphaPolynomial::monomial(count, static_cast<std::size_t>(key.j_vertices));
  }
  return out;
}

double expansion_residual(const BernoulliParams& p, int k, treewords::CountTableCache& tables) {
  p.validate();
  const auto terms = moment_expansion(k, tables);
  long double residual = 0.0L;
  for (std::size_t j = 2; j < terms.size(); ++j)
    residual += terms[j].evaluate_long(p.alpha) * std::pow(static_cast<long double>(p.c), 1.0L - j);
  return static_cast<double>(residual);
}

void PopdynConfig::validate() const {
  if (pool_size < 1000) throw InvalidParameter("pool size must be >= 1000");
  if (sweeps < 1) throw InvalidParameter("sweeps must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw InvalidParameter("damping must lie in (0, 1]");
  if (chunk == 0) throw InvalidParameter("chunk must be positive");
}

PopulationPool::PopulationPool(const BernoulliParams& p, Complex z, std::size_t size)
    : params_(p), z_(z), pool1_(size, -1.0 / z), pool2_(size, -1.0 / z) {
  p.validate();
  if (!(z.imag() > 0.0)) throw InvalidParameter("population dynamics needs Im z > 0");
}

namespace {

void refill(std::vector<Complex>& target, const std::vector<Complex>& source, double mean_offspring, Complex z,
            std::uint64_t seed, std::uint64_t iteration, std::uint64_t pool_id, unsigned workers,
            std::size_t chunk) {
  const std::size_t n = target.size();
  const std::size_t chunks = (n + chunk - 1) / chunk;
  parallel_for(chunks, workers, [&](std::size_t ci) {
    Rng rng = make_stream(seed, {iteration, pool_id, ci});
    std::poisson_distribution<int> offspring(mean_offspring);
    std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
    const std::size_t end = std::min(n, (ci + 1) * chunk);
    for (std::size_t i = ci * chunk; i < end; ++i) {
      Complex s = z;
      for (int d = offspring(rng); d > 0; --d) s += source[pick(rng)];
      target[i] = -1.0 / s;
    }
  });
}

struct MeanVar {
  Complex mean;
  double var;  // E|X - mean|²
};

MeanVar mean_var(const std::vector<Complex>& v) {
  Complex sum = 0.0;
  for (const auto& x : v) sum += x;
  const Complex mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (const auto& x : v) ss += std::norm(x - mean);
  return {mean, ss / static_cast<double>(std::max<std::size_t>(1, v.size() - 1))};
}

}  // namespace

void PopulationPool::sweep(std::uint64_t seed, unsigned workers, std::size_t chunk) {
  std::vector<Complex> next1(pool1_.size()), next2(pool2_.size());
  const auto it = static_cast<std::uint64_t>(iterations_);
  refill(next1, pool2_, params_.c, z_, seed, it, 1, workers, chunk);
  refill(next2, pool1_, params_.alpha * params_.c, z_, seed, it, 2, workers, chunk);
  pool1_ = std::move(next1);
  pool2_ = std::move(next2);
  ++iterations_;
  if (!(min_imag() > 0.0))
    throw NumericError("population dynamics left the upper half-plane at sweep " + std::to_string(iterations_));
}

Complex PopulationPool::mean1() const { return mean_var(pool1_).mean; }
Complex PopulationPool::mean2() const { return mean_var(pool2_).mean; }

Complex PopulationPool::mixture() const {
  const double a = params_.alpha;
  return (a / (a + 1.0)) * mean1() + (1.0 / (a + 1.0)) * mean2();
}

double PopulationPool::mixture_stderr() const {
  const double a = params_.alpha;
  const auto s1 = mean_var(pool1_);
  const auto s2 = mean_var(pool2_);
  const double w1 = a / (a + 1.0), w2 = 1.0 / (a + 1.0);
  return std::sqrt(w1 * w1 * s1.var / static_cast<double>(pool1_.size()) +
                   w2 * w2 * s2.var / static_cast<double>(pool2_.size()));
}

double PopulationPool::min_imag() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& x : pool1_) lo = std::min(lo, x.imag());
  for (const auto& x : pool2_) lo = std::min(lo, x.imag());
  return lo;
}

nlohmann::json to_json(const PopdynResult& r) {
  return {{"m_re", r.m.real()},
          {"m_im", r.m.imag()},
          {"stderr", r.stderr_},
          {"sweeps", r.sweeps},
          {"pool_size", r.pool_size},
          {"seed", r.seed},
          {"oscillation", r.oscillation},
          {"residual", r.fixed_point_shift},
          {"residual_stderr", r.fixed_point_stderr},
          {"converged", r.converged},
          {"warnings", r.warnings},
          {"rng", kRngAlgorithm}};
}

PopdynResult popdyn_resolvent(const BernoulliParams& p, Complex z, const PopdynConfig& cfg) {
  p.validate();
  cfg.validate();
  if (!(z.imag() > 0.0)) throw InvalidParameter("population dynamics needs Im z > 0");

  PopulationPool pool(p, z, cfg.pool_size);
  PopdynResult r;
  r.pool_size = cfg.pool_size;
  r.seed = cfg.seed;

  constexpr int kWindow = 10;
  std::deque<double> recent;
  Complex previous = pool.mixture();
  Complex estimate = previous;
  for (int s = 0; s < cfg.sweeps; ++s) {
    pool.sweep(cfg.seed, cfg.workers, cfg.chunk);
    const Complex current = pool.mixture();
    estimate = s == 0 ? current : (1.0 - cfg.damping) * estimate + cfg.damping * current;
    recent.push_back(std::abs(current - previous));
    if (recent.size() > kWindow) recent.pop_front();
    previous = current;
  }
  r.m = estimate;
  r.sweeps = pool.iterations();
  r.stderr_ = pool.mixture_stderr();
  r.oscillation = recent.empty() ? 0.0 : *std::max_element(recent.begin(), recent.end());

  // One more sweep from the final pools: a fixed point moves the mean only by
  // resampling noise.
  const Complex before = pool.mixture();
  pool.sweep(cfg.seed, cfg.workers, cfg.chunk);
  r.fixed_point_shift = std::abs(pool.mixture() - before);
  r.fixed_point_stderr = std::sqrt(2.0) * pool.mixture_stderr();

  if (r.oscillation > cfg.tolerance + 4.0 * r.stderr_) {
    r.converged = false;
    r.warnings.push_back("pool-mean oscillation " + std::to_string(r.oscillation) + " above tolerance after " +
                         std::to_string(r.sweeps) + " sweeps");
  }
  return r;
}

Complex wishart_stieltjes_from_hermitized(double alpha, double c, Complex z, Complex m_hermitized) {
  Complex w = std::sqrt(c * z);
  if (w.imag() < 0.0) w = -w;
  return (1.0 + alpha) * c * m_hermitized / (2.0 * w) + (alpha - 1.0) / (2.0 * z);
}

double default_epsilon(double c) { return 0.05 * std::sqrt(c); }

double popdyn_hermitized_atom(const BernoulliParams& p, double epsilon, const PopdynConfig& cfg) {
  p.validate();
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
  return epsilon * popdyn_resolvent(p, Complex(0.0, epsilon), cfg).m.imag();
}

double wishart_atom_from_hermitized(double alpha, double hermitized_atom) {
  return std::clamp(0.5 * (hermitized_atom * (1.0 + alpha) + 1.0 - alpha), 0.0, 1.0);
}

DensityEstimate popdyn_wishart_density(const BernoulliParams& p, double x, double epsilon, const PopdynConfig& cfg,
                                       std::optional<double> hermitized_atom) {
  p.validate();
  if (!(x > 0.0)) throw InvalidParameter("density reconstruction needs x > 0");
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
  const double atom = hermitized_atom ? *hermitized_atom : popdyn_hermitized_atom(p, epsilon, cfg);
  const double t = std::sqrt(p.c * x);
  const auto r = popdyn_resolvent(p, Complex(t, epsilon), cfg);
  const double im = r.m.imag() - atom * epsilon / (t * t + epsilon * epsilon);
  const double jac = std::sqrt(p.c / x) * (1.0 + p.alpha) / 2.0;
  return {x, im / std::numbers::pi * jac, r.stderr_ / std::numbers::pi * jac};
}

double popdyn_wishart_atom(const BernoulliParams& p, double epsilon, const PopdynConfig& cfg) {
  return wishart_atom_from_hermitized(p.alpha, popdyn_hermitized_atom(p, epsilon, cfg));
}

}  // namespace wishart::bernoulli
