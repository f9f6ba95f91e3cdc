#include "wishart/limitlaw.hpp"

#include "wishart/error.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace wishart::limitlaw {

namespace {

constexpr double kPi = std::numbers::pi;

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidParameter("alpha must be a positive finite number, got " + std::to_string(alpha));
}

void require_upper(Complex z) {
  if (!(z.imag() > 0.0)) throw InvalidParameter("Stieltjes transform needs Im z > 0");
}

double quadratic_numerator(double x, double alpha) {
  return x * x - 2.0 * x * (alpha + 1.0) + (alpha * alpha + 1.0);
}

}  // namespace

AsymptoticSequence::AsymptoticSequence(std::vector<double> values, double gamma)
    : values_(std::move(values)), gamma_(gamma) {
  if (values_.empty() || values_[0] != 1.0) throw InvalidParameter("asymptotic sequence must have A_2 = 1");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidParameter("asymptotic sequence has a non-finite entry");
  if (!(gamma_ >= 0.0)) throw InvalidParameter("growth constant must be >= 0");
}

double AsymptoticSequence::operator[](int k) const {
  if (k < 2 || k > kmax())
    throw InvalidParameter("A_" + std::to_string(k) + " outside the stored range 2.." + std::to_string(kmax()));
  return values_[static_cast<std::size_t>(k - 2)];
}

AsymptoticSequence AsymptoticSequence::delta2(int kmax) {
  std::vector<double> v(static_cast<std::size_t>(std::max(1, kmax - 1)), 0.0);
  v[0] = 1.0;
  return AsymptoticSequence(std::move(v), 1.0);
}

nlohmann::json to_json(const MomentVector& m) { return {{"alpha", m.alpha}, {"moments", m.moments}}; }

Support mp_support(double alpha) {
  const double r = std::sqrt(alpha);
  return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

MomentVector limit_moments(const AsymptoticSequence& A, double alpha, int kmax,
                           treewords::CountTableCache& tables) {
  require_alpha(alpha);
  if (kmax < 1) throw InvalidParameter("kmax must be >= 1");
  if (kmax > tables.max_k_guard())
    throw ResourceLimit("kmax=" + std::to_string(kmax) + " exceeds the enumeration guard " +
                        std::to_string(tables.max_k_guard()));
  if (A.kmax() < 2 * kmax)
    throw InvalidParameter("asymptotic sequence must be indexed up to 2*kmax = " + std::to_string(2 * kmax));

  MomentVector out{alpha, {}};
  for (int k = 1; k <= kmax; ++k) {
    long double mk = 0.0L;
    for (const auto& [key, count] : tables.table(k).entries()) {
      long double term = count.convert_to<long double>() * std::pow(static_cast<long double>(alpha), key.j_vertices);
      for (int b : key.multiplicities) term *= A[b];
      mk += term;
    }
    out.moments.push_back(static_cast<double>(mk));
  }
  return out;
}

MpSeries mp_series(int kmax) {
  MpSeries s;
  s.a.assign(1, AlphaPolynomial{1});
  s.b.assign(1, AlphaPolynomial{1});
  const AlphaPolynomial alpha{0, 1};
  for (int k = 0; k < kmax; ++k) {
    AlphaPolynomial conv;
    for (int p = 0; p <= k; ++p) conv += s.a[p] * s.b[k - p];
    s.a.push_back(alpha * conv);
    s.b.push_back(conv);
  }
  return s;
}

MomentVector mp_moments(double alpha, int kmax) {
  require_alpha(alpha);
  auto s = mp_series(kmax);
  MomentVector out{alpha, {}};
  for (int k = 1; k <= kmax; ++k) out.moments.push_back(s.a[k].evaluate(alpha));
  return out;
}

double mp_density(double x, double alpha) {
  require_alpha(alpha);
  const auto s = mp_support(alpha);
  if (!(x > s.lo && x < s.hi)) return 0.0;
  return std::sqrt((s.hi - x) * (x - s.lo)) / (2.0 * kPi * x);
}

Complex edge_sqrt(Complex z, const Support& s) {
  Complex r = std::exp(0.5 * (std::log(z - s.lo) + std::log(z - s.hi)));
  if (r.imag() <= 0.0) r = -r;
  return r;
}

Complex mp_stieltjes(Complex z, double alpha) {
  require_alpha(alpha);
  require_upper(z);
  const auto s = mp_support(alpha);
  return (alpha - z - 1.0 + edge_sqrt(z, s)) / (2.0 * z);
}

PerturbSeries perturb_series(int kmax) {
  if (kmax < 2) throw InvalidParameter("perturbation series needs kmax >= 2");
  const auto mp = mp_series(kmax);
  const AlphaPolynomial alpha{0, 1};
  PerturbSeries s;
  s.a.assign(2, AlphaPolynomial{});
  s.b.assign(2, AlphaPolynomial{});
  // A1 = α z A² B1 + α z² A³ B², B1 = z A1 B² + z² A² B³, solved order by
  // order; only already-known coefficients of A1, B1 appear on the right.
  for (int k = 2; k <= kmax; ++k) {
    const auto n1 = static_cast<std::size_t>(k - 1);
    const auto n2 = static_cast<std::size_t>(k - 2);
    AlphaPolynomial ak = alpha * (product_coefficient({&mp.a, &mp.a, &s.b}, n1) +
                                  product_coefficient({&mp.a, &mp.a, &mp.a, &mp.b, &mp.b}, n2));
    AlphaPolynomial bk = product_coefficient({&s.a, &mp.b, &mp.b}, n1) +
                         product_coefficient({&mp.a, &mp.a, &mp.b, &mp.b, &mp.b}, n2);
    s.a.push_back(std::move(ak));
    s.b.push_back(std::move(bk));
  }
  return s;
}

double perturb_density(double x, double alpha) {
  require_alpha(alpha);
  const auto s = mp_support(alpha);
  if (!(x > s.lo && x < s.hi)) return 0.0;
  return quadratic_numerator(x, alpha) / (2.0 * alpha * kPi * std::sqrt((s.hi - x) * (x - s.lo)));
}

Complex perturb_stieltjes(Complex z, double alpha) {
  require_alpha(alpha);
  require_upper(z);
  const auto s = mp_support(alpha);
  const Complex q = z * z - 2.0 * z * (alpha + 1.0) + (alpha * alpha + 1.0);
  return -q / (2.0 * alpha * edge_sqrt(z, s)) + (z - alpha - 1.0) / (2.0 * alpha);
}

DensityModel mp_model(double alpha) {
  require_alpha(alpha);
  const auto s = mp_support(alpha);
  DensityModel m;
  m.name = "mp";
  m.support = s;
  m.atom0 = alpha < 1.0 ? 1.0 - alpha : 0.0;
  m.density = [alpha](double x) { return mp_density(x, alpha); };
  m.stieltjes = [alpha](Complex z) { return mp_stieltjes(z, alpha); };
  m.on_circle = [s](double theta) {
    const double h = s.half_width();
    const double c = std::cos(theta);
    const double x = s.center() + h * std::sin(theta);
    return h * h * c * c / (2.0 * kPi * x);
  };
  return m;
}

DensityModel perturb_model(double alpha) {
  require_alpha(alpha);
  const auto s = mp_support(alpha);
  DensityModel m;
  m.name = "perturb";
  m.support = s;
  m.density = [alpha](double x) { return perturb_density(x, alpha); };
  m.stieltjes = [alpha](Complex z) { return perturb_stieltjes(z, alpha); };
  // √((b-x)(x-a)) = h cos θ cancels the Jacobian.
  m.on_circle = [s, alpha](double theta) {
    const double x = s.center() + s.half_width() * std::sin(theta);
    return quadratic_numerator(x, alpha) / (2.0 * alpha * kPi);
  };
  return m;
}

DensityModel combined_model(double alpha, double c) {
  if (!(c > 0.0)) throw InvalidParameter("c must be positive");
  auto mp = mp_model(alpha);
  auto pt = perturb_model(alpha);
  DensityModel m;
  m.name = "combined";
  m.support = mp.support;
  m.atom0 = mp.atom0;
  m.density = [mp, pt, c](double x) { return mp.density(x) + pt.density(x) / c; };
  m.stieltjes = [mp, pt, c](Complex z) { return mp.stieltjes(z) + pt.stieltjes(z) / c; };
  m.on_circle = [mp, pt, c](double theta) { return mp.on_circle(theta) + pt.on_circle(theta) / c; };
  return m;
}

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw InvalidParameter("quadrature order must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  // Boost returns the non-negative zeros; mirror them.
  const auto zeros = boost::math::legendre_p_zeros<double>(order);
  GaussRule rule;
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    if (x != 0.0) {
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
    }
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

double signed_quadrature(const std::function<double(double)>& f, const DensityModel& model, int order) {
  const auto& rule = gauss_legendre(order);
  const double h = model.support.half_width();
  const double mid = model.support.center();
  // Neumaier-compensated sum: moment integrands reach 1e5 at α = 4.
  long double sum = 0.0L, comp = 0.0L;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = 0.5 * kPi * rule.nodes[i];
    const double x = mid + h * std::sin(theta);
    const double weighted = model.on_circle ? model.on_circle(theta) : model.density(x) * h * std::cos(theta);
    const double term = f(x) * weighted * 0.5 * kPi * rule.weights[i];
    if (!std::isfinite(term)) throw NumericError("non-finite integrand at x = " + std::to_string(x));
    const long double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return static_cast<double>(sum + comp);
}

}  // namespace wishart::limitlaw
