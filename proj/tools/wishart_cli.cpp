#include "wishart/acceptance.hpp"
#include "wishart/bernoulli.hpp"
#include "wishart/error.hpp"
#include "wishart/heavytail.hpp"
#include "wishart/limitlaw.hpp"
#include "wishart/parallel.hpp"
#include "wishart/rng.hpp"
#include "wishart/spectra.hpp"
#include "wishart/treewords.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef WISHART_VERSION
#define WISHART_VERSION "unknown"
#endif

namespace {

using namespace wishart;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitAcceptance = 5;

struct Settings {
  double alpha = 1.0;
  double c = 1.0;
  double beta = 2.0;
  double B = 1.0;
  int k = 2;
  int kmax = 6;
  int n = 1000;
  int trials = 1;
  std::uint64_t seed = 1;
  std::optional<double> epsilon;
  std::size_t pool_size = 100000;
  int sweeps = 200;
  int bins = 80;
  std::string out;
  std::string format = "csv";
  unsigned workers = default_workers();
  std::string cache_dir;

  std::string model = "mp";
  std::string law = "mp";
  std::string sim_model = "bernoulli";
  std::vector<double> A;
  bool centered = false;
  std::optional<double> x;
  double xmin = 0.0;
  std::optional<double> xmax;
  int points = 200;
  double eta = 0.1;
  std::string preset;
  std::vector<std::string> criteria;
  std::string suite = "oracles";
  std::string report = "text";
};

std::optional<fs::path> cache_dir(const Settings& s) {
  if (s.cache_dir.empty()) return std::nullopt;
  return fs::path(s.cache_dir);
}

// Output sink: --out file or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InvalidParameter("cannot open " + path + " for writing");
    }
  }
  std::ostream& os() { return path_.empty() ? std::cout : file_; }
  // Metadata goes inline for JSON and to <out>.json for CSV files.
  void sidecar(const json& meta) {
    if (path_.empty()) return;
    std::ofstream f(path_ + ".json", std::ios::binary);
    f << meta.dump(2) << '\n';
  }

 private:
  std::string path_;
  std::ofstream file_;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

json base_meta(const std::string& command, json config) {
  return {{"command", command}, {"version", WISHART_VERSION}, {"config", std::move(config)}};
}

void require_format(const Settings& s) {
  if (s.format != "csv" && s.format != "json") throw InvalidParameter("--format must be csv or json");
}

bernoulli::BernoulliParams bernoulli_params(const Settings& s) {
  bernoulli::BernoulliParams p{s.alpha, s.c, s.centered};
  p.validate();
  return p;
}

heavytail::HeavyTailParams heavy_params(const Settings& s) {
  heavytail::HeavyTailParams p{s.beta, s.B, s.alpha};
  p.validate();
  return p;
}

bernoulli::PopdynConfig popdyn_config(const Settings& s) {
  bernoulli::PopdynConfig cfg;
  cfg.pool_size = s.pool_size;
  cfg.sweeps = s.sweeps;
  cfg.seed = s.seed;
  cfg.workers = s.workers;
  cfg.validate();
  return cfg;
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParameter("alpha must be positive");
}

// enumerate

int cmd_enumerate(const Settings& s) {
  if (s.k < 1) throw InvalidParameter("k must be >= 1");
  treewords::CountTableCache tables(cache_dir(s));
  if (s.k > tables.max_k_guard())
    throw ResourceLimit("k = " + std::to_string(s.k) + " exceeds the enumeration guard " +
                        std::to_string(tables.max_k_guard()));
  json doc = treewords::to_json(tables.table(s.k));
  doc["metadata"] = base_meta("enumerate", {{"k", s.k}});
  Sink sink(s.out);
  sink.os() << doc.dump(2) << '\n';
  return 0;
}

// moments

int cmd_moments(const Settings& s) {
  require_format(s);
  if (s.kmax < 1) throw InvalidParameter("kmax must be >= 1");
  require_alpha(s.alpha);
  treewords::CountTableCache tables(cache_dir(s));
  json config = {{"model", s.model}, {"alpha", s.alpha}, {"kmax", s.kmax}};
  limitlaw::MomentVector m;
  if (s.model == "mp") {
    m = limitlaw::mp_moments(s.alpha, s.kmax);
  } else if (s.model == "bernoulli") {
    const auto p = bernoulli_params(s);
    config["c"] = s.c;
    config["centered"] = s.centered;
    m = bernoulli::bernoulli_moments(p, s.kmax, tables);
  } else if (s.model == "heavy") {
    const auto p = heavy_params(s);
    config["beta"] = s.beta;
    config["B"] = s.B;
    m = heavytail::heavy_moments(p, s.kmax, tables);
  } else if (s.model == "custom-A") {
    if (s.A.empty()) throw InvalidParameter("custom-A needs --A A_2,A_3,...");
    if (static_cast<int>(s.A.size()) + 1 < 2 * s.kmax)
      throw InvalidParameter("custom-A needs A_2 .. A_" + std::to_string(2 * s.kmax) + " for kmax = " +
                             std::to_string(s.kmax));
    double gamma = 1.0;
    for (std::size_t i = 0; i < s.A.size(); ++i)
      gamma = std::max(gamma, std::pow(std::fabs(s.A[i]), 1.0 / static_cast<double>(i + 2)));
    config["A"] = s.A;
    m = limitlaw::limit_moments(limitlaw::AsymptoticSequence(s.A, gamma), s.alpha, s.kmax, tables);
  } else {
    throw InvalidParameter("unknown model " + s.model + " (mp, bernoulli, heavy, custom-A)");
  }
  config["format"] = s.format;
  const json meta = base_meta("moments", config);
  Sink sink(s.out);
  if (s.format == "json") {
    sink.os() << json{{"metadata", meta}, {"moments", limitlaw::to_json(m)}}.dump(2) << '\n';
  } else {
    sink.os() << "k,moment\n";
    for (int k = 1; k <= m.kmax(); ++k) sink.os() << k << ',' << num(m[k]) << '\n';
    sink.sidecar(meta);
  }
  return 0;
}

// density

std::vector<double> grid(const Settings& s, double default_hi) {
  if (s.x) return {*s.x};
  const double hi = s.xmax.value_or(default_hi);
  if (s.points < 1) throw InvalidParameter("points must be >= 1");
  if (!(hi > s.xmin)) throw InvalidParameter("xmax must exceed xmin");
  std::vector<double> xs;
  for (int i = 0; i < s.points; ++i)
    xs.push_back(s.points == 1 ? s.xmin : s.xmin + (hi - s.xmin) * i / (s.points - 1.0));
  return xs;
}

int cmd_density(const Settings& s) {
  require_format(s);
  require_alpha(s.alpha);
  const auto support = limitlaw::mp_support(s.alpha);
  const auto xs = grid(s, support.hi + 1.0);
  json config = {{"law", s.law}, {"alpha", s.alpha}, {"format", s.format}};
  if (s.x) config["x"] = *s.x;
  else config.update({{"xmin", s.xmin}, {"xmax", s.xmax.value_or(support.hi + 1.0)}, {"points", s.points}});

  std::vector<double> density, stderr_;
  json extra;
  if (s.law == "mp" || s.law == "perturb" || s.law == "combined") {
    std::optional<limitlaw::DensityModel> model;
    if (s.law == "mp") model = limitlaw::mp_model(s.alpha);
    else if (s.law == "perturb") model = limitlaw::perturb_model(s.alpha);
    else {
      if (!(s.c > 0.0)) throw InvalidParameter("c must be positive");
      config["c"] = s.c;
      model = limitlaw::combined_model(s.alpha, s.c);
    }
    for (double x : xs) density.push_back(model->density(x));
    extra["atom0"] = model->atom0;
  } else if (s.law == "popdyn") {
    const auto p = bernoulli_params(s);
    const auto cfg = popdyn_config(s);
    const double eps = s.epsilon.value_or(bernoulli::default_epsilon(p.c));
    config.update({{"c", s.c}, {"epsilon", eps}, {"pool_size", s.pool_size}, {"sweeps", s.sweeps},
                   {"seed", s.seed}, {"workers", s.workers}});
    const double atom = bernoulli::popdyn_hermitized_atom(p, eps, cfg);
    for (double x : xs) {
      if (!(x > 0.0)) throw InvalidParameter("popdyn densities need x > 0");
      const auto d = bernoulli::popdyn_wishart_density(p, x, eps, cfg, atom);
      density.push_back(d.density);
      stderr_.push_back(d.stderr_);
    }
    extra["atom0"] = bernoulli::wishart_atom_from_hermitized(p.alpha, atom);
    extra["rng"] = kRngAlgorithm;
  } else {
    throw InvalidParameter("unknown law " + s.law + " (mp, perturb, combined, popdyn)");
  }

  json meta = base_meta("density", config);
  meta.update(extra);
  Sink sink(s.out);
  if (s.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      json r = {{"x", xs[i]}, {"density", density[i]}};
      if (!stderr_.empty()) r["stderr"] = stderr_[i];
      rows.push_back(r);
    }
    sink.os() << json{{"metadata", meta}, {"curve", rows}}.dump(2) << '\n';
  } else {
    sink.os() << (stderr_.empty() ? "x,density\n" : "x,density,stderr\n");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sink.os() << num(xs[i]) << ',' << num(density[i]);
      if (!stderr_.empty()) sink.os() << ',' << num(stderr_[i]);
      sink.os() << '\n';
    }
    sink.sidecar(meta);
  }
  return 0;
}

// simulate

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidParameter("cannot write " + path.string());
  f << text;
}

int cmd_simulate(Settings s, const CLI::App& sub) {
  if (s.preset == "figure-1") {
    auto unset = [&sub](const char* name) { return sub.get_option(name)->count() == 0; };
    if (unset("--model")) s.sim_model = "bernoulli";
    if (unset("--alpha")) s.alpha = 2.0;
    if (unset("--c")) s.c = 20.0;
    if (unset("--n")) s.n = 3000;
    if (unset("--trials")) s.trials = 100;
  } else if (!s.preset.empty()) {
    throw InvalidParameter("unknown preset " + s.preset + " (figure-1)");
  }
  if (s.trials < 1) throw InvalidParameter("trials must be >= 1");
  if (s.bins < 1) throw InvalidParameter("bins must be >= 1");
  if (s.kmax < 1) throw InvalidParameter("kmax must be >= 1");

  json config = {{"model", s.sim_model}, {"alpha", s.alpha}, {"n", s.n},           {"trials", s.trials},
                 {"seed", s.seed},   {"bins", s.bins},   {"kmax", s.kmax}};
  if (!s.preset.empty()) config["preset"] = s.preset;
  std::optional<bernoulli::BernoulliParams> bp;
  std::optional<heavytail::HeavyTailParams> hp;
  if (s.sim_model == "bernoulli") {
    bp = bernoulli_params(s);
    if (!(s.c < s.n)) throw InvalidParameter("c must be smaller than n");
    config["c"] = s.c;
    config["centered"] = s.centered;
  } else if (s.sim_model == "heavy") {
    hp = heavy_params(s);
    config["beta"] = s.beta;
    config["B"] = s.B;
  } else {
    throw InvalidParameter("unknown model " + s.sim_model + " (bernoulli, heavy)");
  }
  if (s.n < 2 || s.n > spectra::kMaxDimension)
    throw InvalidParameter("n must lie in [2, " + std::to_string(spectra::kMaxDimension) + "]");

  const fs::path dir = s.out;
  if (!s.out.empty()) fs::create_directories(dir);
  std::vector<double> pooled;
  std::vector<std::vector<double>> trial_moments;
  for (int t = 0; t < s.trials; ++t) {
    const auto seed = spectra::trial_seed(s.seed, static_cast<std::uint64_t>(t));
    const auto sample = bp ? spectra::sample_wishart_bernoulli(s.n, *bp, seed)
                           : spectra::sample_wishart_heavy(s.n, *hp, seed, s.workers);
    if (!s.out.empty()) {
      std::ostringstream name;
      name << "eigenvalues_" << std::setw(4) << std::setfill('0') << t << ".csv";
      spectra::write_sample(sample, dir / name.str());
    }
    trial_moments.push_back(spectra::empirical_moments(sample, s.kmax).moments);
    pooled.insert(pooled.end(), sample.eigenvalues.begin(), sample.eigenvalues.end());
    if (s.trials > 1) std::cerr << "trial " << t + 1 << "/" << s.trials << '\n';
  }

  const auto support = limitlaw::mp_support(s.alpha);
  const auto h = spectra::histogram(pooled, s.bins, 0.0, support.hi + 1.0);
  const auto mp = limitlaw::mp_model(s.alpha);
  std::optional<limitlaw::DensityModel> combined;
  if (bp && bp->c > 0.0 && !bp->centered) combined = limitlaw::combined_model(s.alpha, bp->c);

  std::ostringstream hist;
  hist << "x,empirical,mp" << (combined ? ",combined" : "") << '\n';
  for (std::size_t i = 0; i < h.centers.size(); ++i) {
    hist << num(h.centers[i]) << ',' << num(h.density[i]) << ',' << num(mp.density(h.centers[i]));
    if (combined) hist << ',' << num(combined->density(h.centers[i]));
    hist << '\n';
  }

  std::vector<double> mean(static_cast<std::size_t>(s.kmax), 0.0), se(static_cast<std::size_t>(s.kmax), 0.0);
  for (std::size_t k = 0; k < mean.size(); ++k) {
    for (const auto& tm : trial_moments) mean[k] += tm[k] / s.trials;
    if (s.trials > 1) {
      double ss = 0.0;
      for (const auto& tm : trial_moments) ss += (tm[k] - mean[k]) * (tm[k] - mean[k]);
      se[k] = std::sqrt(ss / (s.trials - 1.0) / s.trials);
    }
  }
  std::ostringstream mom;
  mom << "k,moment,stderr\n";
  for (std::size_t k = 0; k < mean.size(); ++k) mom << k + 1 << ',' << num(mean[k]) << ',' << num(se[k]) << '\n';

  json meta = base_meta("simulate", config);
  meta.update({{"m", spectra::column_count(s.n, s.alpha)},
               {"solver", "Eigen SelfAdjointEigenSolver"},
               {"rng", kRngAlgorithm},
               {"histogram", {{"lo", h.lo}, {"hi", h.hi}, {"bins", s.bins}, {"overflow", h.overflow}}}});
  if (s.out.empty()) {
    json doc = {{"metadata", meta}, {"moments", mean}, {"moment_stderr", se}};
    doc["histogram"] = {{"centers", h.centers}, {"density", h.density}};
    std::cout << doc.dump(2) << '\n';
  } else {
    write_text(dir / "histogram.csv", hist.str());
    write_text(dir / "moments.csv", mom.str());
    write_text(dir / "run.json", meta.dump(2) + "\n");
  }
  return 0;
}

// popdyn

int cmd_popdyn(const Settings& s) {
  const auto p = bernoulli_params(s);
  const auto cfg = popdyn_config(s);
  if (!s.x) throw InvalidParameter("popdyn needs --x");
  if (!(s.eta > 0.0)) throw InvalidParameter("eta must be positive");
  const limitlaw::Complex z(*s.x, s.eta);
  const auto r = bernoulli::popdyn_resolvent(p, z, cfg);
  json config = {{"alpha", s.alpha},   {"c", s.c},         {"x", *s.x},          {"eta", s.eta},
                 {"pool_size", s.pool_size}, {"sweeps", s.sweeps}, {"seed", s.seed}, {"workers", s.workers}};
  json doc = {{"metadata", base_meta("popdyn", config)}, {"hermitized", bernoulli::to_json(r)}};
  if (*s.x != 0.0) {
    // z is a hermitized point t + iη; report the Wishart transform at z²/c.
    const limitlaw::Complex zw = z * z / p.c;
    const auto mw = bernoulli::wishart_stieltjes_from_hermitized(p.alpha, p.c, zw, r.m);
    doc["wishart"] = {{"z_re", zw.real()}, {"z_im", zw.imag()}, {"m_re", mw.real()}, {"m_im", mw.imag()}};
  }
  Sink sink(s.out);
  sink.os() << doc.dump(2) << '\n';
  return 0;
}

// check

int cmd_check(const Settings& s) {
  std::vector<std::string> ids = s.criteria.empty() ? acceptance::suite(s.suite) : s.criteria;
  acceptance::Options options;
  options.workers = s.workers;
  options.cache_dir = cache_dir(s);
  options.progress = &std::cerr;
  bool ok = true;
  json reports = json::array();
  Sink sink(s.out);
  for (const auto& id : ids) {
    const auto r = acceptance::run(id, options);
    ok = ok && r.pass();
    if (s.report == "json") {
      json checks = json::array();
      for (const auto& c : r.checks) checks.push_back({{"label", c.label}, {"pass", c.pass}, {"detail", c.detail}});
      reports.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass()}, {"checks", checks}, {"notes", r.notes}});
    } else {
      acceptance::print(r, sink.os());
      sink.os().flush();
    }
  }
  if (s.report == "json") {
    json config = {{"suite", s.criteria.empty() ? json(s.suite) : json(nullptr)}, {"criteria", ids}};
    sink.os() << json{{"metadata", base_meta("check", config)}, {"pass", ok}, {"criteria", reports}}.dump(2) << '\n';
  }
  return ok ? 0 : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limiting spectral laws of Wishart matrices with size-dependent entries"};
  app.set_version_flag("--version", WISHART_VERSION);
  app.set_config("--config", "", "TOML config file; flags override it");
  app.require_subcommand(1);
  Settings s;

  auto common = [&s](CLI::App* sub) {
    sub->add_option("--out", s.out, "Output path (file, or directory for simulate)");
    sub->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", s.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--cache-dir", s.cache_dir, "Count-table cache directory")->envname("WISHART_CACHE_DIR");
  };
  auto model_params = [&s](CLI::App* sub) {
    sub->add_option("--alpha", s.alpha, "Aspect ratio m/n");
    sub->add_option("--c", s.c, "Mean degree: entries are Bernoulli(c/n)");
    sub->add_option("--beta", s.beta, "Tail exponent in (1, 3)");
    sub->add_option("--B", s.B, "Cutoff scale");
    sub->add_flag("--centered", s.centered, "Centre and standardize Bernoulli entries");
  };
  auto popdyn_params = [&s](CLI::App* sub) {
    sub->add_option("--seed", s.seed, "Random seed");
    sub->add_option("--pool-size", s.pool_size, "Population size");
    sub->add_option("--sweeps", s.sweeps, "Population sweeps");
  };

  auto* enumerate = app.add_subcommand("enumerate", "Count table of tree words of half-length k (JSON)");
  enumerate->add_option("--k", s.k, "Half-length")->required();
  common(enumerate);

  auto* moments = app.add_subcommand("moments", "Limit moments M_1 .. M_kmax");
  moments->add_option("--model", s.model, "mp, bernoulli, heavy or custom-A");
  moments->add_option("--kmax", s.kmax, "Highest moment");
  moments->add_option("--k", s.kmax, "Alias of --kmax");
  moments->add_option("--A", s.A, "custom-A: A_2,A_3,... up to A_(2 kmax)")->delimiter(',');
  model_params(moments);
  common(moments);

  auto* density = app.add_subcommand("density", "Density curve x,density[,stderr]");
  density->add_option("--law", s.law, "mp, perturb, combined or popdyn");
  density->add_option("--x", s.x, "Single point");
  density->add_option("--xmin", s.xmin, "Grid start");
  density->add_option("--xmax", s.xmax, "Grid end (default (1+sqrt(alpha))^2 + 1)");
  density->add_option("--points", s.points, "Grid size");
  density->add_option("--epsilon", s.epsilon, "popdyn regularization (default 0.05 sqrt(c))");
  model_params(density);
  popdyn_params(density);
  common(density);

  auto* simulate = app.add_subcommand("simulate", "Sample spectra: eigenvalue dumps, histogram, moments");
  simulate->add_option("--model", s.sim_model, "bernoulli or heavy");
  simulate->add_option("--preset", s.preset, "figure-1: alpha=2, c=20, n=3000, 100 trials");
  simulate->add_option("--n", s.n, "Rows");
  simulate->add_option("--trials", s.trials, "Independent matrices");
  simulate->add_option("--seed", s.seed, "Random seed");
  simulate->add_option("--bins", s.bins, "Histogram bins on [0, (1+sqrt(alpha))^2 + 1]");
  simulate->add_option("--kmax", s.kmax, "Highest empirical moment");
  model_params(simulate);
  common(simulate);

  auto* popdyn = app.add_subcommand("popdyn", "Population-dynamics resolvent of the hermitized graph at x + i eta");
  popdyn->add_option("--x", s.x, "Real part")->required();
  popdyn->add_option("--eta", s.eta, "Imaginary part");
  popdyn->add_option("--epsilon", s.eta, "Alias of --eta");
  model_params(popdyn);
  popdyn_params(popdyn);
  common(popdyn);

  auto* check = app.add_subcommand("check", "Acceptance suites; exit 5 on failure");
  check->add_option("--suite", s.suite, "oracles, expansion, variance, popdyn, montecarlo or all");
  check->add_option("--criterion", s.criteria, "Run individual criteria (1 .. 10, 4a, 4b, 4b')");
  check->add_option("--format", s.report, "text or json")->check(CLI::IsMember({"text", "json"}));
  check->add_option("--out", s.out, "Report path");
  check->add_option("--workers", s.workers, "Worker threads")->check(CLI::PositiveNumber);
  check->add_option("--cache-dir", s.cache_dir, "Count-table cache directory")->envname("WISHART_CACHE_DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::InvalidParameter);
  }

  try {
    if (*enumerate) return cmd_enumerate(s);
    if (*moments) return cmd_moments(s);
    if (*density) return cmd_density(s);
    if (*simulate) return cmd_simulate(s, *simulate);
    if (*popdyn) return cmd_popdyn(s);
    if (*check) return cmd_check(s);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::Numeric);
  }
  return 0;
}
