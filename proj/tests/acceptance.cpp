#include "wishart/acceptance.hpp"
#include "wishart/parallel.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

// Usage: acceptance [--criterion ID]... [--workers N]
// Prints one PASS/FAIL line per criterion; exits 1 if any fails.
int main(int argc, char** argv) {
  using namespace wishart::acceptance;
  std::vector<std::string> ids;
  Options options;
  options.workers = wishart::default_workers();
  options.progress = &std::cerr;
  if (const char* dir = std::getenv("WISHART_CACHE_DIR")) options.cache_dir = dir;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      ids.push_back(argv[++i]);
    } else if (arg == "--workers" && i + 1 < argc) {
      options.workers = static_cast<unsigned>(std::stoul(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion ID]... [--workers N]\n";
      return 2;
    }
  }
  if (ids.empty()) ids = suite("all");
  bool ok = true;
  std::vector<CriterionReport> reports;
  for (const auto& id : ids) {
    if (!is_criterion(id)) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    reports.push_back(run(id, options));
    print(reports.back(), std::cout);
    std::cout.flush();
    ok = ok && reports.back().pass();
  }
  if (reports.size() > 1) {
    std::cout << "\nsummary\n";
    for (const auto& r : reports) std::cout << "  criterion " << r.id << ": " << (r.pass() ? "PASS" : "FAIL") << '\n';
  }
  return ok ? 0 : 1;
}
