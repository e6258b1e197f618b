#include <CLI11.hpp>

#include <cstdio>

#include "paracurves/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance battery"};
  paracurves::acceptance::Options opt;
  std::string d7, homogeneous;
  app.add_option("--seed", opt.seed, "RNG seed");
  app.add_option("--d7", d7, "fixture expected to give (pass, lambda = 1)");
  app.add_option("--homogeneous", homogeneous, "fixture expected to give (pass, lambda = 0)");
  bool serial = false;
  app.add_flag("--serial", serial, "run criteria one after another");
  CLI11_PARSE(app, argc, argv);
  if (!d7.empty()) opt.d7_fixture = d7;
  if (!homogeneous.empty()) opt.homogeneous_fixture = homogeneous;
  opt.parallel = !serial;

  int failed = 0;
  for (const auto& c : paracurves::acceptance::run_acceptance(opt)) {
    std::printf("criterion %2d: %s  %s: %s\n", c.id, c.pass ? "PASS" : "FAIL", c.title.c_str(), c.detail.c_str());
    failed += c.pass ? 0 : 1;
  }
  std::printf("%d/%d criteria passed\n", paracurves::acceptance::kCriterionCount - failed,
              paracurves::acceptance::kCriterionCount);
  return failed == 0 ? 0 : 1;
}
