#pragma once

// The acceptance battery: ten desk-scale checks, each independent and deterministic for a seed.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace paracurves::acceptance {

struct Criterion {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  std::map<std::string, double> metrics;
  std::vector<std::string> skip_records;  ///< cases not run, with the reason
};

struct Options {
  std::uint64_t seed = 1;
  /// Legendrean or CR curvature fixture expected to give (pass, λ = 1).
  std::optional<std::string> d7_fixture;
  /// Fixture expected to give (pass, λ = 0).
  std::optional<std::string> homogeneous_fixture;
  bool parallel = true;
};

inline constexpr int kCriterionCount = 10;

/// One criterion; ids are 1..kCriterionCount. Exceptions are caught and reported as failures.
Criterion run_criterion(int id, const Options& opt);

/// Every criterion, ordered by id.
std::vector<Criterion> run_acceptance(const Options& opt);

/// Einstein verdict of a curvature fixture, Legendrean or CR (detected from the sample keys).
struct FixtureVerdict {
  std::string kind;  ///< "legendrean" or "cr"
  bool pass = false;
  double lambda = 0.0;
};
FixtureVerdict fixture_einstein(const std::string& path, double tol);

}  // namespace paracurves::acceptance
