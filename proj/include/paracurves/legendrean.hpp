#pragma once

// Contact Legendrean curvature constraints along type-(c) contact geodesics, over ingested
// curvature samples. The core is templated on the scalar so the CR module can reuse it with
// complex data.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "paracurves/errors.hpp"

namespace paracurves::legendrean {

template <class S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// Curvature at one point in a chosen exact scale: P_α^β (row α, column β), A_{αβ}, A^{αβ},
/// T_α, T^α.
template <class S>
struct BasicSample {
  int n = 0;
  MatT<S> p;
  MatT<S> a_lo;
  MatT<S> a_hi;
  VecT<S> t_lo;
  VecT<S> t_hi;

  static BasicSample zero(int n) {
    return BasicSample{n, MatT<S>::Zero(n, n), MatT<S>::Zero(n, n), MatT<S>::Zero(n, n), VecT<S>::Zero(n),
                       VecT<S>::Zero(n)};
  }

  /// Shapes and symmetry of A_lo, A_hi; throws PreconditionError.
  void validate(double tol = 1e-12) const {
    if (n < 1) throw PreconditionError("sample rank must be positive");
    if (p.rows() != n || p.cols() != n || a_lo.rows() != n || a_lo.cols() != n || a_hi.rows() != n ||
        a_hi.cols() != n || t_lo.size() != n || t_hi.size() != n)
      throw PreconditionError("sample components have inconsistent sizes");
    if ((a_lo - a_lo.transpose()).cwiseAbs().maxCoeff() > tol) throw PreconditionError("A_lo is not symmetric");
    if ((a_hi - a_hi.transpose()).cwiseAbs().maxCoeff() > tol) throw PreconditionError("A_hi is not symmetric");
  }
};

/// U^α on the E-leg and V_α on the F-leg with U^αV_α = 1.
template <class S>
struct BasicDirection {
  VecT<S> u;
  VecT<S> v;
};

using Sample = BasicSample<double>;
using Direction = BasicDirection<double>;

inline constexpr double kNormalizationTol = 1e-10;
inline constexpr double kDefaultTol = 1e-9;

// Eigen's dot() conjugates its left argument for complex scalars; index contractions here do not.
template <class S>
S contract(const VecT<S>& a, const VecT<S>& b) {
  return (a.transpose() * b)(0, 0);
}

template <class S>
void check_direction(const BasicSample<S>& s, const BasicDirection<S>& d) {
  if (d.u.size() != s.n || d.v.size() != s.n) throw PreconditionError("direction has wrong size");
  if (std::abs(contract<S>(d.u, d.v) - S(1.0)) > kNormalizationTol)
    throw NormalizationError("direction must satisfy U^a V_a = 1");
}

/// Λ = A_{αβ}U^αU^β + P_α^βU^αV_β and K = U^αT_α + V_αT^α.
template <class S>
std::pair<S, S> lambda_k(const BasicSample<S>& s, const BasicDirection<S>& d) {
  S lambda = contract<S>(d.u, s.a_lo * d.u) + contract<S>(d.u, s.p * d.v);
  S k = contract<S>(d.u, s.t_lo) + contract<S>(d.v, s.t_hi);
  return {lambda, k};
}

template <class S>
struct BasicCheck {
  bool pass = false;
  S lambda{};
  S k{};
  VecT<S> top;     ///< P_α^βU^α + A^{αβ}V_α − ΛU^β
  VecT<S> bottom;  ///< A_{αβ}U^α + P_β^αV_α − ΛV_β
  double eigen_residual = 0.0;
  S rayleigh_top{};     ///< V_β (P_α^βU^α + A^{αβ}V_α)
  S rayleigh_bottom{};  ///< U^β (A_{αβ}U^α + P_β^αV_α)
};

using Check = BasicCheck<double>;

/// The block eigen-condition and K = 0 with Λ from lambda_k. Throws NormalizationError.
template <class S>
BasicCheck<S> constraint_check(const BasicSample<S>& s, const BasicDirection<S>& d, double tol = kDefaultTol) {
  s.validate();
  check_direction(s, d);
  BasicCheck<S> out;
  std::tie(out.lambda, out.k) = lambda_k(s, d);
  VecT<S> top = s.p.transpose() * d.u + s.a_hi * d.v;
  VecT<S> bottom = s.a_lo * d.u + s.p * d.v;
  out.rayleigh_top = contract<S>(d.v, top);
  out.rayleigh_bottom = contract<S>(d.u, bottom);
  out.top = top - out.lambda * d.u;
  out.bottom = bottom - out.lambda * d.v;
  out.eigen_residual = std::sqrt(out.top.squaredNorm() + out.bottom.squaredNorm());
  out.pass = std::abs(out.k) < tol && out.eigen_residual < tol;
  return out;
}

template <class S>
struct BasicEinsteinResult {
  bool pass = false;
  S lambda{};                ///< mean of the per-sample trace(P)/n
  double lambda_variation = 0.0;
  double max_t = 0.0;
  double max_a = 0.0;
  double max_p_deviation = 0.0;  ///< max |P − (trP/n)δ| over samples
  int first_failure = -1;        ///< index of the first failing sample
};

using EinsteinResult = BasicEinsteinResult<double>;

/// T = 0, A = 0 and P = λδ at every sample with one λ (λ = trace(P)/n per sample).
template <class S>
BasicEinsteinResult<S> einstein_scale_check(const std::vector<BasicSample<S>>& samples, double tol = kDefaultTol) {
  if (samples.empty()) throw PreconditionError("einstein_scale_check needs at least one sample");
  BasicEinsteinResult<S> out;
  std::vector<S> lambdas;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    s.validate();
    const S lam = s.p.trace() / S(static_cast<double>(s.n));
    lambdas.push_back(lam);
    double t = std::max(s.t_lo.cwiseAbs().maxCoeff(), s.t_hi.cwiseAbs().maxCoeff());
    double a = std::max(s.a_lo.cwiseAbs().maxCoeff(), s.a_hi.cwiseAbs().maxCoeff());
    double p = (s.p - lam * MatT<S>::Identity(s.n, s.n)).cwiseAbs().maxCoeff();
    out.max_t = std::max(out.max_t, t);
    out.max_a = std::max(out.max_a, a);
    out.max_p_deviation = std::max(out.max_p_deviation, p);
    double var = std::abs(lam - lambdas.front());
    for (const S& l : lambdas) var = std::max(var, std::abs(lam - l));
    out.lambda_variation = std::max(out.lambda_variation, var);
    if (out.first_failure < 0 && (t >= tol || a >= tol || p >= tol || out.lambda_variation >= tol))
      out.first_failure = static_cast<int>(i);
  }
  S sum{};
  for (const S& l : lambdas) sum += l;
  out.lambda = sum / S(static_cast<double>(lambdas.size()));
  out.pass = out.first_failure < 0;
  return out;
}

/// First-BGG residual of the constant scale σ = 1 in its own scale: (−A_{αβ}, −A^{αβ}).
template <class S>
std::pair<MatT<S>, MatT<S>> bgg_trivial_scale(const BasicSample<S>& s) {
  s.validate();
  return {-s.a_lo, -s.a_hi};
}

namespace detail {

template <class S>
S normal(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  if constexpr (std::is_same_v<S, double>) {
    return nd(rng);
  } else {
    double re = nd(rng);
    return S(re, nd(rng));
  }
}

}  // namespace detail

/// Random U, V with U^αV_α = 1 (V rescaled; pairs with |U^αV_α| < 0.2 are redrawn).
template <class S>
BasicDirection<S> random_direction(int n, std::mt19937_64& rng) {
  for (;;) {
    VecT<S> u = VecT<S>::NullaryExpr(n, [&] { return detail::normal<S>(rng); });
    VecT<S> v = VecT<S>::NullaryExpr(n, [&] { return detail::normal<S>(rng); });
    S uv = contract<S>(u, v);
    if (std::abs(uv) < 0.2) continue;
    v /= uv;
    return {u, v};
  }
}

template <class S>
struct BasicProbeResult {
  bool consistent = false;     ///< Einstein verdict and directional verdicts agreed on this sample
  bool einstein_pass = false;
  bool witness_found = false;
  int trials_used = 0;
  int witness_trial = -1;      ///< 1-based trial at which the witness appeared
  bool widened = false;        ///< the witness search ran past the requested trial count
  int false_witnesses = 0;     ///< failing directions on data that passes einstein_scale_check
  BasicDirection<S> witness;
};

using ProbeResult = BasicProbeResult<double>;

/// Monte-Carlo check of: constraints hold for every admissible direction ⇔ einstein_scale_check.
/// On failing data the search is widened ×10 before a missing witness is reported as inconsistent.
template <class S>
BasicProbeResult<S> corollary_equivalence_probe(const BasicSample<S>& s, int trials, std::uint64_t seed,
                                                double tol = kDefaultTol) {
  if (trials < 1) throw PreconditionError("trials must be positive");
  BasicProbeResult<S> out;
  out.einstein_pass = einstein_scale_check(std::vector<BasicSample<S>>{s}, tol).pass;
  std::mt19937_64 rng(seed);
  if (out.einstein_pass) {
    for (int i = 0; i < trials; ++i) {
      auto d = random_direction<S>(s.n, rng);
      ++out.trials_used;
      if (!constraint_check(s, d, tol).pass) {
        if (out.false_witnesses++ == 0) out.witness = d;
      }
    }
    out.consistent = out.false_witnesses == 0;
    return out;
  }
  const int limit = 10 * trials;
  for (int i = 0; i < limit; ++i) {
    auto d = random_direction<S>(s.n, rng);
    ++out.trials_used;
    if (!constraint_check(s, d, tol).pass) {
      out.witness_found = true;
      out.witness_trial = i + 1;
      out.witness = d;
      break;
    }
  }
  out.widened = out.trials_used > trials;
  out.consistent = out.witness_found;
  return out;
}

// -- non-template helpers ---------------------------------------------------------

/// One named sample per curvature component switched on in turn, on top of zero data:
/// P_ij for all i, j (diagonal entries break P = λδ when n > 1), A_lo/A_hi symmetric pairs,
/// T_lo_i, T_hi_i.
std::vector<std::pair<std::string, Sample>> single_violation_battery(int n, double magnitude = 1.0);

/// cf_einstein data P = λδ, A = T = 0.
Sample einstein_sample(int n, double lambda);

struct Fixture {
  int n = 0;
  std::vector<Sample> samples;
  std::string curve_meta;  ///< compact JSON text of the optional curve_meta object
};

/// {"n": 2, "samples": [{"P": [[..]], "A_lo": .., "A_hi": .., "T_lo": [..], "T_hi": [..]}],
///  "curve_meta": {...}}. Unknown keys, wrong shapes or asymmetric A throw SchemaError with the
/// offending line.
Fixture parse_fixture(const std::string& text);
Fixture load_fixture(const std::string& path);

}  // namespace paracurves::legendrean
