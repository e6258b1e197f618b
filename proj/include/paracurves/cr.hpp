#pragma once

// CR hypersurface-type constraints. Index gymnastics with the Levi form turn a CR sample into
// complex contact Legendrean data, after which the legendrean core does the work.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "paracurves/legendrean.hpp"

namespace paracurves::cr {

using Complex = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

/// Levi form h_{αβ̄} and curvature P_{αβ̄}, A_{αβ}, T_α in the scale of θ. Matrices are indexed
/// [unbarred][barred]. Barred legs are derived by conjugation; the optional stored copies are
/// only compared against that convention by reality_check.
struct Sample {
  int n = 0;
  MatC h;
  MatC p;
  MatC a;
  VecC t;
  std::optional<VecC> t_bar;
  std::optional<MatC> a_bar;

  static Sample zero(int n);
  /// h Hermitian and invertible, P Hermitian, A symmetric (tolerance 1e-12). Throws PreconditionError.
  void validate(double tol = 1e-12) const;
};

/// U^α and V^β̄ with h_{αβ̄}U^αV^β̄ = 1.
struct Direction {
  VecC u;
  VecC v;
};

/// The same sample written as complex Legendrean data: P_α^β = P_{αγ̄}h^{βγ̄},
/// A^{αβ} = h^{αγ̄}h^{βδ̄}A_{γ̄δ̄}, T^α = h^{αβ̄}T_β̄, with V_α = h_{αβ̄}V^β̄ on the second leg.
legendrean::BasicSample<Complex> to_legendrean(const Sample& s);
legendrean::BasicDirection<Complex> to_legendrean(const Sample& s, const Direction& d);

struct Check {
  bool pass = false;
  Complex lambda;
  Complex k;
  double eigen_residual = 0.0;
};

/// U^αT_α + V^ᾱT_ᾱ = 0 and the block eigen-condition with one Λ. Throws NormalizationError.
Check cr_constraint_check(const Sample& s, const Direction& d, double tol = legendrean::kDefaultTol);

struct EinsteinResult {
  bool pass = false;
  double lambda = 0.0;          ///< real part of the common λ
  double lambda_imag = 0.0;     ///< max |Im λ| over samples; nonzero violates reality
  double lambda_variation = 0.0;
  double max_t = 0.0;
  double max_a = 0.0;
  double max_p_deviation = 0.0;  ///< max |P − λh|
};

/// T = 0, A = 0, P = λh with a common real λ.
EinsteinResult cr_einstein_check(const std::vector<Sample>& samples, double tol = legendrean::kDefaultTol);

struct RealityReport {
  double max_residual = 0.0;
  double t_residual = 0.0;  ///< |T_ᾱ − conj T_α| when T_ᾱ is stored
  double a_residual = 0.0;  ///< |A_ᾱβ̄ − conj A_αβ| when A_ᾱβ̄ is stored
  double p_residual = 0.0;  ///< |P − Pᴴ|
  bool barred_stored = false;
  VecC t_bar;  ///< the conjugate legs implied by the storage convention
  MatC a_bar;
};

RealityReport reality_check(const Sample& s);

/// Random admissible direction; with `conjugate` the second leg is conj(U)/(Uᵀh conj U), else a
/// generic complex vector rescaled to the normalisation.
Direction random_direction(const Sample& s, std::mt19937_64& rng, bool conjugate = false);

/// Einstein-versus-all-directions probe through the shared core.
legendrean::BasicProbeResult<Complex> corollary_equivalence_probe(const Sample& s, int trials, std::uint64_t seed,
                                                                  double tol = legendrean::kDefaultTol);

/// Embed real Legendrean data with h = δ. Only data that is real in the CR sense embeds:
/// P symmetric, A_hi = A_lo, T_hi = T_lo; anything else throws PreconditionError.
Sample embed_real(const legendrean::Sample& s);
Direction embed_real(const legendrean::Direction& d);

/// P = λh, A = T = 0 on the given Levi form.
Sample einstein_sample(const MatC& h, double lambda);

struct Fixture {
  int n = 0;
  std::vector<Sample> samples;
  std::string curve_meta;
};

/// {"n": 2, "samples": [{"h": .., "P": .., "A": .., "T": .., "T_bar"?: .., "A_bar"?: ..}],
///  "curve_meta"?: {...}}; complex entries are numbers or [re, im]. "h" defaults to the identity.
Fixture parse_fixture(const std::string& text);
Fixture load_fixture(const std::string& path);

}  // namespace paracurves::cr
