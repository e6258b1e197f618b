#pragma once

#include <Eigen/Dense>

#include <vector>

#include "paracurves/curves.hpp"
#include "paracurves/lie_core.hpp"
#include "paracurves/riemann.hpp"

namespace paracurves::tractor {

using riemann::ChartMetric;
using riemann::Mat;
using riemann::Vec;

/// (σ, μ_b, ρ) in the current scale; μ has lowered chart components.
struct Tractor {
  double sigma = 0.0;
  Vec mu;
  double rho = 0.0;

  static Tractor from_vec(const Vec& v);
  Vec vec() const;  ///< [σ; μ; ρ]
};

/// ⟨T, T̃⟩ = στ̃ + g^{bc}μ_bμ̃_c + ρσ̃.
double inner(const Mat& g, const Tractor& a, const Tractor& b);

/// Adjoint tractor (X^b, F^b_c, λ, Y_b). F is stored with mixed indices; F_bc = g_bd F^d_c is skew.
struct TractorEndo {
  Vec x;
  Mat f;
  double lambda = 0.0;
  Vec y;

  static TractorEndo zero(int n);
  /// max |F_bc + F_cb| with F lowered by g.
  double skew_defect(const Mat& g) const;
};

/// Matrix of Φ acting on [σ; μ; ρ] at a point with metric g.
Mat endo_matrix(const TractorEndo& e, const Mat& g);
/// Inverse of endo_matrix; does not check that the matrix is ⟨,⟩-skew.
TractorEndo endo_from_matrix(const Mat& m, const Mat& g);

/// (X^bμ_b − λσ, Y_bσ + F_b^cμ_c − X_bρ, λρ − Y^bμ_b).
Tractor endo_apply(const TractorEndo& e, const Mat& g, const Tractor& t);

/// Flat-model dictionary: the so(n+1,1) element with the same (X, F, λ, Y).
lie::AlgebraElement endo_to_algebra(const TractorEndo& e, const lie::SpecPtr& spec);

/// Matrix A with ∂T = dT/dt + A T along velocity U at x (Levi-Civita part plus Schouten coupling).
Mat connection_matrix(const ChartMetric& m, const Vec& x, const Vec& u);

/// ∂T at interior samples of a trajectory, for a tractor field given at every sample.
/// Component derivatives use centered differences.
std::vector<Tractor> tractor_derivative(const ChartMetric& m, const curves::Trajectory& traj,
                                        const std::vector<Tractor>& field);

/// ∂Φ at interior samples via the Leibniz rule (∂Φ)(e) = ∂(Φe) − Φ(∂e) on the standard frame.
std::vector<TractorEndo> endo_derivative(const ChartMetric& m, const curves::Trajectory& traj,
                                         const std::vector<TractorEndo>& field);

// -- S-frames -------------------------------------------------------------------

/// Parameters of one element of the model subspace S along a curve.
struct SParams {
  double f = 0.0;
  double h = 0.0;
  double lambda = 0.0;
  Mat fprime;  ///< skew (lowered, orthonormal-frame) part annihilating U; may be empty for zero
};

/// A basis of S at one point: geodesic case (C = 0) or circle case.
struct SFrame {
  Vec u;
  Vec c;
  Mat g;
  std::vector<TractorEndo> basis;
  std::vector<SParams> params;
  Mat span;  ///< orthonormal basis of S in the parameter space used by complement_norm

  int dim() const { return static_cast<int>(basis.size()); }
  /// Max violation of X = fU, F U = −fC, Y = hU + λC + FC over the basis.
  double constraint_residual() const;
  /// Distance (orthonormal-frame parameter norm, pairs of F counted once) of Φ from span S.
  double complement_norm(const TractorEndo& e) const;
};

/// Element of S with the given parameters. F' is given in a g-orthonormal frame.
TractorEndo s_element(const Mat& g, const Vec& u, const Vec& c, const SParams& p);

SFrame s_frame_geodesic(const Mat& g, const Vec& u);
SFrame s_frame_circle(const Mat& g, const Vec& u, const Vec& c);
/// Flat metric conveniences.
SFrame s_frame_geodesic(const Vec& u);
SFrame s_frame_circle(const Vec& u, const Vec& c);

struct ConditionResidual {
  double compact = 0.0;  ///< unstarred conditions only
  double full = 0.0;     ///< all conditions
};

/// Residuals of the three tractor conditions characterising S, with f, λ, h read off Φ.
ConditionResidual condition_residual(const TractorEndo& e, const Mat& g, const Vec& u, const Vec& c);

// -- defects along curves -------------------------------------------------------

/// For each interior sample, max over the S basis of the complement part of ∂Φ.
/// The fields are the basis elements with constant parameters. Throws PreconditionError for
/// trajectories with fewer than three samples.
std::vector<double> closure_defect(const ChartMetric& m, const curves::Trajectory& traj);

/// E_b at interior samples, read from the μ-component of (∂Φ)(0, U_b, 0) for the f-element of the
/// circle frame built from the trajectory's U and C.
curves::ResidualSeries appendix_defect(const ChartMetric& m, const curves::Trajectory& traj);

/// Same propagation with a caller-chosen C field (one vector per sample) in place of the
/// trajectory's acceleration: returns the μ-component of (∂Φ)(0,0,1) for the f-element,
/// which is −(∂U_b − C_b) when f ≡ 1 and λ ≡ 0.
std::vector<Vec> acceleration_defect(const ChartMetric& m, const curves::Trajectory& traj, const std::vector<Vec>& c);

/// Finite transport of a tractor along the trajectory (RK4 on pairs of steps).
Tractor transport_tractor(const ChartMetric& m, const curves::Trajectory& traj, const Tractor& start);

/// Parallel-transport each S basis element from the first sample to the last and return the max
/// complement norm against the final S fibre.
double transport_closure_defect(const ChartMetric& m, const curves::Trajectory& traj);

}  // namespace paracurves::tractor
