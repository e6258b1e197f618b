#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "paracurves/riemann.hpp"

namespace paracurves::curves {

using riemann::ChartMetric;
using riemann::ConformalFactor;
using riemann::Mat;
using riemann::Vec;

/// Point, velocity and acceleration (all contravariant chart components).
struct CurveState {
  Vec x;
  Vec u;
  Vec c;
};

struct IntegratorStats {
  double step = 0.0;
  int steps = 0;
  double max_speed_drift = 0.0;  ///< max | |U|_g − 1 |
  double max_orth_drift = 0.0;   ///< max |g(U, C)|
};

struct Trajectory {
  std::string metric;
  std::vector<double> t;  ///< arc length
  std::vector<CurveState> states;
  IntegratorStats stats;
  bool truncated = false;
  std::string truncation_reason;

  std::size_t size() const { return states.size(); }
  std::vector<Vec> points() const;
};

struct IntegrateOptions {
  double step = 1e-3;
  bool renormalize = false;  ///< rescale U to unit length after each step
};

/// ẋ = U, ∇_U U = 0 by fixed-step RK4. Leaving the metric's domain truncates the
/// trajectory and sets `truncated`.
Trajectory geodesic_integrate(const ChartMetric& m, const Vec& x0, const Vec& u0, double length,
                              const IntegrateOptions& opt = {});

/// ẋ = U, ∇_U U = C, ∇_U C = P^a_b U^b − (|C|² + P(U,U)) U^a.
Trajectory conformal_circle_integrate(const ChartMetric& m, const Vec& x0, const Vec& u0, const Vec& c0,
                                      double length, const IntegrateOptions& opt = {});

/// Forcing term F(t, state) added to ∇_U C after removing its U component. Along the
/// result the conformal-circle residual E_b equals the lowered forcing.
using Forcing = std::function<Vec(double, const CurveState&)>;
Trajectory forced_curve_integrate(const ChartMetric& m, const Vec& x0, const Vec& u0, const Vec& c0, double length,
                                  const Forcing& forcing, const IntegrateOptions& opt = {});

struct ResidualSeries {
  std::vector<std::size_t> index;  ///< trajectory sample index of each entry
  std::vector<double> t;
  std::vector<Vec> e;              ///< lowered components E_b
  std::vector<double> norm;        ///< g-norm of E
  double max_norm = 0.0;
};

/// E_b = ∂C_b − P_bc U^c + (C^a C_a + P_ac U^a U^c) U_b at interior samples, with ∂C_b
/// by a covariant centered difference. Throws PreconditionError for fewer than 3 samples.
ResidualSeries cc_residual(const ChartMetric& m, const Trajectory& traj);

/// P_ab U^b − P(U,U) U_a (lowered).
Vec eigencheck(const ChartMetric& m, const Vec& x, const Vec& u);

/// Preferred-parameter defect for a curve with velocity U (any parameterisation),
/// C = ∇_U U and dc = ∇_U C:
///   U·dc/|U|² − 3(U·C)²/|U|⁴ + (3/2)|C|²/|U|² + P(U,U).
/// For |U| = 1 this is LHS − RHS of U^a∂C_a = 3(U^aC_a)² − (3/2)C^aC_a − P_abU^aU^b.
double projective_param_defect(const ChartMetric& m, const Vec& x, const Vec& u, const Vec& c, const Vec& dc);

/// The defect along an arc-length trajectory, using a centered difference for ∇_U C.
std::vector<double> projective_param_defect_along(const ChartMetric& m, const Trajectory& traj);

/// Initial data for the same unparameterised curve under Ω²g:
/// Û = Ω⁻¹U and Ĉ_b = C_b − Υ_b + (U^cΥ_c) U_b (indices on the right lowered with g).
CurveState matched_data(const ChartMetric& m, const ConformalFactor& omega, const CurveState& s);

/// Symmetric Hausdorff distance between two polylines (Euclidean chart distance).
double polyline_hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b);

// -- rescale to geodesic --------------------------------------------------------

/// An embedded curve in a flat 2- or 3-dimensional chart, sampled by (point, unit
/// tangent, acceleration). Consecutive samples should be close to arc-length spaced.
struct SampledCurve {
  std::vector<Vec> points;
  std::vector<Vec> tangents;
  std::vector<Vec> accelerations;
  bool closed = false;

  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  /// Circle of the given radius in the x1x2-plane, counter-clockwise, as a closed curve.
  static SampledCurve circle(int n, double radius, int samples);
  /// Straight segment from the origin along `direction`.
  static SampledCurve segment(const Vec& direction, double length, int samples);
};

/// Ω = e^f with ∇f = C along the curve, extended off the curve by a smooth cutoff at
/// 10% of the curve's diameter. Throws PreconditionError for self-intersecting samples or
/// unsupported dimensions.
ConformalFactor rescale_to_geodesic(const SampledCurve& curve);

/// g-norm of (∇ log Ω − C) at each sample.
std::vector<double> log_gradient_mismatch(const SampledCurve& curve, const ConformalFactor& omega);

/// ĝ-norm of the acceleration of the curve under ĝ = Ω² δ at each sample, computed from
/// the Christoffel symbols of ĝ.
std::vector<double> rescaled_acceleration(const SampledCurve& curve, const ConformalFactor& omega);

// -- CSV --------------------------------------------------------------------------

/// Columns t, x1..xn, U1..Un, C1..Cn, normE; normE is blank where no residual exists.
void write_csv(std::ostream& out, const Trajectory& traj, const ResidualSeries& residual);

}  // namespace paracurves::curves
