#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "paracurves/dual.hpp"

namespace paracurves::riemann {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Row-major n*n metric components as a function of chart coordinates.
template <class T>
using MetricFn = std::function<std::vector<T>(const std::vector<T>&)>;

template <class T>
using ScalarFn = std::function<T(const std::vector<T>&)>;

struct MetricEvaluators {
  MetricFn<double> plain;
  MetricFn<Dual1> first;
  MetricFn<Dual2> second;
};

struct ScalarEvaluators {
  ScalarFn<double> plain;
  ScalarFn<Dual1> first;
  ScalarFn<Dual2> second;
};

/// Instantiate a generic lambda `f(const std::vector<T>& x) -> std::vector<T>` for all three scalars.
template <class F>
MetricEvaluators make_metric_evaluators(F f) {
  return {[f](const std::vector<double>& x) { return f(x); }, [f](const std::vector<Dual1>& x) { return f(x); },
          [f](const std::vector<Dual2>& x) { return f(x); }};
}

template <class F>
ScalarEvaluators make_scalar_evaluators(F f) {
  return {[f](const std::vector<double>& x) { return f(x); }, [f](const std::vector<Dual1>& x) { return f(x); },
          [f](const std::vector<Dual2>& x) { return f(x); }};
}

enum class Differentiation { DualNumbers, FiniteDifference };

/// Sampling box plus an optional validity predicate for points outside it.
struct Domain {
  Vec lo;
  Vec hi;
  std::function<bool(const Vec&)> valid;  ///< empty = everywhere valid

  bool in_box(const Vec& x) const;
  bool contains(const Vec& x) const;
  /// Deterministic lattice of 3^n points (at most `cap`) covering the box.
  std::vector<Vec> lattice(int cap = 729) const;
};

/// g, its first partials dg[a](i,j) = d_a g_ij and second partials ddg[a*n+b].
struct MetricJet {
  Mat g;
  std::vector<Mat> dg;
  std::vector<Mat> ddg;
};

class ChartMetric {
public:
  ChartMetric(std::string name, int n, Domain domain, MetricEvaluators ev);

  const std::string& name() const noexcept { return name_; }
  int n() const noexcept { return n_; }
  const Domain& domain() const noexcept { return domain_; }
  Differentiation differentiation() const noexcept { return mode_; }
  double fd_step_first() const noexcept { return h1_; }
  double fd_step_second() const noexcept { return h2_; }

  /// Copy using a different differentiation mode.
  ChartMetric with_differentiation(Differentiation mode, double h1 = 1e-5, double h2 = 1e-4) const;

  /// Metric components; throws DomainError outside the domain and SingularMetricError
  /// when g is not symmetric positive definite.
  Mat g(const Vec& x) const;
  MetricJet jet(const Vec& x, int order) const;

  const MetricEvaluators& evaluators() const noexcept { return *ev_; }

private:
  void check_point(const Vec& x) const;
  void check_metric(const Mat& g) const;

  std::string name_;
  int n_;
  Domain domain_;
  std::shared_ptr<const MetricEvaluators> ev_;
  Differentiation mode_ = Differentiation::DualNumbers;
  double h1_ = 1e-5;
  double h2_ = 1e-4;
};

/// Dense rank-4 tensor with all indices down.
struct Tensor4 {
  int n = 0;
  std::vector<double> data;

  Tensor4() = default;
  explicit Tensor4(int dim) : n(dim), data(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}
  double& operator()(int a, int b, int c, int d) { return data[((a * n + b) * n + c) * n + d]; }
  double operator()(int a, int b, int c, int d) const { return data[((a * n + b) * n + c) * n + d]; }
  double max_abs() const;
};

/// Curvature at one point. R_abcd is defined by (∇_a∇_b − ∇_b∇_a)X^c = R_ab^c_d X^d with
/// c lowered; then Ric_bd = g^ac R_abcd, J = Scal / (2(n−1)) and
/// R_abcd = W_abcd + P_ac g_bd − P_bc g_ad − P_ad g_bc + P_bd g_ac.
struct CurvaturePack {
  int n = 0;
  Vec x;
  Mat g;
  Mat ginv;
  std::vector<Mat> gamma;  ///< gamma[a](b, c) = Γ^a_bc
  Tensor4 riemann;
  Mat ricci;
  double scalar = 0.0;
  double J = 0.0;
  Mat schouten;
  Tensor4 weyl;

  /// P_a^b as a matrix acting on covectors from the right: (ginv * P) acts on vectors.
  Mat schouten_endomorphism() const { return ginv * schouten; }
};

std::vector<Mat> christoffel(const ChartMetric& m, const Vec& x);
/// Christoffel symbols from a first-order jet.
std::vector<Mat> christoffel(const MetricJet& jet, const Mat& ginv);
CurvaturePack curvature(const ChartMetric& m, const Vec& x);

/// Γ^a_bc u^b v^c.
Vec contract_gamma(const std::vector<Mat>& gamma, const Vec& u, const Vec& v);

struct EinsteinReport {
  bool is_einstein = false;
  double lambda = 0.0;
  double max_deviation = 0.0;     ///< max over samples of |P_a^b − (tr/n) δ|
  double lambda_variation = 0.0;  ///< max − min of tr/n over samples
};

/// Requires at least five sample points.
EinsteinReport einstein_check(const ChartMetric& m, const std::vector<Vec>& samples, double tol = 1e-7);

// -- conformal rescaling ------------------------------------------------------

class ConformalFactor {
public:
  ConformalFactor(std::string name, int n, ScalarEvaluators ev);

  /// Ω ≡ c.
  static ConformalFactor constant(int n, double c);
  /// Ω = exp(c + b.x + x^T A x / 2).
  static ConformalFactor exp_quadratic(double c, const Vec& b, const Mat& a);
  /// Ω = c + b.x + x^T A x / 2 (positivity checked at use).
  static ConformalFactor quadratic(double c, const Vec& b, const Mat& a);
  /// Ω = 2 / (1 + |x|^2), the stereographic sphere factor.
  static ConformalFactor inverse_stereographic(int n);

  const std::string& name() const noexcept { return name_; }
  int n() const noexcept { return n_; }
  const ScalarEvaluators& evaluators() const noexcept { return *ev_; }

  double value(const Vec& x) const;
  /// Υ_a = ∂_a log Ω.
  Vec upsilon(const Vec& x) const;
  /// ∂_a ∂_b log Ω.
  Mat log_hessian(const Vec& x) const;

private:
  std::string name_;
  int n_;
  std::shared_ptr<const ScalarEvaluators> ev_;
};

/// ĝ = Ω² g on the same domain. Throws DomainError if Ω ≤ 0 on the domain lattice.
ChartMetric conformal_rescale(const ChartMetric& m, const ConformalFactor& omega);

/// P − ∇Υ + ΥΥ − ½|Υ|² g, with ∇ the Levi-Civita connection of g.
Mat rescaled_schouten_law(const ChartMetric& m, const ConformalFactor& omega, const Vec& x);

/// Max abs difference between the Schouten tensor of Ω²g and the transformation law.
double schouten_rescale_residual(const ChartMetric& m, const ConformalFactor& omega, const Vec& x);

/// A covector field with its Jacobian J(a, b) = ∂_a φ_b.
struct OneFormField {
  std::function<Vec(const Vec&)> value;
  std::function<Mat(const Vec&)> jacobian;

  /// φ_b(x) = c_b + A(b, a) x^a.
  static OneFormField affine(const Vec& c, const Mat& a);
};

/// ∇_a φ_b = ∂_a φ_b − Γ^c_ab φ_c.
Mat covariant_derivative(const std::vector<Mat>& gamma, const OneFormField& phi, const Vec& x);

/// max |∇̂φ − (∇φ − Υ_aφ_b − Υ_bφ_a + Υ^cφ_c g_ab)| at x.
double connection_rescale_check(const ChartMetric& m, const ConformalFactor& omega, const OneFormField& phi,
                                const Vec& x);

// -- catalog ------------------------------------------------------------------

ChartMetric flat_metric(int n);
/// 4/(1+|x|²)² δ: the unit round sphere in stereographic coordinates.
ChartMetric round_sphere(int n);
/// 4/(1−|x|²)² δ on the unit ball.
ChartMetric hyperbolic_ball(int n);
/// Fubini–Study metric of CP² in the affine chart (x1, y1, x2, y2), z_j = x_j + i y_j.
ChartMetric fubini_study_cp2();
/// diag(1, 1 + x1², 1, ..., 1); Einstein fails wherever x1 is finite.
ChartMetric non_einstein_diagonal(int n = 4);

/// Polynomial metric from JSON:
/// {"n": 3, "domain": {"lo": [...], "hi": [...]},
///  "components": [{"i": 0, "j": 0, "terms": [{"coef": 1.0, "powers": [0, 2, 0]}]}, ...]}
/// Missing components are zero; (i, j) also sets (j, i). Throws SchemaError.
ChartMetric polynomial_metric_from_json(const std::string& text);

/// Catalog lookup by name ("flat", "sphere", "hyperbolic", "fubini_study", "non_einstein").
ChartMetric catalog_metric(const std::string& name, int n);
std::vector<std::string> catalog_names();

}  // namespace paracurves::riemann
