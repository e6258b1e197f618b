#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paracurves/linalg.hpp"

namespace paracurves::lie {

using Matrix = Eigen::MatrixXcd;

enum class Family { SO, SL, SU };

std::string_view to_string(Family family);

class AlgebraSpec;
using SpecPtr = std::shared_ptr<const AlgebraSpec>;

/// An (n+2)x(n+2) matrix tagged with the algebra it lives in.
class AlgebraElement {
public:
  AlgebraElement(SpecPtr spec, Matrix entries);

  const Matrix& entries() const noexcept { return entries_; }
  const AlgebraSpec& spec() const noexcept { return *spec_; }
  const SpecPtr& spec_ptr() const noexcept { return spec_; }

  /// Real coordinates [Re(row-major); Im(row-major)].
  Eigen::VectorXd vec() const;

  AlgebraElement operator+(const AlgebraElement& other) const;
  AlgebraElement operator-(const AlgebraElement& other) const;
  AlgebraElement operator*(double s) const;

private:
  SpecPtr spec_;
  Matrix entries_;
};

class Subspace;

/// A matrix realisation of one of so(n+1,1), sl(n+2,R) or su(n+1,1) together with
/// its contact/conformal grading and parabolic subalgebra.
///
/// Rows and columns are ordered (0, 1..n, infinity). The grading element is
/// diag(1, 0, ..., 0, -1), so entry (i, j) has grade w_i - w_j. The parabolic
/// subalgebra is the sum of the non-negative grades.
class AlgebraSpec : public std::enable_shared_from_this<AlgebraSpec> {
public:
  /// so(n+1,1) preserving 2 x0 xinf + |x|^2; basis ordered X (n), F_{ij} (i<j), lambda, Y (n)
  /// so that coordinates in this basis are exactly conformal Killing field parameters.
  static SpecPtr conformal(int n);
  /// sl(n+2, R) in the block form [[a, Z, b], [X, C, W], [d, Y, e]].
  static SpecPtr contact_legendrean(int n);
  /// su(n+1,1) preserving z0 conj(zinf) + zinf conj(z0) + |z|^2.
  static SpecPtr cr(int n);

  Family family() const noexcept { return family_; }
  int n() const noexcept { return n_; }
  int matrix_size() const noexcept { return n_ + 2; }
  int dimension() const noexcept { return static_cast<int>(basis_.size()); }
  /// Depth k of the |k|-grading.
  int depth() const noexcept { return family_ == Family::SO ? 1 : 2; }

  /// (n+2)(n+1)/2 for SO(n+1,1); (n+2)^2 - 1 for SL and SU.
  int classical_dimension() const;

  const std::vector<AlgebraElement>& basis() const noexcept { return basis_; }
  const std::vector<int>& grading() const noexcept { return grading_; }

  /// Residual of the defining relations (J-skewness, trace, reality).
  double defining_residual(const Matrix& m) const;

  /// Grade of a matrix supported in a single graded component; nullopt when mixed.
  std::optional<int> grade_of(const Matrix& m, double tol = 1e-12) const;

  Subspace whole() const;
  Subspace parabolic() const;
  Subspace graded_component(int grade) const;
  /// Direct sum of the graded components with grade strictly above `grade`.
  Subspace grades_above(int grade) const;

  AlgebraElement element(Matrix m) const;
  AlgebraElement from_vec(const Eigen::VectorXd& v) const;
  AlgebraElement zero() const;

  bool same_algebra(const AlgebraSpec& other) const noexcept {
    return family_ == other.family_ && n_ == other.n_;
  }

private:
  AlgebraSpec(Family family, int n) : family_(family), n_(n) {}
  void finalize();

  Family family_;
  int n_;
  std::vector<AlgebraElement> basis_;
  std::vector<int> grading_;
};

/// Span of a linearly independent list of elements, with a cached orthonormal frame
/// in the real coordinates of `AlgebraElement::vec`.
class Subspace {
public:
  /// Throws PreconditionError when `basis` is linearly dependent.
  Subspace(SpecPtr ambient, std::vector<AlgebraElement> basis);

  /// Span of arbitrary (possibly dependent) elements, re-expressed in an orthonormal basis.
  static Subspace span_of(SpecPtr ambient, const std::vector<AlgebraElement>& elements);

  const AlgebraSpec& ambient() const noexcept { return *ambient_; }
  const SpecPtr& ambient_ptr() const noexcept { return ambient_; }
  const std::vector<AlgebraElement>& basis() const noexcept { return basis_; }
  int dim() const noexcept { return static_cast<int>(basis_.size()); }
  const Eigen::MatrixXd& orthonormal() const noexcept { return frame_; }

  /// Basis vectors as columns.
  Eigen::MatrixXd basis_matrix() const;

private:
  SpecPtr ambient_;
  std::vector<AlgebraElement> basis_;
  Eigen::MatrixXd frame_;
};

/// XY - YX. Throws SpecMismatchError when X and Y live in different algebras.
AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

struct Membership {
  bool member = false;
  double residual = 0.0;
  /// Coordinates in the subspace basis; empty unless `member`.
  Eigen::VectorXd coefficients;
};

/// Least-squares projection of X onto span(S). Member iff the residual norm is below tol.
Membership membership(const AlgebraElement& x, const Subspace& s, double tol);

/// Every basis element of `inner` lies in `outer`.
bool contained_in(const Subspace& inner, const Subspace& outer, double tol = 1e-8);

struct Filtration {
  std::vector<Subspace> chain;  ///< p_0 ⊇ p_1 ⊇ ... ⊇ p_stable
  Subspace sym;                 ///< p_infinity + <V>
  int stable_index = 0;         ///< first l with p_{l+1} = p_l
};

/// Decreasing chain p_{l+1} = {X in p_l : [X, V] in p_l + <V>} and the symmetry
/// algebra of the orbit exp(tV).o. Throws DegenerateDirectionError when V lies in p.
Filtration dkr_filtration(const SpecPtr& spec, const AlgebraElement& v);

// -- named generators --------------------------------------------------------

/// Conformal matrix [[lambda, -Y^T, 0], [-X, F, Y], [0, X^T, -lambda]].
Matrix conformal_matrix(const Eigen::VectorXd& x, const Eigen::MatrixXd& f, double lambda,
                        const Eigen::VectorXd& y);

/// Generator of the straight line 2tU: X = U, everything else zero.
AlgebraElement conformal_line_generator(const SpecPtr& spec, const Eigen::VectorXd& u);
/// Generator of the circle with velocity U and acceleration C at the origin.
AlgebraElement conformal_circle_generator(const SpecPtr& spec, const Eigen::VectorXd& u,
                                          const Eigen::VectorXd& c);
/// [[0,0,0],[U,0,0],[0,V^T,0]] with U.V = 1.
AlgebraElement legendrean_generator(const SpecPtr& spec, const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& v);
/// [[0,0,0],[U,0,0],[0,-U^*,0]] with |U| = 1.
AlgebraElement cr_generator(const SpecPtr& spec, const Eigen::VectorXcd& u);

// -- symmetry-algebra read-off ----------------------------------------------

enum class SymModel { ConfLine, ConfCircle, Legendrean, CR };

std::optional<SymModel> parse_sym_model(std::string_view tag);
std::string_view to_string(SymModel model);

struct SymModelData {
  Eigen::VectorXcd u;
  Eigen::VectorXcd v;  ///< Legendrean covector leg
  Eigen::VectorXcd c;  ///< circle acceleration
};

struct SymCheck {
  bool ok = false;
  double max_residual = 0.0;
  std::vector<double> residuals;  ///< one per basis element
};

/// Block-parameter read-off of a single element against the closed-form description
/// of the model symmetry algebra. Returns the residual of the constraints.
double sym_constraint_residual(const AlgebraElement& x, SymModel model, const SymModelData& data);

SymCheck verify_sym_constraints(const Subspace& sym, SymModel model, const SymModelData& data,
                                double tol = 1e-8);

// -- flat-model tangency oracle ---------------------------------------------

/// A curve in flat R^n. Lines and circles pass through the origin and are
/// parameterised as in the flat-model formulae 2tU and 2(tU + t^2 C)/(1 + t^2 |C|^2).
struct FlatCurve {
  enum class Kind { Line, Circle, Sampled };

  Kind kind = Kind::Line;
  int n = 0;
  Eigen::VectorXd u;
  Eigen::VectorXd c;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> tangents;

  static FlatCurve line(const Eigen::VectorXd& u);
  static FlatCurve circle(const Eigen::VectorXd& u, const Eigen::VectorXd& c);
  static FlatCurve sampled(std::vector<Eigen::VectorXd> points, std::vector<Eigen::VectorXd> tangents);

  Eigen::VectorXd point_at(double t) const;
  Eigen::VectorXd tangent_at(double t) const;
};

/// Number of conformal Killing field parameters (X, F, lambda, Y) on R^n.
int killing_parameter_count(int n);

/// The conformal Killing field X - F x + lambda x - (Y.x) x + |x|^2 Y / 2 at x,
/// for a parameter vector ordered like the conformal basis.
Eigen::VectorXd killing_field(int n, const Eigen::VectorXd& params, const Eigen::VectorXd& x);

/// Jacobian of `killing_field` with respect to x.
Eigen::MatrixXd killing_field_jacobian(int n, const Eigen::VectorXd& params, const Eigen::VectorXd& x);

struct TangencyResult {
  int n = 0;
  Eigen::MatrixXd parameters;  ///< columns span the parameter nullspace
  int dim = 0;
  int rows = 0;

  /// Parameter columns read as coordinates in the conformal basis.
  Subspace as_subspace(const SpecPtr& conformal) const;
};

/// Nullspace of the stacked tangency conditions K(gamma(t_i)) ∧ gamma'(t_i) = 0.
/// Throws DegenerateSamplingError when the nullity changes between `samples`
/// and a doubled sampling.
TangencyResult tangency_oracle(const FlatCurve& curve, int samples);

}  // namespace paracurves::lie
