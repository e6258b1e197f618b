#include <gtest/gtest.h>

#include <random>

#include "paracurves/errors.hpp"
#include "paracurves/lie_core.hpp"

using namespace paracurves;
using namespace paracurves::lie;

namespace {

std::vector<SpecPtr> small_specs() {
  return {AlgebraSpec::conformal(2), AlgebraSpec::conformal(3), AlgebraSpec::conformal(4),
          AlgebraSpec::contact_legendrean(2), AlgebraSpec::contact_legendrean(3), AlgebraSpec::cr(2),
          AlgebraSpec::cr(3)};
}

AlgebraElement random_element(const SpecPtr& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m = Matrix::Zero(spec->matrix_size(), spec->matrix_size());
  for (const auto& b : spec->basis()) m += g(rng) * b.entries();
  return spec->element(m);
}

Eigen::VectorXd unit_random(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u(i) = g(rng);
  return u.normalized();
}

}  // namespace

TEST(AlgebraSpec, DimensionsMatchClassicalFormula) {
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(AlgebraSpec::conformal(n)->dimension(), (n + 2) * (n + 1) / 2);
    EXPECT_EQ(AlgebraSpec::contact_legendrean(n)->dimension(), (n + 2) * (n + 2) - 1);
    EXPECT_EQ(AlgebraSpec::cr(n)->dimension(), (n + 2) * (n + 2) - 1);
  }
}

TEST(AlgebraSpec, BasisSatisfiesDefiningRelationsAndIsIndependent) {
  for (const auto& spec : small_specs()) {
    for (const auto& b : spec->basis()) EXPECT_LT(spec->defining_residual(b.entries()), 1e-12);
    EXPECT_EQ(spec->whole().dim(), spec->dimension());
  }
}

TEST(AlgebraSpec, BracketClosesOnBasis) {
  for (const auto& spec : small_specs()) {
    Subspace g = spec->whole();
    double worst = 0.0;
    for (const auto& x : spec->basis())
      for (const auto& y : spec->basis()) {
        AlgebraElement z = bracket(x, y);
        // independent oracle: least-squares against the raw basis columns
        Eigen::MatrixXd cols = g.basis_matrix();
        Eigen::VectorXd coef = cols.colPivHouseholderQr().solve(z.vec());
        worst = std::max(worst, (cols * coef - z.vec()).norm());
      }
    EXPECT_LT(worst, 1e-10) << to_string(spec->family()) << " n=" << spec->n();
  }
}

TEST(AlgebraSpec, ParabolicIsNonNegativeGrades) {
  for (const auto& spec : small_specs()) {
    int expected = 0;
    for (int g : spec->grading()) {
      EXPECT_LE(std::abs(g), spec->depth());
      if (g >= 0) ++expected;
    }
    EXPECT_EQ(spec->parabolic().dim(), expected);
    // p is a subalgebra
    Subspace p = spec->parabolic();
    for (const auto& x : p.basis())
      for (const auto& y : p.basis()) EXPECT_TRUE(membership(bracket(x, y), p, 1e-10).member);
  }
}

TEST(AlgebraSpec, GradingIsAdditiveUnderBracket) {
  auto spec = AlgebraSpec::contact_legendrean(2);
  const auto& b = spec->basis();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      AlgebraElement z = bracket(b[i], b[j]);
      if (z.entries().norm() < 1e-14) continue;
      auto g = spec->grade_of(z.entries());
      ASSERT_TRUE(g.has_value());
      EXPECT_EQ(*g, spec->grading()[i] + spec->grading()[j]);
    }
}

TEST(Bracket, AntisymmetricAndJacobi) {
  std::mt19937_64 rng(7);
  for (const auto& spec : small_specs()) {
    AlgebraElement x = random_element(spec, rng);
    EXPECT_LT(bracket(x, x).entries().norm(), 1e-14);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      AlgebraElement a = random_element(spec, rng), b = random_element(spec, rng), c = random_element(spec, rng);
      AlgebraElement j = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
      worst = std::max(worst, j.entries().norm());
      EXPECT_LT(spec->defining_residual(bracket(a, b).entries()), 1e-10);
    }
    EXPECT_LT(worst, 1e-9);
  }
}

TEST(Bracket, MismatchedSpecsThrow) {
  auto a = AlgebraSpec::conformal(3)->basis()[0];
  auto b = AlgebraSpec::contact_legendrean(1)->basis()[0];
  EXPECT_THROW(bracket(a, b), SpecMismatchError);
  auto c = AlgebraSpec::conformal(4)->basis()[0];
  EXPECT_THROW(bracket(a, c), SpecMismatchError);
}

TEST(Membership, Examples) {
  auto spec = AlgebraSpec::conformal(3);
  const auto& b = spec->basis();
  Subspace s(spec, {b[0], b[3]});
  auto m = membership(b[0], s, 1e-10);
  EXPECT_TRUE(m.member);
  ASSERT_EQ(m.coefficients.size(), 2);
  EXPECT_NEAR(m.coefficients(0), 1.0, 1e-12);
  EXPECT_NEAR(m.coefficients(1), 0.0, 1e-12);

  Subspace empty(spec, {});
  EXPECT_FALSE(membership(b[1], empty, 1e-6).member);
  EXPECT_TRUE(membership(spec->zero(), empty, 1e-6).member);

  // X + 1e-3 Y against span{X}: residual is 1e-3 |Y_perp|
  AlgebraElement x = b[0], y = b[1] + b[0] * 0.5;
  Subspace line(spec, {x});
  auto r = membership(x + y * 1e-3, line, 1e-6);
  EXPECT_FALSE(r.member);
  Eigen::VectorXd xv = x.vec(), yv = y.vec();
  Eigen::VectorXd yperp = yv - xv * (xv.dot(yv) / xv.squaredNorm());
  EXPECT_NEAR(r.residual, 1e-3 * yperp.norm(), 1e-12);
}

TEST(Subspace, RejectsDependentBasisButSpanOfAccepts) {
  auto spec = AlgebraSpec::conformal(3);
  const auto& b = spec->basis();
  EXPECT_THROW(Subspace(spec, {b[0], b[0] * 2.0}), PreconditionError);
  EXPECT_EQ(Subspace::span_of(spec, {b[0], b[0] * 2.0, b[1]}).dim(), 2);
}

TEST(Dictionary, MatrixBracketIsKillingFieldBracket) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int n = 2; n <= 5; ++n) {
    auto spec = AlgebraSpec::conformal(n);
    const int d = killing_parameter_count(n);
    ASSERT_EQ(d, spec->dimension());
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd p(d), q(d), x(n);
      for (int i = 0; i < d; ++i) p(i) = g(rng), q(i) = g(rng);
      for (int i = 0; i < n; ++i) x(i) = g(rng);
      auto from_params = [&](const Eigen::VectorXd& c) {
        Matrix m = Matrix::Zero(n + 2, n + 2);
        for (int i = 0; i < d; ++i) m += c(i) * spec->basis()[i].entries();
        return spec->element(m);
      };
      auto coeffs = membership(bracket(from_params(p), from_params(q)), spec->whole(), 1e-9);
      ASSERT_TRUE(coeffs.member);
      Eigen::VectorXd lhs = killing_field(n, coeffs.coefficients, x);
      // vector field commutator [K_p, K_q] = DK_q K_p - DK_p K_q
      Eigen::VectorXd rhs = killing_field_jacobian(n, q, x) * killing_field(n, p, x) -
                            killing_field_jacobian(n, p, x) * killing_field(n, q, x);
      EXPECT_LT((lhs - rhs).norm(), 1e-9 * (1.0 + rhs.norm()));
    }
  }
}

TEST(Dictionary, KillingJacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const int n = 4, d = killing_parameter_count(n);
  Eigen::VectorXd p(d), x(n);
  for (int i = 0; i < d; ++i) p(i) = g(rng);
  for (int i = 0; i < n; ++i) x(i) = g(rng);
  Eigen::MatrixXd jac = killing_field_jacobian(n, p, x);
  const double h = 1e-6;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j) * h;
    Eigen::VectorXd fd = (killing_field(n, p, x + e) - killing_field(n, p, x - e)) / (2 * h);
    EXPECT_LT((fd - jac.col(j)).norm(), 1e-6);
  }
}

TEST(Dkr, ConformalLineAndCircleDimensions) {
  std::mt19937_64 rng(5);
  for (int n = 3; n <= 6; ++n) {
    auto spec = AlgebraSpec::conformal(n);
    const int expected = (n - 1) * (n - 2) / 2 + 3;
    Eigen::VectorXd u = unit_random(n, rng);
    auto line = dkr_filtration(spec, conformal_line_generator(spec, u));
    EXPECT_EQ(line.sym.dim(), expected) << "n=" << n;
    EXPECT_EQ(line.stable_index, 2);
    EXPECT_EQ(spec->dimension() - line.sym.dim(), 3 * (n - 1));

    Eigen::VectorXd c = unit_random(n, rng);
    c = 1.7 * (c - c.dot(u) * u).normalized();
    auto circle = dkr_filtration(spec, conformal_circle_generator(spec, u, c));
    EXPECT_EQ(circle.sym.dim(), expected) << "n=" << n;
    SymModelData data{u.cast<std::complex<double>>(), {}, c.cast<std::complex<double>>()};
    EXPECT_TRUE(verify_sym_constraints(line.sym, SymModel::ConfLine, data).ok);
    EXPECT_TRUE(verify_sym_constraints(circle.sym, SymModel::ConfCircle, data).ok);
  }
}

TEST(Dkr, LegendreanDimensionsAndStabilisation) {
  std::mt19937_64 rng(9);
  for (int n = 2; n <= 5; ++n) {
    auto spec = AlgebraSpec::contact_legendrean(n);
    Eigen::VectorXd u = unit_random(n, rng), v = unit_random(n, rng);
    v /= u.dot(v);
    auto f = dkr_filtration(spec, legendrean_generator(spec, u, v));
    EXPECT_EQ(f.sym.dim(), n * n - 2 * n + 4) << "n=" << n;
    EXPECT_EQ(f.stable_index, 3);
    EXPECT_EQ(spec->dimension() - f.sym.dim(), 6 * n - 1);
    SymModelData data{u.cast<std::complex<double>>(), v.cast<std::complex<double>>(), {}};
    EXPECT_TRUE(verify_sym_constraints(f.sym, SymModel::Legendrean, data).ok);
  }
}

TEST(Dkr, CrModuliDimension) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int n = 2; n <= 4; ++n) {
    auto spec = AlgebraSpec::cr(n);
    Eigen::VectorXcd u(n);
    for (int i = 0; i < n; ++i) u(i) = {g(rng), g(rng)};
    u.normalize();
    auto f = dkr_filtration(spec, cr_generator(spec, u));
    EXPECT_EQ(spec->dimension() - f.sym.dim(), 6 * n - 1) << "n=" << n;
    EXPECT_EQ(f.sym.dim(), n * n - 2 * n + 4);
    EXPECT_EQ(f.stable_index, 3);
    SymModelData data{u, {}, {}};
    EXPECT_TRUE(verify_sym_constraints(f.sym, SymModel::CR, data).ok);
  }
}

TEST(Dkr, ChainIsDecreasingAndNested) {
  std::mt19937_64 rng(17);
  auto spec = AlgebraSpec::contact_legendrean(3);
  Eigen::VectorXd u = unit_random(3, rng), v = unit_random(3, rng);
  v /= u.dot(v);
  auto f = dkr_filtration(spec, legendrean_generator(spec, u, v));
  for (std::size_t l = 1; l < f.chain.size(); ++l) {
    EXPECT_LT(f.chain[l].dim(), f.chain[l - 1].dim());
    EXPECT_TRUE(contained_in(f.chain[l], f.chain[l - 1]));
  }
}

TEST(Dkr, GradeObservationForGradeMinusOneGenerators) {
  // For V of grade -1, passing from p_l to p_{l+1} only constrains the grade-l part.
  std::mt19937_64 rng(19);
  std::vector<std::pair<SpecPtr, AlgebraElement>> cases;
  {
    auto s = AlgebraSpec::conformal(4);
    cases.emplace_back(s, conformal_line_generator(s, unit_random(4, rng)));
  }
  {
    auto s = AlgebraSpec::contact_legendrean(3);
    Eigen::VectorXd u = unit_random(3, rng), v = unit_random(3, rng);
    cases.emplace_back(s, legendrean_generator(s, u, v / u.dot(v)));
  }
  for (auto& [spec, v] : cases) {
    auto f = dkr_filtration(spec, v);
    for (std::size_t l = 0; l + 1 < f.chain.size(); ++l) {
      Subspace above = spec->grades_above(static_cast<int>(l));
      Eigen::MatrixXd a = linalg::intersect(f.chain[l].orthonormal(), above.orthonormal());
      Eigen::MatrixXd b = linalg::intersect(f.chain[l + 1].orthonormal(), above.orthonormal());
      EXPECT_EQ(a.cols(), b.cols()) << "l=" << l;
    }
  }
}

TEST(Dkr, GeneratorInParabolicThrows) {
  auto spec = AlgebraSpec::conformal(3);
  EXPECT_THROW(dkr_filtration(spec, spec->parabolic().basis()[0]), DegenerateDirectionError);
  EXPECT_THROW(dkr_filtration(spec, spec->zero()), DegenerateDirectionError);
}

TEST(SymConstraints, InjectedViolationFails) {
  auto spec = AlgebraSpec::conformal(4);
  Eigen::VectorXd u = Eigen::VectorXd::Unit(4, 0);
  auto f = dkr_filtration(spec, conformal_line_generator(spec, u));
  std::vector<AlgebraElement> basis = f.sym.basis();
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(4, 4);
  bad(0, 1) = 1.0;
  bad(1, 0) = -1.0;  // F U != 0
  basis.push_back(spec->element(conformal_matrix(Eigen::VectorXd::Zero(4), bad, 0.0, Eigen::VectorXd::Zero(4))));
  Subspace s(spec, basis);
  SymModelData data{u.cast<std::complex<double>>(), {}, {}};
  EXPECT_FALSE(verify_sym_constraints(s, SymModel::ConfLine, data).ok);
}

TEST(SymConstraints, ModelTagMustMatchFamily) {
  auto spec = AlgebraSpec::conformal(3);
  SymModelData data{Eigen::VectorXcd::Unit(3, 0), {}, {}};
  EXPECT_THROW(sym_constraint_residual(spec->basis()[0], SymModel::Legendrean, data), SpecMismatchError);
  EXPECT_FALSE(parse_sym_model("conformal").has_value());
  EXPECT_EQ(parse_sym_model("cr"), SymModel::CR);
}

TEST(Tangency, LineAndCircleMatchDkr) {
  std::mt19937_64 rng(23);
  for (int n = 3; n <= 4; ++n) {
    auto spec = AlgebraSpec::conformal(n);
    const int expected = (n - 1) * (n - 2) / 2 + 3;
    Eigen::VectorXd u = unit_random(n, rng);
    Eigen::VectorXd c = unit_random(n, rng);
    c = (c - c.dot(u) * u).normalized() * 0.8;

    auto line = tangency_oracle(FlatCurve::line(u), 40);
    EXPECT_EQ(line.dim, expected);
    auto line_dkr = dkr_filtration(spec, conformal_line_generator(spec, u));
    Subspace line_sub = line.as_subspace(spec);
    EXPECT_TRUE(contained_in(line_sub, line_dkr.sym));
    EXPECT_TRUE(contained_in(line_dkr.sym, line_sub));
    SymModelData data{u.cast<std::complex<double>>(), {}, c.cast<std::complex<double>>()};
    EXPECT_TRUE(verify_sym_constraints(line_sub, SymModel::ConfLine, data).ok);

    auto circle = tangency_oracle(FlatCurve::circle(u, c), 40);
    EXPECT_EQ(circle.dim, expected);
    auto circle_dkr = dkr_filtration(spec, conformal_circle_generator(spec, u, c));
    Subspace circle_sub = circle.as_subspace(spec);
    EXPECT_TRUE(contained_in(circle_sub, circle_dkr.sym));
    EXPECT_TRUE(contained_in(circle_dkr.sym, circle_sub));
    EXPECT_TRUE(verify_sym_constraints(circle_sub, SymModel::ConfCircle, data).ok);
  }
}

TEST(Tangency, LineAlongE1InR3) {
  auto r = tangency_oracle(FlatCurve::line(Eigen::Vector3d::UnitX()), 20);
  EXPECT_EQ(r.dim, 4);
}

TEST(Tangency, GenericCubicHasNoSymmetry) {
  std::vector<Eigen::VectorXd> pts, tans;
  for (int i = 0; i < 60; ++i) {
    double t = -1.0 + 2.0 * i / 59.0;
    Eigen::Vector3d p(t + 0.3 * t * t, 0.5 * t * t - 0.2 * t * t * t, 0.7 * t * t * t + 0.1 * t);
    Eigen::Vector3d d(1.0 + 0.6 * t, t - 0.6 * t * t, 2.1 * t * t + 0.1);
    pts.push_back(p);
    tans.push_back(d);
  }
  auto r = tangency_oracle(FlatCurve::sampled(pts, tans), 60);
  EXPECT_EQ(r.dim, 0);
}

TEST(Tangency, TooFewSamplesRejected) {
  EXPECT_THROW(tangency_oracle(FlatCurve::line(Eigen::Vector3d::UnitX()), 5), PreconditionError);
  EXPECT_THROW(FlatCurve::line(Eigen::Vector3d(1, 1, 0)), PreconditionError);
  EXPECT_THROW(FlatCurve::circle(Eigen::Vector3d::UnitX(), Eigen::Vector3d(1, 1, 0)), PreconditionError);
}
