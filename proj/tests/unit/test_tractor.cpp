#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "paracurves/curves.hpp"
#include "paracurves/errors.hpp"
#include "paracurves/tractor.hpp"

using namespace paracurves;
using namespace paracurves::tractor;
using curves::Trajectory;

namespace {

std::mt19937 rng(2024);
std::normal_distribution<double> nd;

Vec rvec(int n) { return Vec::NullaryExpr(n, [] { return nd(rng); }); }

Mat rspd(int n) {
  Mat a = Mat::NullaryExpr(n, n, [] { return nd(rng); });
  return a * a.transpose() + n * Mat::Identity(n, n);
}

TractorEndo random_endo(const Mat& g) {
  const int n = static_cast<int>(g.rows());
  Mat k = Mat::NullaryExpr(n, n, [] { return nd(rng); });
  k -= k.transpose().eval();
  return TractorEndo{rvec(n), g.inverse() * k, nd(rng), rvec(n)};
}

Tractor random_tractor(int n) { return Tractor{nd(rng), rvec(n), nd(rng)}; }

Vec unit(const Mat& g, Vec v) { return v / std::sqrt(v.dot(g * v)); }

Vec orth(const Mat& g, const Vec& u, Vec c) { return c - u.dot(g * c) * u; }

// hand-built trajectory samples for an arbitrary curve in flat space
Trajectory sampled(const std::function<curves::CurveState(double)>& f, double length, double h) {
  Trajectory tr;
  tr.metric = "flat";
  const int steps = static_cast<int>(std::round(length / h));
  for (int i = 0; i <= steps; ++i) {
    tr.t.push_back(i * h);
    tr.states.push_back(f(i * h));
  }
  return tr;
}

}  // namespace

TEST(Endo, ZeroAndLambdaOnly) {
  Mat g = rspd(4);
  Tractor t = random_tractor(4);
  Tractor z = endo_apply(TractorEndo::zero(4), g, t);
  EXPECT_EQ(z.sigma, 0.0);
  EXPECT_EQ(z.rho, 0.0);
  EXPECT_EQ(z.mu.norm(), 0.0);
  TractorEndo l = TractorEndo::zero(4);
  l.lambda = 0.7;
  Tractor r = endo_apply(l, g, Tractor{2.0, Vec::Zero(4), 3.0});
  EXPECT_DOUBLE_EQ(r.sigma, -1.4);
  EXPECT_DOUBLE_EQ(r.rho, 2.1);
  EXPECT_EQ(r.mu.norm(), 0.0);
}

TEST(Endo, FormulaComponents) {
  Mat g = rspd(3);
  TractorEndo e = random_endo(g);
  Tractor t = random_tractor(3);
  Tractor r = endo_apply(e, g, t);
  Mat ginv = g.inverse();
  EXPECT_NEAR(r.sigma, e.x.dot(t.mu) - e.lambda * t.sigma, 1e-12);
  Vec mu = e.y * t.sigma + (g * e.f * ginv) * t.mu - (g * e.x) * t.rho;
  EXPECT_LT((r.mu - mu).norm(), 1e-12);
  EXPECT_NEAR(r.rho, e.lambda * t.rho - (ginv * e.y).dot(t.mu), 1e-12);
}

TEST(Endo, PreservesInnerProduct) {
  for (int k = 0; k < 100; ++k) {
    const int n = 3 + k % 4;
    Mat g = rspd(n);
    TractorEndo e = random_endo(g);
    EXPECT_LT(e.skew_defect(g), 1e-12);
    Tractor a = random_tractor(n), b = random_tractor(n);
    double s = inner(g, endo_apply(e, g, a), b) + inner(g, a, endo_apply(e, g, b));
    EXPECT_LT(std::abs(s), 1e-10);
  }
}

TEST(Endo, MatrixRoundTrip) {
  Mat g = rspd(4);
  TractorEndo e = random_endo(g);
  TractorEndo back = endo_from_matrix(endo_matrix(e, g), g);
  EXPECT_LT((back.x - e.x).norm(), 1e-12);
  EXPECT_LT((back.f - e.f).norm(), 1e-12);
  EXPECT_LT((back.y - e.y).norm(), 1e-12);
  EXPECT_NEAR(back.lambda, e.lambda, 1e-12);
}

TEST(Derivative, FlatConstantComponents) {
  ChartMetric m = riemann::flat_metric(3);
  Vec u = unit(Mat::Identity(3, 3), rvec(3));
  Trajectory tr = curves::geodesic_integrate(m, Vec::Zero(3), u, 0.01);
  Tractor t{0.4, rvec(3), -0.3};
  std::vector<Tractor> field(tr.size(), t);
  auto d = tractor_derivative(m, tr, field);
  for (const Tractor& v : d) {
    EXPECT_NEAR(v.sigma, -u.dot(t.mu), 1e-12);
    EXPECT_LT((v.mu - u * t.rho).norm(), 1e-12);
    EXPECT_NEAR(v.rho, 0.0, 1e-12);
  }
}

TEST(Derivative, FlatParallelTractorIsPolynomial) {
  // ∂T = 0 along x = tU: ρ = ρ₀, μ = μ₀ − ρ₀tU, σ = σ₀ + (U·μ₀)t − ρ₀t²/2
  ChartMetric m = riemann::flat_metric(4);
  Vec u = unit(Mat::Identity(4, 4), rvec(4));
  Trajectory tr = curves::geodesic_integrate(m, Vec::Zero(4), u, 0.5, {0.01, false});
  Tractor t0 = random_tractor(4);
  std::vector<Tractor> field;
  for (double t : tr.t)
    field.push_back(Tractor{t0.sigma + u.dot(t0.mu) * t - 0.5 * t0.rho * t * t, t0.mu - t0.rho * t * u, t0.rho});
  for (const Tractor& v : tractor_derivative(m, tr, field)) EXPECT_LT(v.vec().norm(), 1e-12);
  Tractor end = transport_tractor(m, tr, t0);
  EXPECT_LT((end.vec() - field.back().vec()).norm(), 1e-12);
}

TEST(Derivative, FlatLoopHolonomyIsTrivial) {
  ChartMetric m = riemann::flat_metric(3);
  Vec u = Vec::Unit(3, 0), c = 4.0 * Vec::Unit(3, 1);
  Trajectory tr = curves::conformal_circle_integrate(m, Vec::Zero(3), u, c, 2.0 * M_PI / 4.0);
  Tractor t0 = random_tractor(3);
  EXPECT_LT((transport_tractor(m, tr, t0).vec() - t0.vec()).norm(), 1e-9);
}

TEST(Derivative, InnerProductIsParallel) {
  ChartMetric m = riemann::round_sphere(3);
  Vec x0 = 0.2 * rvec(3);
  Trajectory tr = curves::conformal_circle_integrate(m, x0, unit(m.g(x0), rvec(3)), Vec::Zero(3), 0.3, {1e-3, false});
  // linear component fields, so centered differences of the components are exact
  std::vector<Tractor> a, b;
  Tractor a0 = random_tractor(3), a1 = random_tractor(3), b0 = random_tractor(3), b1 = random_tractor(3);
  for (double t : tr.t) {
    a.push_back(Tractor::from_vec(a0.vec() + t * a1.vec()));
    b.push_back(Tractor::from_vec(b0.vec() - 2.0 * t * b1.vec()));
  }
  auto da = tractor_derivative(m, tr, a), db = tractor_derivative(m, tr, b);
  auto ip = [&](std::size_t k) { return inner(m.g(tr.states[k].x), a[k], b[k]); };
  const double h = tr.t[1] - tr.t[0];
  for (std::size_t i = 2; i + 2 < tr.size(); i += 25) {
    double lhs = (ip(i - 2) - 8.0 * ip(i - 1) + 8.0 * ip(i + 1) - ip(i + 2)) / (12.0 * h);
    Mat g = m.g(tr.states[i].x);
    double rhs = inner(g, da[i - 1], b[i]) + inner(g, a[i], db[i - 1]);
    EXPECT_NEAR(lhs, rhs, 1e-8);
  }
}

TEST(Derivative, FlatConstantEndoMatchesBracket) {
  for (int n : {3, 4, 5}) {
    ChartMetric m = riemann::flat_metric(n);
    auto spec = lie::AlgebraSpec::conformal(n);
    Mat g = Mat::Identity(n, n);
    Vec u = unit(g, rvec(n));
    Trajectory tr = curves::geodesic_integrate(m, Vec::Zero(n), u, 0.004);
    TractorEndo phi = random_endo(g);
    auto d = endo_derivative(m, tr, std::vector<TractorEndo>(tr.size(), phi));
    // ∂Φ = [A_U, Φ] with A_U the coupling endomorphism X = −U
    // stencil weights scale like 1/h, so roundoff sits near 1e-12
    TractorEndo a_u{-u, Mat::Zero(n, n), 0.0, Vec::Zero(n)};
    auto expected = lie::bracket(endo_to_algebra(a_u, spec), endo_to_algebra(phi, spec));
    for (const TractorEndo& e : d) EXPECT_LT((endo_to_algebra(e, spec).entries() - expected.entries()).norm(), 1e-10);
  }
}

TEST(SFrame, Dimensions) {
  for (int n = 3; n <= 6; ++n) {
    Mat g = rspd(n);
    Vec u = unit(g, rvec(n));
    SFrame geo = s_frame_geodesic(g, u);
    EXPECT_EQ(geo.dim(), (n - 1) * (n - 2) / 2 + 3);
    EXPECT_EQ(geo.span.cols(), geo.dim());
    EXPECT_LT(geo.constraint_residual(), 1e-10);
    SFrame cir = s_frame_circle(g, u, orth(g, u, rvec(n)));
    EXPECT_EQ(cir.dim(), (n - 1) * (n - 2) / 2 + 3);
    EXPECT_EQ(cir.span.cols(), cir.dim());
    EXPECT_LT(cir.constraint_residual(), 1e-10);
  }
  EXPECT_EQ(s_frame_geodesic(Vec::Unit(3, 0)).dim(), 4);
}

TEST(SFrame, CircleWithZeroAccelerationIsGeodesicFrame) {
  Mat g = rspd(4);
  Vec u = unit(g, rvec(4));
  SFrame a = s_frame_geodesic(g, u), b = s_frame_circle(g, u, Vec::Zero(4));
  for (const TractorEndo& e : b.basis) EXPECT_LT(a.complement_norm(e), 1e-12);
  for (const TractorEndo& e : a.basis) EXPECT_LT(b.complement_norm(e), 1e-12);
}

TEST(SFrame, YConstraintAndConditions) {
  Mat g = rspd(5);
  Vec u = unit(g, rvec(5));
  Vec c = orth(g, u, rvec(5));
  SFrame fr = s_frame_circle(g, u, c);
  for (const TractorEndo& e : fr.basis) {
    auto r = condition_residual(e, g, u, c);
    EXPECT_LT(r.full, 1e-10);
    EXPECT_LT(r.compact, 1e-10);
    // Y_b = hU_b + λC_b + F_bc C^c with h, λ read from the action
    Tractor a = endo_apply(e, g, Tractor{0.0, Vec::Zero(5), 1.0});
    Tractor cc = endo_apply(e, g, Tractor{1.0, -(g * c), 0.0});
    double h = cc.mu.dot(u);
    EXPECT_LT((e.y - h * (g * u) - a.rho * (g * c) - g * e.f * c).norm(), 1e-10);
  }
  EXPECT_THROW(s_frame_circle(g, u, u), PreconditionError);
  EXPECT_THROW(s_frame_geodesic(g, 2.0 * u), PreconditionError);
}

TEST(SFrame, CompactAndFullConditionsAgree) {
  int agree = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = 3 + k % 3;
    Mat g = rspd(n);
    Vec u = unit(g, rvec(n));
    Vec c = (k % 5 == 0) ? Vec(Vec::Zero(n)) : orth(g, u, rvec(n));
    SFrame fr = s_frame_circle(g, u, c);
    TractorEndo e = TractorEndo::zero(n);
    for (const TractorEndo& b : fr.basis) {
      double w = nd(rng);
      e.x += w * b.x, e.f += w * b.f, e.lambda += w * b.lambda, e.y += w * b.y;
    }
    if (k % 2 == 1) {
      TractorEndo p = random_endo(g);
      double eps = (k % 4 == 1) ? 1e-3 : 1.0;
      e.x += eps * p.x, e.f += eps * p.f, e.lambda += eps * p.lambda, e.y += eps * p.y;
    }
    auto r = condition_residual(e, g, u, c);
    bool in_compact = r.compact < 1e-9, in_full = r.full < 1e-9;
    EXPECT_EQ(in_compact, k % 2 == 0);
    if (in_compact == in_full) ++agree;
    // membership in S agrees with both
    EXPECT_EQ(fr.complement_norm(e) < 1e-9, in_full);
  }
  EXPECT_EQ(agree, 50);
}

TEST(Closure, FlatLineAndEinsteinGeodesics) {
  ChartMetric flat = riemann::flat_metric(3);
  Trajectory line = curves::geodesic_integrate(flat, Vec::Zero(3), Vec::Unit(3, 2), 0.2);
  for (double v : closure_defect(flat, line)) EXPECT_LT(v, 1e-12);
  for (const std::string name : {"sphere", "hyperbolic"}) {
    ChartMetric m = riemann::catalog_metric(name, 4);
    Vec x0 = 0.1 * rvec(4);
    Trajectory tr = curves::geodesic_integrate(m, x0, unit(m.g(x0), rvec(4)), 0.3);
    for (double v : closure_defect(m, tr)) EXPECT_LT(v, 1e-6) << name;
    EXPECT_LT(transport_closure_defect(m, tr), 1e-8) << name;
  }
}

TEST(Closure, NonEinsteinMatchesEigencheck) {
  ChartMetric m = riemann::non_einstein_diagonal(4);
  Vec x0 = Vec::Zero(4);
  x0(0) = 1.0;
  Vec u = unit(m.g(x0), Vec::Ones(4));
  Trajectory tr = curves::geodesic_integrate(m, x0, u, 0.2);
  auto d = closure_defect(m, tr);
  for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
    const auto& s = tr.states[i];
    Vec ec = curves::eigencheck(m, s.x, s.u);
    double ecn = std::sqrt(ec.dot(m.g(s.x).inverse() * ec));
    EXPECT_GT(d[i - 1], 1e-3);
    EXPECT_NEAR(d[i - 1], ecn, 1e-5);
  }
  Trajectory longer = curves::geodesic_integrate(m, x0, u, 0.5);
  EXPECT_GT(transport_closure_defect(m, longer), 1e-3);
}

TEST(Appendix, MatchesResidualOnArbitraryCurves) {
  // flat space: a helix-like curve with its true velocity and acceleration
  Trajectory tr = sampled(
      [](double s) {
        const double a = 0.6, b = 0.8, w = 1.3;  // unit speed since a² + b² = 1
        curves::CurveState st;
        st.x = Vec(3);
        st.u = Vec(3);
        st.c = Vec(3);
        st.x << a * std::cos(w * s) / w, a * std::sin(w * s) / w, b * s;
        st.u << -a * std::sin(w * s), a * std::cos(w * s), b;
        st.c << -a * w * std::cos(w * s), -a * w * std::sin(w * s), 0.0;
        return st;
      },
      0.5, 1e-3);
  ChartMetric flat = riemann::flat_metric(3);
  auto ap = appendix_defect(flat, tr);
  auto cc = curves::cc_residual(flat, tr);
  ASSERT_EQ(ap.e.size(), cc.e.size());
  for (std::size_t i = 0; i < ap.e.size(); ++i) EXPECT_LT((ap.e[i] - cc.e[i]).norm(), 1e-6);
  EXPECT_GT(cc.max_norm, 0.1);  // a helix is not a circle
}

TEST(Appendix, ZeroOnCircles) {
  ChartMetric flat = riemann::flat_metric(3);
  Trajectory c1 = curves::conformal_circle_integrate(flat, Vec::Zero(3), Vec::Unit(3, 0), 2.0 * Vec::Unit(3, 1), 0.5);
  EXPECT_LT(appendix_defect(flat, c1).max_norm, 1e-6);
  ChartMetric sphere = riemann::round_sphere(4);
  Vec x0 = Vec::Zero(4);
  x0(0) = 1.0;
  Trajectory eq = curves::geodesic_integrate(sphere, x0, Vec::Unit(4, 1), 0.5);
  // geodesic trajectories carry C = 0
  EXPECT_LT(appendix_defect(sphere, eq).max_norm, 1e-6);
}

TEST(Appendix, WrongAccelerationIsDetected) {
  ChartMetric flat = riemann::flat_metric(3);
  Trajectory tr = curves::conformal_circle_integrate(flat, Vec::Zero(3), Vec::Unit(3, 0), Vec::Unit(3, 1), 0.2);
  std::vector<Vec> good, bad;
  Vec delta = 0.3 * Vec::Unit(3, 2);
  for (const auto& s : tr.states) {
    good.push_back(s.c);
    bad.push_back(s.c + delta);  // stays orthogonal to U in the x1x2-plane
  }
  for (const Vec& v : acceleration_defect(flat, tr, good)) EXPECT_LT(v.norm(), 1e-6);
  for (const Vec& v : acceleration_defect(flat, tr, bad)) EXPECT_LT((v - delta).norm(), 1e-6);
}

TEST(Appendix, NeedsSamples) {
  ChartMetric flat = riemann::flat_metric(3);
  Trajectory tr = curves::geodesic_integrate(flat, Vec::Zero(3), Vec::Unit(3, 0), 1e-3);
  EXPECT_THROW(appendix_defect(flat, tr), PreconditionError);
  EXPECT_THROW(closure_defect(flat, tr), PreconditionError);
}
