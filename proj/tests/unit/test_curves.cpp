#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "paracurves/curves.hpp"
#include "paracurves/dual.hpp"
#include "paracurves/errors.hpp"
#include "paracurves/linalg.hpp"

using namespace paracurves;
using namespace paracurves::curves;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Vec flat_circle_point(const Vec& x0, const Vec& u, const Vec& c, double s) {
  double k = c.norm();
  return x0 + std::sin(k * s) / k * u + (1.0 - std::cos(k * s)) / (k * k) * c;
}

}  // namespace

TEST(Integrate, FlatCircleMatchesClosedForm) {
  ChartMetric m = riemann::flat_metric(3);
  Vec x0 = vec({0.1, -0.2, 0.3}), u = vec({0.0, 0.6, 0.8}), c = vec({1.5, 0.0, 0.0});
  Trajectory tr = conformal_circle_integrate(m, x0, u, c, 1.0);
  ASSERT_EQ(tr.size(), 1001u);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    worst = std::max(worst, (tr.states[i].x - flat_circle_point(x0, u, c, tr.t[i])).norm());
  EXPECT_LT(worst, 1e-10);
  EXPECT_LT(tr.stats.max_speed_drift, 1e-10);
  EXPECT_LT(tr.stats.max_orth_drift, 1e-10);
}

TEST(Integrate, FlatLineIsStraight) {
  ChartMetric m = riemann::flat_metric(4);
  Vec x0 = Vec::Zero(4), u = vec({0.5, 0.5, 0.5, 0.5});
  Trajectory tr = conformal_circle_integrate(m, x0, u, Vec::Zero(4), 0.7);
  EXPECT_LT((tr.states.back().x - 0.7 * u).norm(), 1e-12);
  Trajectory geo = geodesic_integrate(m, x0, u, 0.7);
  EXPECT_LT((geo.states.back().x - 0.7 * u).norm(), 1e-12);
}

TEST(Integrate, SphereEquatorCloses) {
  ChartMetric m = riemann::round_sphere(3);
  Vec x0 = vec({1.0, 0.0, 0.0}), u = vec({0.0, 1.0, 0.0});
  Trajectory tr = geodesic_integrate(m, x0, u, 2.0 * M_PI, {1e-3, false});
  EXPECT_LT((tr.states.back().x - x0).norm(), 1e-9);
  for (const auto& s : tr.states) EXPECT_NEAR(s.x.norm(), 1.0, 1e-9);
  // the equator is also a conformal circle with zero acceleration
  Trajectory cc = conformal_circle_integrate(m, x0, u, Vec::Zero(3), 2.0 * M_PI);
  EXPECT_LT((cc.states.back().x - x0).norm(), 1e-9);
  EXPECT_LT(cc.stats.max_speed_drift, 1e-9);
}

TEST(Integrate, HyperbolicDiameter) {
  ChartMetric m = riemann::hyperbolic_ball(3);
  Trajectory tr = geodesic_integrate(m, Vec::Zero(3), vec({0.5, 0.0, 0.0}), 2.0);
  for (std::size_t i = 0; i < tr.size(); i += 50) {
    EXPECT_NEAR(tr.states[i].x(0), std::tanh(tr.t[i] / 2.0), 1e-10);
    EXPECT_NEAR(tr.states[i].x(1), 0.0, 1e-14);
  }
}

TEST(Integrate, DomainExitTruncates) {
  ChartMetric base = riemann::flat_metric(2);
  riemann::Domain dom{Vec::Constant(2, -0.4), Vec::Constant(2, 0.4), [](const Vec& x) { return x.norm() < 0.5; }};
  ChartMetric m("disc", 2, dom, base.evaluators());
  Trajectory tr = geodesic_integrate(m, Vec::Zero(2), vec({1.0, 0.0}), 1.0);
  EXPECT_TRUE(tr.truncated);
  EXPECT_FALSE(tr.truncation_reason.empty());
  EXPECT_LT(tr.states.back().x.norm(), 0.5);
  EXPECT_GT(tr.states.back().x.norm(), 0.49);
}

TEST(Integrate, InitialDataChecked) {
  ChartMetric m = riemann::flat_metric(3);
  EXPECT_THROW(geodesic_integrate(m, Vec::Zero(3), vec({2.0, 0.0, 0.0}), 1.0), PreconditionError);
  EXPECT_THROW(conformal_circle_integrate(m, Vec::Zero(3), vec({1.0, 0.0, 0.0}), vec({1.0, 1.0, 0.0}), 1.0),
               PreconditionError);
  EXPECT_THROW(geodesic_integrate(m, Vec::Zero(2), vec({1.0, 0.0}), 1.0), PreconditionError);
}

TEST(Residual, VanishesOnConformalCircles) {
  for (const std::string name : {"flat", "sphere", "hyperbolic"}) {
    ChartMetric m = riemann::catalog_metric(name, 3);
    double scale = 1.0 / std::sqrt(m.g(Vec::Zero(3))(0, 0));
    Vec u = vec({scale, 0.0, 0.0}), c = vec({0.0, 0.7 * scale, 0.0});
    Trajectory tr = conformal_circle_integrate(m, Vec::Zero(3), u, c, 0.3);
    ResidualSeries r = cc_residual(m, tr);
    EXPECT_EQ(r.norm.size(), tr.size() - 2) << name;
    EXPECT_LT(r.max_norm, 1e-6) << name;
  }
}

TEST(Residual, GeodesicResidualIsMinusEigencheck) {
  ChartMetric m = riemann::non_einstein_diagonal(4);
  Vec x0 = vec({0.3, 0.0, 0.1, 0.0});
  Mat g = m.g(x0);
  Vec u = vec({0.2, 0.5, 0.3, 0.1});
  u /= std::sqrt(u.dot(g * u));
  Trajectory tr = geodesic_integrate(m, x0, u, 0.5);
  ResidualSeries r = cc_residual(m, tr);
  double worst = 0.0, size = 0.0;
  for (std::size_t k = 0; k < r.index.size(); ++k) {
    const CurveState& s = tr.states[r.index[k]];
    Vec ec = eigencheck(m, s.x, s.u);
    worst = std::max(worst, (r.e[k] + ec).norm());
    size = std::max(size, ec.norm());
  }
  EXPECT_LT(worst, 1e-6);
  EXPECT_GT(size, 1e-2);  // the curve is not a conformal circle
  EXPECT_GT(r.max_norm, 1e-2);
}

TEST(Residual, SphereGeodesicsAreCircles) {
  ChartMetric m = riemann::round_sphere(3);
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 5; ++k) {
    Vec x0 = 0.3 * Vec::NullaryExpr(3, [&] { return nd(rng); });
    Vec u = Vec::NullaryExpr(3, [&] { return nd(rng); });
    u /= std::sqrt(u.dot(m.g(x0) * u));
    Trajectory tr = geodesic_integrate(m, x0, u, 1.0);
    EXPECT_LT(cc_residual(m, tr).max_norm, 1e-5);
    EXPECT_LT(eigencheck(m, x0, u).norm(), 1e-10);
  }
}

TEST(Residual, ForcedCurveRecoversForcing) {
  ChartMetric m = riemann::flat_metric(3);
  Vec f = vec({0.0, 0.0, 0.4});
  Forcing forcing = [f](double, const CurveState&) { return f; };
  Vec u = vec({1.0, 0.0, 0.0}), c = vec({0.0, 0.5, 0.0});
  Trajectory tr = forced_curve_integrate(m, Vec::Zero(3), u, c, 0.5, forcing);
  ResidualSeries r = cc_residual(m, tr);
  double worst = 0.0;
  for (std::size_t k = 0; k < r.index.size(); ++k) {
    const Vec& uu = tr.states[r.index[k]].u;
    Vec expected = f - uu.dot(f) * uu;
    worst = std::max(worst, (r.e[k] - expected).norm());
  }
  EXPECT_LT(worst, 1e-6);
  EXPECT_GT(r.max_norm, 0.3);
}

TEST(Residual, NeedsThreeSamples) {
  ChartMetric m = riemann::flat_metric(3);
  Trajectory tr = geodesic_integrate(m, Vec::Zero(3), vec({1.0, 0.0, 0.0}), 1e-3);
  EXPECT_THROW(cc_residual(m, tr), PreconditionError);
}

TEST(ProjectiveDefect, MobiusParameterOfFlatCircle) {
  // x(t) = ((1 − t²)/(1 + t²), 2t/(1 + t²), 0) with derivatives by nested duals
  using D3 = Dual<Dual2>;
  ChartMetric m = riemann::flat_metric(3);
  for (double t0 : {-0.8, -0.1, 0.0, 0.4, 1.3}) {
    D3 t(Dual2(Dual1(t0, 1.0), Dual1(1.0, 0.0)), Dual2(Dual1(1.0, 0.0), Dual1(0.0, 0.0)));
    D3 den = 1.0 + t * t;
    D3 xs[2] = {(1.0 - t * t) / den, 2.0 * t / den};
    Vec x = Vec::Zero(3), u = Vec::Zero(3), c = Vec::Zero(3), dc = Vec::Zero(3);
    for (int i = 0; i < 2; ++i) {
      x(i) = xs[i].v.v.v;
      u(i) = xs[i].d.v.v;
      c(i) = xs[i].d.d.v;
      dc(i) = xs[i].d.d.d;
    }
    EXPECT_NEAR(projective_param_defect(m, x, u, c, dc), 0.0, 1e-12) << t0;
    // arc length: U unit, C = −x, ∇C = −U gives κ²/2
    Vec ua = u.normalized();
    EXPECT_NEAR(projective_param_defect(m, x, ua, -x, -ua), 0.5, 1e-12);
  }
}

TEST(ProjectiveDefect, SphereGeodesicIsHalf) {
  ChartMetric m = riemann::round_sphere(3);
  Vec u = vec({0.0, 0.0, 0.5});
  Trajectory tr = geodesic_integrate(m, Vec::Zero(3), u, 0.5);
  auto d = projective_param_defect_along(m, tr);
  for (double v : d) EXPECT_NEAR(v, 0.5, 1e-8);
}

TEST(MatchedData, FlatCircleMapsToSphereCircle) {
  ChartMetric flat = riemann::flat_metric(3);
  auto omega = riemann::ConformalFactor::inverse_stereographic(3);
  ChartMetric sphere = riemann::conformal_rescale(flat, omega);
  Vec centre = vec({0.2, 0.0, 0.1});
  double r = 0.3;
  Vec x0 = centre + vec({r, 0.0, 0.0}), u = vec({0.0, 1.0, 0.0}), c = vec({-1.0 / r, 0.0, 0.0});
  Trajectory a = conformal_circle_integrate(flat, x0, u, c, 2.0 * M_PI * r);
  // ĝ-length of the same closed loop
  double length = 0.0;
  const int q = 4000;
  for (int i = 0; i < q; ++i) {
    double th = 2.0 * M_PI * (i + 0.5) / q;
    length += omega.value(centre + r * vec({std::cos(th), std::sin(th), 0.0})) * (2.0 * M_PI * r / q);
  }
  CurveState hat = matched_data(flat, omega, CurveState{x0, u, c});
  Mat gh = sphere.g(x0);
  EXPECT_NEAR(hat.u.dot(gh * hat.u), 1.0, 1e-12);
  EXPECT_NEAR(hat.u.dot(gh * hat.c), 0.0, 1e-12);
  Trajectory b = conformal_circle_integrate(sphere, hat.x, hat.u, hat.c, length);
  EXPECT_LT(polyline_hausdorff(a.points(), b.points()), 1e-6);
  EXPECT_LT((b.states.back().x - x0).norm(), 1e-6);
}

TEST(MatchedData, HausdorffBasics) {
  std::vector<Vec> a = {vec({0.0, 0.0}), vec({1.0, 0.0})};
  std::vector<Vec> b = {vec({0.0, 0.5}), vec({1.0, 0.5})};
  EXPECT_NEAR(polyline_hausdorff(a, b), 0.5, 1e-15);
  std::vector<Vec> c = {vec({0.5, 0.0})};
  EXPECT_NEAR(polyline_hausdorff(a, c), 0.5, 1e-15);
  EXPECT_THROW(polyline_hausdorff(a, {}), PreconditionError);
}

TEST(Rescale, UnitCircleBecomesGeodesic) {
  SampledCurve curve = SampledCurve::circle(2, 1.0, 200);
  ConformalFactor omega = rescale_to_geodesic(curve);
  for (double v : log_gradient_mismatch(curve, omega)) EXPECT_LT(v, 1e-6);
  for (double v : rescaled_acceleration(curve, omega)) EXPECT_LT(v, 1e-5);
  // off the tube Ω ≡ 1
  EXPECT_DOUBLE_EQ(omega.value(Vec::Zero(2)), 1.0);
  EXPECT_DOUBLE_EQ(omega.value(vec({1.5, 0.0})), 1.0);
  // independent check: a ĝ-geodesic launched along the circle stays near it
  riemann::Domain dom{Vec::Constant(2, -1.5), Vec::Constant(2, 1.5), {}};
  ChartMetric flat("flat", 2, dom, riemann::flat_metric(2).evaluators());
  ChartMetric hat = riemann::conformal_rescale(flat, omega);
  Vec x0 = vec({1.0, 0.0});
  Vec u0 = vec({0.0, 1.0}) / omega.value(x0);
  Trajectory tr = geodesic_integrate(hat, x0, u0, 1.0, {5e-3, false});
  for (const auto& s : tr.states) EXPECT_NEAR(s.x.norm(), 1.0, 1e-3);
}

TEST(Rescale, CircleInSpace) {
  SampledCurve curve = SampledCurve::circle(3, 0.5, 160);
  ConformalFactor omega = rescale_to_geodesic(curve);
  for (double v : log_gradient_mismatch(curve, omega)) EXPECT_LT(v, 1e-6);
  for (double v : rescaled_acceleration(curve, omega)) EXPECT_LT(v, 1e-5);
}

TEST(Rescale, SegmentGivesTrivialFactor) {
  SampledCurve curve = SampledCurve::segment(vec({1.0, 1.0, 0.0}), 1.0, 20);
  ConformalFactor omega = rescale_to_geodesic(curve);
  for (const Vec& p : curve.points) {
    EXPECT_DOUBLE_EQ(omega.value(p), 1.0);
    EXPECT_LT(omega.upsilon(p).norm(), 1e-15);
  }
}

TEST(Rescale, RejectsBadInput) {
  SampledCurve figure8;
  for (int i = 0; i < 100; ++i) {
    double th = 2.0 * M_PI * i / 100;
    Vec p = vec({std::sin(th), std::sin(th) * std::cos(th)});
    Vec t = vec({std::cos(th), std::cos(2.0 * th)});
    figure8.points.push_back(p);
    figure8.tangents.push_back(t.normalized());
    figure8.accelerations.push_back(Vec::Zero(2));
  }
  figure8.closed = true;
  EXPECT_THROW(rescale_to_geodesic(figure8), PreconditionError);
  EXPECT_THROW(rescale_to_geodesic(SampledCurve::circle(4, 1.0, 50)), PreconditionError);
  SampledCurve bad = SampledCurve::circle(2, 1.0, 50);
  bad.tangents[3] *= 2.0;
  EXPECT_THROW(rescale_to_geodesic(bad), PreconditionError);
}

TEST(Csv, ColumnsAndBlankResidual) {
  ChartMetric m = riemann::flat_metric(3);
  Trajectory tr = conformal_circle_integrate(m, Vec::Zero(3), vec({1.0, 0.0, 0.0}), vec({0.0, 1.0, 0.0}), 3e-3);
  ResidualSeries r = cc_residual(m, tr);
  std::ostringstream os;
  write_csv(os, tr, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,x1,x2,x3,U1,U2,U3,C1,C2,C3,normE");
  std::vector<std::string> rows;
  while (std::getline(is, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows.front().back(), ',');
  EXPECT_EQ(rows.back().back(), ',');
  EXPECT_NE(rows[1].back(), ',');
}

TEST(Stencil, ExactOnQuarticsWithUnevenNodes) {
  std::vector<double> t = {0.0, 0.1, 0.25, 0.3, 0.42, 0.5, 0.61};
  auto f = [](double s) { return 1.0 - 2.0 * s + 3.0 * s * s - s * s * s + 0.5 * s * s * s * s; };
  auto df = [](double s) { return -2.0 + 6.0 * s - 3.0 * s * s + 2.0 * s * s * s; };
  std::vector<Vec> values;
  for (double s : t) values.push_back(vec({f(s)}));
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto st = linalg::derivative_stencil(t, i);
    EXPECT_EQ(st.weights.size(), 5);
    EXPECT_NEAR(st.apply(values)(0), df(t[i]), 1e-11) << i;
  }
  // interior windows are centred
  EXPECT_EQ(linalg::derivative_stencil(t, 3).first, 1u);
  EXPECT_EQ(linalg::derivative_stencil(t, 1).first, 0u);
  EXPECT_EQ(linalg::derivative_stencil(t, 6).first, 2u);
  // three nodes reduce to the classic centred difference
  auto three = linalg::derivative_stencil({0.0, 0.5, 1.0}, 1);
  EXPECT_NEAR(three.weights(0), -1.0, 1e-15);
  EXPECT_NEAR(three.weights(1), 0.0, 1e-15);
  EXPECT_NEAR(three.weights(2), 1.0, 1e-15);
}
