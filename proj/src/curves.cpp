#include "paracurves/curves.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>

#include "paracurves/errors.hpp"
#include "paracurves/linalg.hpp"

namespace paracurves::curves {

using riemann::CurvaturePack;

std::vector<Vec> Trajectory::points() const {
  std::vector<Vec> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.x);
  return out;
}

namespace {

constexpr double kUnitTol = 1e-9;

void check_initial(const ChartMetric& m, const Vec& x0, const Vec& u0, const Vec* c0) {
  const int n = m.n();
  if (x0.size() != n || u0.size() != n || (c0 && c0->size() != n))
    throw PreconditionError("initial data has wrong dimension");
  Mat g = m.g(x0);
  double speed = std::sqrt(u0.dot(g * u0));
  if (std::abs(speed - 1.0) > kUnitTol) throw PreconditionError("initial velocity must have unit length");
  if (c0 && std::abs(u0.dot(g * *c0)) > kUnitTol)
    throw PreconditionError("initial acceleration must be orthogonal to the velocity");
}

// y = [x; U; C]
using Rhs = std::function<Vec(double, const Vec&)>;

Trajectory run_rk4(const ChartMetric& m, const Vec& y0, double length, const IntegrateOptions& opt, const Rhs& rhs,
                   bool has_c) {
  if (!(opt.step > 0.0)) throw PreconditionError("integration step must be positive");
  if (!(length >= 0.0)) throw PreconditionError("integration length must be non-negative");
  const int n = m.n();
  Trajectory out;
  out.metric = m.name();
  out.stats.step = opt.step;

  auto record = [&](double t, const Vec& y) {
    CurveState s{y.head(n), y.segment(n, n), has_c ? Vec(y.segment(2 * n, n)) : Vec(Vec::Zero(n))};
    Mat g = m.g(s.x);
    out.stats.max_speed_drift = std::max(out.stats.max_speed_drift, std::abs(std::sqrt(s.u.dot(g * s.u)) - 1.0));
    out.stats.max_orth_drift = std::max(out.stats.max_orth_drift, std::abs(s.u.dot(g * s.c)));
    out.t.push_back(t);
    out.states.push_back(std::move(s));
  };

  Vec y = y0;
  record(0.0, y);
  const int steps = static_cast<int>(std::ceil(length / opt.step - 1e-9));
  for (int k = 0; k < steps; ++k) {
    const double t = k * opt.step;
    const double h = std::min(opt.step, length - t);
    try {
      Vec k1 = rhs(t, y);
      Vec k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
      Vec k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
      Vec k4 = rhs(t + h, y + h * k3);
      Vec next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!next.allFinite()) throw NumericalBreakdown("integrator produced non-finite values");
      if (!m.domain().contains(next.head(n))) throw DomainError("trajectory left the metric domain");
      if (opt.renormalize) {
        Mat g = m.g(next.head(n));
        Vec u = next.segment(n, n);
        next.segment(n, n) = u / std::sqrt(u.dot(g * u));
      }
      y = next;
      record(t + h, y);
      ++out.stats.steps;
    } catch (const DomainError& e) {
      out.truncated = true;
      out.truncation_reason = e.what();
      break;
    }
  }
  return out;
}

Vec orthogonal_part(const Mat& g, const Vec& f, const Vec& u) { return f - u.dot(g * f) * u; }

Trajectory circle_like(const ChartMetric& m, const Vec& x0, const Vec& u0, const Vec& c0, double length,
                       const Forcing* forcing, const IntegrateOptions& opt) {
  check_initial(m, x0, u0, &c0);
  const int n = m.n();
  Vec y0(3 * n);
  y0 << x0, u0, c0;
  Rhs rhs = [&m, n, forcing](double t, const Vec& y) {
    Vec x = y.head(n), u = y.segment(n, n), c = y.segment(2 * n, n);
    CurvaturePack p = riemann::curvature(m, x);
    Vec pu = p.schouten * u;              // P_ab U^b
    double puu = u.dot(pu);
    double cc = c.dot(p.g * c);
    Vec dc = p.ginv * pu - (cc + puu) * u;  // ∇_U C
    if (forcing) dc += orthogonal_part(p.g, (*forcing)(t, CurveState{x, u, c}), u);
    Vec out(3 * n);
    out << u, c - riemann::contract_gamma(p.gamma, u, u), dc - riemann::contract_gamma(p.gamma, u, c);
    return out;
  };
  return run_rk4(m, y0, length, opt, rhs, true);
}

}  // namespace

Trajectory geodesic_integrate(const ChartMetric& m, const Vec& x0, const Vec& u0, double length,
                              const IntegrateOptions& opt) {
  check_initial(m, x0, u0, nullptr);
  const int n = m.n();
  Vec y0(2 * n);
  y0 << x0, u0;
  Rhs rhs = [&m, n](double, const Vec& y) {
    Vec x = y.head(n), u = y.segment(n, n);
    auto gamma = riemann::christoffel(m, x);
    Vec out(2 * n);
    out << u, -riemann::contract_gamma(gamma, u, u);
    return out;
  };
  return run_rk4(m, y0, length, opt, rhs, false);
}

Trajectory conformal_circle_integrate(const ChartMetric& m, const Vec& x0, const Vec& u0, const Vec& c0,
                                      double length, const IntegrateOptions& opt) {
  return circle_like(m, x0, u0, c0, length, nullptr, opt);
}

Trajectory forced_curve_integrate(const ChartMetric& m, const Vec& x0, const Vec& u0, const Vec& c0, double length,
                                  const Forcing& forcing, const IntegrateOptions& opt) {
  return circle_like(m, x0, u0, c0, length, &forcing, opt);
}

ResidualSeries cc_residual(const ChartMetric& m, const Trajectory& traj) {
  const std::size_t count = traj.size();
  if (count < 3) throw PreconditionError("cc_residual needs at least three samples");
  ResidualSeries out;
  std::vector<Vec> c_low(count);
  for (std::size_t i = 0; i < count; ++i) c_low[i] = m.g(traj.states[i].x) * traj.states[i].c;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const CurveState& s = traj.states[i];
    CurvaturePack p = riemann::curvature(m, s.x);
    Vec dcl = linalg::derivative_stencil(traj.t, i).apply(c_low);
    // ∂C_b = d/dt C_b − Γ^c_ab U^a C_c
    for (std::size_t c = 0; c < p.gamma.size(); ++c) dcl -= c_low[i](static_cast<Eigen::Index>(c)) * (p.gamma[c] * s.u);
    Vec u_low = p.g * s.u;
    Vec pu = p.schouten * s.u;
    double e_coef = s.c.dot(c_low[i]) + s.u.dot(pu);
    Vec e = dcl - pu + e_coef * u_low;
    double norm = std::sqrt(std::max(0.0, e.dot(p.ginv * e)));
    out.index.push_back(i);
    out.t.push_back(traj.t[i]);
    out.e.push_back(e);
    out.norm.push_back(norm);
    out.max_norm = std::max(out.max_norm, norm);
  }
  return out;
}

Vec eigencheck(const ChartMetric& m, const Vec& x, const Vec& u) {
  CurvaturePack p = riemann::curvature(m, x);
  Vec pu = p.schouten * u;
  return pu - u.dot(pu) * (p.g * u);
}

double projective_param_defect(const ChartMetric& m, const Vec& x, const Vec& u, const Vec& c, const Vec& dc) {
  CurvaturePack p = riemann::curvature(m, x);
  const Mat& g = p.g;
  double uu = u.dot(g * u);
  if (!(uu > 0.0)) throw PreconditionError("velocity must be non-zero");
  double uc = u.dot(g * c);
  return u.dot(g * dc) / uu - 3.0 * uc * uc / (uu * uu) + 1.5 * c.dot(g * c) / uu + u.dot(p.schouten * u);
}

std::vector<double> projective_param_defect_along(const ChartMetric& m, const Trajectory& traj) {
  if (traj.size() < 3) throw PreconditionError("projective_param_defect_along needs at least three samples");
  std::vector<Vec> cs;
  for (const auto& s : traj.states) cs.push_back(s.c);
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const CurveState& s = traj.states[i];
    auto gamma = riemann::christoffel(m, s.x);
    Vec dc = linalg::derivative_stencil(traj.t, i).apply(cs) + riemann::contract_gamma(gamma, s.u, s.c);
    out.push_back(projective_param_defect(m, s.x, s.u, s.c, dc));
  }
  return out;
}

CurveState matched_data(const ChartMetric& m, const ConformalFactor& omega, const CurveState& s) {
  Mat g = m.g(s.x);
  double w = omega.value(s.x);
  if (!(w > 0.0)) throw DomainError("conformal factor is not positive");
  Vec ups = omega.upsilon(s.x);
  Vec u_low = g * s.u;
  Vec c_hat_low = g * s.c - ups + s.u.dot(ups) * u_low;
  CurveState out;
  out.x = s.x;
  out.u = s.u / w;
  out.c = g.ldlt().solve(c_hat_low) / (w * w);
  return out;
}

namespace {

double point_segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  Vec ab = b - a;
  double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

double directed_hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  double worst = 0.0;
  for (const Vec& p : a) {
    double best = std::numeric_limits<double>::infinity();
    if (b.size() == 1) best = (p - b[0]).norm();
    for (std::size_t i = 0; i + 1 < b.size(); ++i) best = std::min(best, point_segment_distance(p, b[i], b[i + 1]));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double polyline_hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.empty() || b.empty()) throw PreconditionError("polyline_hausdorff needs non-empty polylines");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

// -- rescale to geodesic --------------------------------------------------------

SampledCurve SampledCurve::circle(int n, double radius, int samples) {
  if (n < 2 || samples < 8 || !(radius > 0.0)) throw PreconditionError("bad circle sampling request");
  SampledCurve out;
  out.closed = true;
  for (int i = 0; i < samples; ++i) {
    double th = 2.0 * M_PI * i / samples;
    Vec p = Vec::Zero(n), t = Vec::Zero(n), c = Vec::Zero(n);
    p(0) = radius * std::cos(th);
    p(1) = radius * std::sin(th);
    t(0) = -std::sin(th);
    t(1) = std::cos(th);
    c(0) = -std::cos(th) / radius;
    c(1) = -std::sin(th) / radius;
    out.points.push_back(p);
    out.tangents.push_back(t);
    out.accelerations.push_back(c);
  }
  return out;
}

SampledCurve SampledCurve::segment(const Vec& direction, double length, int samples) {
  if (samples < 2 || !(length > 0.0)) throw PreconditionError("bad segment sampling request");
  Vec u = direction.normalized();
  SampledCurve out;
  for (int i = 0; i < samples; ++i) {
    out.points.push_back(u * (length * i / (samples - 1)));
    out.tangents.push_back(u);
    out.accelerations.push_back(Vec::Zero(u.size()));
  }
  return out;
}

namespace {

double segment_segment_distance(const Vec& p1, const Vec& q1, const Vec& p2, const Vec& q2) {
  Vec d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
  double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 0.0 && e <= 0.0) return r.norm();
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      double b = d1.dot(d2), denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + s * d1) - (p2 + t * d2)).norm();
}

// Piecewise cubic Hermite interpolation of the samples; acceleration interpolated linearly.
struct Tube {
  std::vector<Vec> p, tan, acc;
  std::vector<double> h;  // chord length of each segment
  bool closed = false;
  int n = 0;
  double radius = 0.0;

  int segments() const { return static_cast<int>(closed ? p.size() : p.size() - 1); }
  std::size_t next(std::size_t i) const { return (i + 1) % p.size(); }

  template <class T>
  void eval(int k, const T& u, std::vector<T>& pos, std::vector<T>& du, std::vector<T>& ddu,
            std::vector<T>& acc_out) const {
    const std::size_t a = static_cast<std::size_t>(k), b = next(a);
    const double hk = h[a];
    T u2 = u * u, u3 = u2 * u;
    T h00 = 2.0 * u3 - 3.0 * u2 + 1.0, h10 = u3 - 2.0 * u2 + u, h01 = -2.0 * u3 + 3.0 * u2, h11 = u3 - u2;
    T d00 = 6.0 * u2 - 6.0 * u, d10 = 3.0 * u2 - 4.0 * u + 1.0, d01 = -6.0 * u2 + 6.0 * u, d11 = 3.0 * u2 - 2.0 * u;
    T s00 = 12.0 * u - 6.0, s10 = 6.0 * u - 4.0, s01 = -12.0 * u + 6.0, s11 = 6.0 * u - 2.0;
    for (int i = 0; i < n; ++i) {
      const double pa = p[a](i), pb = p[b](i), ma = hk * tan[a](i), mb = hk * tan[b](i);
      pos[static_cast<std::size_t>(i)] = h00 * pa + h10 * ma + h01 * pb + h11 * mb;
      du[static_cast<std::size_t>(i)] = d00 * pa + d10 * ma + d01 * pb + d11 * mb;
      ddu[static_cast<std::size_t>(i)] = s00 * pa + s10 * ma + s01 * pb + s11 * mb;
      acc_out[static_cast<std::size_t>(i)] = (1.0 - u) * acc[a](i) + u * acc[b](i);
    }
  }

  // Closest point in double precision: returns (segment, local parameter, clamped?).
  struct Foot {
    int segment;
    double u;
    bool clamped;
    double dist2;
  };

  Foot closest(const std::vector<double>& x) const {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
      double d = 0.0;
      for (int j = 0; j < n; ++j) d += (x[static_cast<std::size_t>(j)] - p[i](j)) * (x[static_cast<std::size_t>(j)] - p[i](j));
      if (d < best) best = d, nearest = i;
    }
    std::vector<int> candidates;
    const int segs = segments();
    const int ni = static_cast<int>(nearest);
    if (closed) {
      candidates = {(ni - 1 + segs) % segs, ni % segs};
    } else {
      if (ni > 0) candidates.push_back(ni - 1);
      if (ni < segs) candidates.push_back(ni);
    }
    Foot out{candidates.front(), 0.0, true, std::numeric_limits<double>::infinity()};
    std::vector<double> pos(static_cast<std::size_t>(n)), du(pos), ddu(pos), ac(pos);
    for (int k : candidates) {
      double u = (static_cast<std::size_t>(k) == nearest) ? 0.0 : 1.0;
      bool clamped = false;
      for (int it = 0; it < 30; ++it) {
        eval(k, u, pos, du, ddu, ac);
        double g1 = 0.0, g2 = 0.0;
        for (int j = 0; j < n; ++j) {
          double r = x[static_cast<std::size_t>(j)] - pos[static_cast<std::size_t>(j)];
          g1 -= r * du[static_cast<std::size_t>(j)];
          g2 += du[static_cast<std::size_t>(j)] * du[static_cast<std::size_t>(j)] - r * ddu[static_cast<std::size_t>(j)];
        }
        double step = g2 > 0.0 ? g1 / g2 : 0.0;
        double next_u = u - step;
        clamped = false;
        if (next_u < 0.0) next_u = 0.0, clamped = true;
        if (next_u > 1.0) next_u = 1.0, clamped = true;
        bool done = std::abs(next_u - u) < 1e-15;
        u = next_u;
        if (done) break;
      }
      eval(k, u, pos, du, ddu, ac);
      double d = 0.0;
      for (int j = 0; j < n; ++j)
        d += (x[static_cast<std::size_t>(j)] - pos[static_cast<std::size_t>(j)]) *
             (x[static_cast<std::size_t>(j)] - pos[static_cast<std::size_t>(j)]);
      if (d < out.dist2) out = Foot{k, u, clamped, d};
    }
    return out;
  }

  template <class T>
  static T psi(const T& z) {
    using std::exp;
    if (value_of(z) <= 0.0) return T(0.0);
    return exp(-1.0 / z);
  }

  // χ(q) = 1 for q ≤ 1/4, 0 for q ≥ 1, smooth in between.
  template <class T>
  static T cutoff(const T& q) {
    if (value_of(q) <= 0.25) return T(1.0);
    if (value_of(q) >= 1.0) return T(0.0);
    T a = psi(T(1.0) - q), b = psi(q - 0.25);
    return a / (a + b);
  }

  template <class T>
  T f(const std::vector<T>& x) const {
    std::vector<double> xd(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xd[i] = value_of(x[i]);
    Foot foot = closest(xd);
    if (foot.dist2 >= radius * radius) return T(0.0);
    std::vector<T> pos(static_cast<std::size_t>(n)), du(pos), ddu(pos), ac(pos);
    T u = T(foot.u);
    if (!foot.clamped) {
      // Newton steps in T starting from the converged foot give exact derivatives of u(x).
      for (int it = 0; it < 3; ++it) {
        eval(foot.segment, u, pos, du, ddu, ac);
        T g1 = T(0.0), g2 = T(0.0);
        for (int j = 0; j < n; ++j) {
          T r = x[static_cast<std::size_t>(j)] - pos[static_cast<std::size_t>(j)];
          g1 -= r * du[static_cast<std::size_t>(j)];
          g2 += du[static_cast<std::size_t>(j)] * du[static_cast<std::size_t>(j)] - r * ddu[static_cast<std::size_t>(j)];
        }
        u = u - g1 / g2;
      }
    }
    eval(foot.segment, u, pos, du, ddu, ac);
    T d2 = T(0.0), lin = T(0.0);
    for (int j = 0; j < n; ++j) {
      T r = x[static_cast<std::size_t>(j)] - pos[static_cast<std::size_t>(j)];
      d2 += r * r;
      lin += ac[static_cast<std::size_t>(j)] * r;
    }
    return cutoff(d2 / (radius * radius)) * lin;
  }
};

void validate(const SampledCurve& curve) {
  const std::size_t count = curve.points.size();
  if (count < 2) throw PreconditionError("sampled curve needs at least two samples");
  if (curve.tangents.size() != count || curve.accelerations.size() != count)
    throw PreconditionError("sampled curve has mismatched point, tangent and acceleration counts");
  const int n = curve.dim();
  if (n != 2 && n != 3) throw PreconditionError("rescale_to_geodesic supports 2- and 3-dimensional charts");
  for (std::size_t i = 0; i < count; ++i) {
    if (curve.points[i].size() != n || curve.tangents[i].size() != n || curve.accelerations[i].size() != n)
      throw PreconditionError("sampled curve has inconsistent dimensions");
    if (std::abs(curve.tangents[i].norm() - 1.0) > 1e-6) throw PreconditionError("tangents must have unit length");
  }
}

double diameter_of(const std::vector<Vec>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

void check_embedded(const SampledCurve& curve, double diameter) {
  const std::size_t count = curve.points.size();
  const std::size_t segs = curve.closed ? count : count - 1;
  const double tol = 1e-9 * diameter;
  for (std::size_t i = 0; i < segs; ++i) {
    const Vec& a0 = curve.points[i];
    const Vec& a1 = curve.points[(i + 1) % count];
    if ((a1 - a0).norm() <= tol) throw PreconditionError("sampled curve repeats a point");
    for (std::size_t j = i + 2; j < segs; ++j) {
      if (curve.closed && i == 0 && j == segs - 1) continue;  // adjacent through the closing segment
      const Vec& b0 = curve.points[j];
      const Vec& b1 = curve.points[(j + 1) % count];
      if (segment_segment_distance(a0, a1, b0, b1) <= tol)
        throw PreconditionError("sampled curve is self-intersecting");
    }
  }
}

}  // namespace

ConformalFactor rescale_to_geodesic(const SampledCurve& curve) {
  validate(curve);
  const double diameter = diameter_of(curve.points);
  if (!(diameter > 0.0)) throw PreconditionError("sampled curve is degenerate");
  check_embedded(curve, diameter);

  auto tube = std::make_shared<Tube>();
  tube->p = curve.points;
  tube->tan = curve.tangents;
  tube->acc = curve.accelerations;
  tube->closed = curve.closed;
  tube->n = curve.dim();
  tube->radius = 0.1 * diameter;
  const int segs = tube->segments();
  for (int k = 0; k < segs; ++k)
    tube->h.push_back((tube->p[tube->next(static_cast<std::size_t>(k))] - tube->p[static_cast<std::size_t>(k)]).norm());
  if (!curve.closed) tube->h.push_back(tube->h.back());

  return ConformalFactor("geodesic_rescale", tube->n, riemann::make_scalar_evaluators([tube](const auto& x) {
                           using std::exp;
                           return exp(tube->f(x));
                         }));
}

std::vector<double> log_gradient_mismatch(const SampledCurve& curve, const ConformalFactor& omega) {
  std::vector<double> out;
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    out.push_back((omega.upsilon(curve.points[i]) - curve.accelerations[i]).norm());
  return out;
}

std::vector<double> rescaled_acceleration(const SampledCurve& curve, const ConformalFactor& omega) {
  validate(curve);
  const int n = curve.dim();
  // the flat chart is valid everywhere; the box only matters for the positivity lattice
  Vec lo = curve.points.front(), hi = curve.points.front();
  for (const Vec& p : curve.points) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
  riemann::Domain dom{lo.array() - 0.5, hi.array() + 0.5, {}};
  ChartMetric flat("flat", n, dom, riemann::flat_metric(n).evaluators());
  ChartMetric hat = riemann::conformal_rescale(flat, omega);
  std::vector<double> out;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const Vec& x = curve.points[i];
    const Vec& u = curve.tangents[i];
    const Vec& c = curve.accelerations[i];
    double w = omega.value(x);
    Vec grad_w = w * omega.upsilon(x);
    auto gamma = riemann::christoffel(hat, x);
    // Û = U/Ω is ĝ-unit and d/dŝ = Ω⁻¹ d/ds
    Vec chat = (c / w - u * grad_w.dot(u) / (w * w)) / w + riemann::contract_gamma(gamma, u, u) / (w * w);
    out.push_back(w * chat.norm());
  }
  return out;
}

// -- CSV --------------------------------------------------------------------------

void write_csv(std::ostream& out, const Trajectory& traj, const ResidualSeries& residual) {
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().x.size());
  out << "t";
  for (const char* name : {"x", "U", "C"})
    for (int i = 1; i <= n; ++i) out << ',' << name << i;
  out << ",normE\n";
  std::vector<double> norms(traj.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < residual.index.size(); ++k)
    if (residual.index[k] < norms.size()) norms[residual.index[k]] = residual.norm[k];
  out << std::setprecision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const CurveState& s = traj.states[i];
    out << traj.t[i];
    for (const Vec* v : {&s.x, &s.u, &s.c})
      for (int j = 0; j < n; ++j) out << ',' << (*v)(j);
    out << ',';
    if (!std::isnan(norms[i])) out << norms[i];
    out << '\n';
  }
}

}  // namespace paracurves::curves
