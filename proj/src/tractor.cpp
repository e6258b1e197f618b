#include "paracurves/tractor.hpp"

#include <algorithm>
#include <cmath>

#include "paracurves/errors.hpp"
#include "paracurves/linalg.hpp"

namespace paracurves::tractor {

Tractor Tractor::from_vec(const Vec& v) {
  const Eigen::Index n = v.size() - 2;
  return Tractor{v(0), v.segment(1, n), v(n + 1)};
}

Vec Tractor::vec() const {
  Vec out(mu.size() + 2);
  out << sigma, mu, rho;
  return out;
}

double inner(const Mat& g, const Tractor& a, const Tractor& b) {
  return a.sigma * b.rho + a.mu.dot(g.ldlt().solve(b.mu)) + a.rho * b.sigma;
}

TractorEndo TractorEndo::zero(int n) { return TractorEndo{Vec::Zero(n), Mat::Zero(n, n), 0.0, Vec::Zero(n)}; }

double TractorEndo::skew_defect(const Mat& g) const {
  Mat low = g * f;
  return (low + low.transpose()).cwiseAbs().maxCoeff();
}

Mat endo_matrix(const TractorEndo& e, const Mat& g) {
  const Eigen::Index n = e.x.size();
  Mat ginv = g.inverse();
  Mat m = Mat::Zero(n + 2, n + 2);
  m(0, 0) = -e.lambda;
  m.block(0, 1, 1, n) = e.x.transpose();
  m.block(1, 0, n, 1) = e.y;
  m.block(1, 1, n, n) = g * e.f * ginv;  // F_b^c
  m.block(1, n + 1, n, 1) = -(g * e.x);
  m.block(n + 1, 1, 1, n) = -(ginv * e.y).transpose();
  m(n + 1, n + 1) = e.lambda;
  return m;
}

TractorEndo endo_from_matrix(const Mat& m, const Mat& g) {
  const Eigen::Index n = m.rows() - 2;
  TractorEndo e;
  e.lambda = -m(0, 0);
  e.x = m.block(0, 1, 1, n).transpose();
  e.y = m.block(1, 0, n, 1);
  e.f = g.ldlt().solve(Mat(m.block(1, 1, n, n) * g));
  return e;
}

Tractor endo_apply(const TractorEndo& e, const Mat& g, const Tractor& t) {
  return Tractor::from_vec(endo_matrix(e, g) * t.vec());
}

lie::AlgebraElement endo_to_algebra(const TractorEndo& e, const lie::SpecPtr& spec) {
  return lie::AlgebraElement(spec, lie::conformal_matrix(e.x, e.f, e.lambda, e.y));
}

namespace {

// X = −U, Y_b = P_ab U^a: the Schouten coupling of the connection as an endomorphism
Mat coupling_matrix(const riemann::CurvaturePack& p, const Vec& u) {
  const Eigen::Index n = u.size();
  TractorEndo a{-u, Mat::Zero(n, n), 0.0, p.schouten * u};
  return endo_matrix(a, p.g);
}

Mat connection_matrix(const riemann::CurvaturePack& p, const Vec& u) {
  const Eigen::Index n = u.size();
  Mat a = coupling_matrix(p, u);
  // Levi-Civita on the μ slot: −Γ^c_ab U^a μ_c
  for (Eigen::Index c = 0; c < n; ++c) a.block(1, 1 + c, n, 1) -= p.gamma[static_cast<std::size_t>(c)] * u;
  return a;
}

void require_samples(const curves::Trajectory& traj, std::size_t field) {
  if (traj.size() < 3) throw PreconditionError("tractor derivatives need at least three samples");
  if (field != traj.size()) throw PreconditionError("field must have one entry per trajectory sample");
}

double g_norm_covector(const Mat& g, const Vec& w) { return std::sqrt(std::max(0.0, w.dot(g.ldlt().solve(w)))); }

// Orthonormal-frame coordinates: g = L Lᵀ, v̂ = Lᵀv, ŵ = L⁻¹w, F̂ = Lᵀ F L⁻ᵀ.
struct Frame {
  Mat l;
  explicit Frame(const Mat& g) : l(g.llt().matrixL()) {}
  Vec up(const Vec& v) const { return l.transpose() * v; }
  Vec down(const Vec& w) const { return l.triangularView<Eigen::Lower>().solve(w); }
  Vec up_inv(const Vec& v) const { return l.transpose().triangularView<Eigen::Upper>().solve(v); }
  Vec down_inv(const Vec& w) const { return l * w; }
  Mat mixed(const Mat& f) const {
    Mat a = l.transpose() * f;
    return l.triangularView<Eigen::Lower>().solve(a.transpose()).transpose();
  }
  Mat mixed_inv(const Mat& fh) const {
    Mat a = l.transpose().triangularView<Eigen::Upper>().solve(fh);
    return a * l.transpose();
  }
};

Vec param_vector(const TractorEndo& e, const Frame& fr) {
  const Eigen::Index n = e.x.size();
  Vec out(2 * n + 1 + n * (n - 1) / 2);
  out.head(n) = fr.up(e.x);
  Mat fh = fr.mixed(e.f);
  Eigen::Index k = n;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) out(k++) = fh(i, j);
  out(k++) = e.lambda;
  out.segment(k, n) = fr.down(e.y);
  return out;
}

Mat wedge(const Vec& a, const Vec& b) { return a * b.transpose() - b * a.transpose(); }

SFrame make_frame(const Mat& g, const Vec& u, const Vec& c) {
  const Eigen::Index n = u.size();
  if (n < 3) throw PreconditionError("S-frames need n >= 3");
  if (g.rows() != n || c.size() != n) throw PreconditionError("S-frame data has inconsistent dimensions");
  if (std::abs(std::sqrt(u.dot(g * u)) - 1.0) > 1e-8) throw PreconditionError("U must have unit length");
  if (std::abs(u.dot(g * c)) > 1e-8) throw PreconditionError("C must be orthogonal to U");
  Frame fr(g);
  Vec uh = fr.up(u);
  // orthonormal complement of Û
  Mat seed(n, n + 1);
  seed << uh, Mat::Identity(n, n);
  Eigen::HouseholderQR<Mat> qr(seed);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  SFrame out;
  out.u = u;
  out.c = c;
  out.g = g;
  auto add = [&](SParams p) {
    out.basis.push_back(s_element(g, u, c, p));
    out.params.push_back(std::move(p));
  };
  add(SParams{1.0, 0.0, 0.0, {}});
  add(SParams{0.0, 1.0, 0.0, {}});
  add(SParams{0.0, 0.0, 1.0, {}});
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) add(SParams{0.0, 0.0, 0.0, wedge(q.col(i), q.col(j))});
  Mat cols(param_vector(out.basis.front(), fr).size(), out.dim());
  for (int k = 0; k < out.dim(); ++k) cols.col(k) = param_vector(out.basis[static_cast<std::size_t>(k)], fr);
  out.span = linalg::orthonormal_basis(cols);
  return out;
}

}  // namespace

Mat connection_matrix(const ChartMetric& m, const Vec& x, const Vec& u) {
  return connection_matrix(riemann::curvature(m, x), u);
}

std::vector<Tractor> tractor_derivative(const ChartMetric& m, const curves::Trajectory& traj,
                                        const std::vector<Tractor>& field) {
  require_samples(traj, field.size());
  std::vector<Vec> comps;
  for (const Tractor& f : field) comps.push_back(f.vec());
  std::vector<Tractor> out;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const auto& s = traj.states[i];
    Vec d = linalg::derivative_stencil(traj.t, i).apply(comps);
    out.push_back(Tractor::from_vec(d + connection_matrix(m, s.x, s.u) * field[i].vec()));
  }
  return out;
}

std::vector<TractorEndo> endo_derivative(const ChartMetric& m, const curves::Trajectory& traj,
                                         const std::vector<TractorEndo>& field) {
  require_samples(traj, field.size());
  std::vector<Mat> mats;
  for (std::size_t i = 0; i < traj.size(); ++i) mats.push_back(endo_matrix(field[i], m.g(traj.states[i].x)));
  std::vector<TractorEndo> out;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const auto& s = traj.states[i];
    riemann::CurvaturePack p = riemann::curvature(m, s.x);
    Mat a = connection_matrix(p, s.u);
    const Mat& here = mats[i];
    Mat dm = linalg::derivative_stencil(traj.t, i).apply(mats);
    // column j: ∂(Φ e_j) − Φ(∂e_j), the frame tractors e_j having constant components
    Mat d(here.rows(), here.cols());
    for (Eigen::Index j = 0; j < here.cols(); ++j) {
      Vec phi_e = here.col(j);
      Vec d_phi_e = dm.col(j) + a * phi_e;
      Vec d_e = a.col(j);
      d.col(j) = d_phi_e - here * d_e;
    }
    out.push_back(endo_from_matrix(d, p.g));
  }
  return out;
}

// -- S-frames -------------------------------------------------------------------

TractorEndo s_element(const Mat& g, const Vec& u, const Vec& c, const SParams& p) {
  const Eigen::Index n = u.size();
  Frame fr(g);
  Vec uh = fr.up(u), ch = fr.up(c);
  Mat proj = Mat::Identity(n, n) - uh * uh.transpose();
  Mat fh = p.fprime.size() ? Mat(proj * p.fprime * proj) : Mat(Mat::Zero(n, n));
  fh += p.f * wedge(uh, ch);
  Vec xh = p.f * uh;
  Vec yh = p.h * uh + p.lambda * ch + fh * ch;
  return TractorEndo{fr.up_inv(xh), fr.mixed_inv(fh), p.lambda, fr.down_inv(yh)};
}

SFrame s_frame_geodesic(const Mat& g, const Vec& u) { return make_frame(g, u, Vec::Zero(u.size())); }
SFrame s_frame_circle(const Mat& g, const Vec& u, const Vec& c) { return make_frame(g, u, c); }
SFrame s_frame_geodesic(const Vec& u) { return s_frame_geodesic(Mat::Identity(u.size(), u.size()), u); }
SFrame s_frame_circle(const Vec& u, const Vec& c) { return s_frame_circle(Mat::Identity(u.size(), u.size()), u, c); }

double SFrame::constraint_residual() const {
  Frame fr(g);
  Vec uh = fr.up(u), ch = fr.up(c);
  double worst = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const TractorEndo& e = basis[k];
    const SParams& p = params[k];
    Vec xh = fr.up(e.x), yh = fr.down(e.y);
    Mat fh = fr.mixed(e.f);
    worst = std::max(worst, (fh + fh.transpose()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (xh - p.f * uh).norm());
    worst = std::max(worst, (fh * uh + p.f * ch).norm());
    worst = std::max(worst, (yh - p.h * uh - p.lambda * ch - fh * ch).norm());
  }
  return worst;
}

double SFrame::complement_norm(const TractorEndo& e) const {
  return linalg::residual(span, param_vector(e, Frame(g))).norm();
}

ConditionResidual condition_residual(const TractorEndo& e, const Mat& g, const Vec& u, const Vec& c) {
  const Eigen::Index n = u.size();
  Mat m = endo_matrix(e, g);
  Vec ul = g * u, cl = g * c;
  Vec t1 = Vec::Zero(n + 2), t2 = Vec::Zero(n + 2), t3 = Vec::Zero(n + 2);
  t1(n + 1) = 1.0;
  t2.segment(1, n) = ul;
  t3(0) = 1.0;
  t3.segment(1, n) = -cl;
  Tractor a = Tractor::from_vec(m * t1), b = Tractor::from_vec(m * t2), cc = Tractor::from_vec(m * t3);
  const double lambda = a.rho;
  const double f = -a.mu.dot(u);
  const double h = cc.mu.dot(u);
  const double c2 = c.dot(cl);
  ConditionResidual r;
  r.compact = std::max({std::abs(a.sigma), g_norm_covector(g, a.mu + f * ul), std::abs(b.sigma - f),
                        g_norm_covector(g, b.mu + f * cl), g_norm_covector(g, cc.mu - h * ul - lambda * cl)});
  r.full = std::max({r.compact, std::abs(b.rho + h + f * c2), std::abs(cc.sigma + lambda),
                     std::abs(cc.rho - lambda * c2)});
  return r;
}

// -- defects along curves -------------------------------------------------------

std::vector<double> closure_defect(const ChartMetric& m, const curves::Trajectory& traj) {
  if (traj.size() < 3) throw PreconditionError("closure_defect needs at least three samples");
  const Eigen::Index n = m.n();
  // constant-parameter sections of S; F' from fixed skew matrices projected off U
  std::vector<SParams> sections = {{1.0, 0.0, 0.0, {}}, {0.0, 1.0, 0.0, {}}, {0.0, 0.0, 1.0, {}}};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      sections.push_back(SParams{0.0, 0.0, 0.0, wedge(Vec::Unit(n, i), Vec::Unit(n, j))});
  std::vector<Mat> gs;
  for (const auto& s : traj.states) gs.push_back(m.g(s.x));
  std::vector<double> out(traj.size() - 2, 0.0);
  for (const SParams& p : sections) {
    std::vector<TractorEndo> field;
    for (std::size_t i = 0; i < traj.size(); ++i)
      field.push_back(s_element(gs[i], traj.states[i].u, Vec::Zero(n), p));
    auto d = endo_derivative(m, traj, field);
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
      SFrame fr = s_frame_geodesic(gs[i], traj.states[i].u);
      out[i - 1] = std::max(out[i - 1], fr.complement_norm(d[i - 1]));
    }
  }
  return out;
}

namespace {

std::vector<TractorEndo> f_element_field(const ChartMetric& m, const curves::Trajectory& traj,
                                         const std::vector<Vec>& c, std::vector<Mat>& gs) {
  std::vector<TractorEndo> field;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    gs.push_back(m.g(traj.states[i].x));
    field.push_back(s_element(gs.back(), traj.states[i].u, c[i], SParams{1.0, 0.0, 0.0, {}}));
  }
  return field;
}

}  // namespace

curves::ResidualSeries appendix_defect(const ChartMetric& m, const curves::Trajectory& traj) {
  if (traj.size() < 3) throw PreconditionError("appendix_defect needs at least three samples");
  std::vector<Vec> c;
  for (const auto& s : traj.states) c.push_back(s.c);
  std::vector<Mat> gs;
  auto d = endo_derivative(m, traj, f_element_field(m, traj, c, gs));
  curves::ResidualSeries out;
  const Eigen::Index n = m.n();
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    Tractor t{0.0, gs[i] * traj.states[i].u, 0.0};
    // μ-component is −(∂f − λ)C_b − f E_b with f ≡ 1, λ ≡ 0
    Vec e = -endo_apply(d[i - 1], gs[i], t).mu;
    double norm = g_norm_covector(gs[i], e);
    out.index.push_back(i);
    out.t.push_back(traj.t[i]);
    out.e.push_back(e.head(n));
    out.norm.push_back(norm);
    out.max_norm = std::max(out.max_norm, norm);
  }
  return out;
}

std::vector<Vec> acceleration_defect(const ChartMetric& m, const curves::Trajectory& traj, const std::vector<Vec>& c) {
  require_samples(traj, c.size());
  std::vector<Mat> gs;
  auto d = endo_derivative(m, traj, f_element_field(m, traj, c, gs));
  std::vector<Vec> out;
  const Eigen::Index n = m.n();
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    Tractor t{0.0, Vec::Zero(n), 1.0};
    out.push_back(endo_apply(d[i - 1], gs[i], t).mu);
  }
  return out;
}

namespace {

// RK4 for y' = F(A(t), y) using samples i, i+1, i+2 as start, midpoint and end; a final
// unpaired step falls back to Heun.
template <class Y, class F>
Y rk_along(const ChartMetric& m, const curves::Trajectory& traj, Y y, F rhs) {
  std::vector<Mat> a;
  for (const auto& s : traj.states) a.push_back(connection_matrix(riemann::curvature(m, s.x), s.u));
  std::size_t i = 0;
  while (i + 2 < traj.size()) {
    const double h = traj.t[i + 2] - traj.t[i];
    Y k1 = rhs(a[i], y);
    Y k2 = rhs(a[i + 1], Y(y + 0.5 * h * k1));
    Y k3 = rhs(a[i + 1], Y(y + 0.5 * h * k2));
    Y k4 = rhs(a[i + 2], Y(y + h * k3));
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    i += 2;
  }
  if (i + 1 < traj.size()) {
    const double h = traj.t[i + 1] - traj.t[i];
    Y k1 = rhs(a[i], y);
    Y k2 = rhs(a[i + 1], Y(y + h * k1));
    y = y + 0.5 * h * (k1 + k2);
  }
  return y;
}

}  // namespace

Tractor transport_tractor(const ChartMetric& m, const curves::Trajectory& traj, const Tractor& start) {
  if (traj.size() < 2) throw PreconditionError("transport needs at least two samples");
  Vec y = rk_along(m, traj, start.vec(), [](const Mat& a, const Vec& v) -> Vec { return -a * v; });
  return Tractor::from_vec(y);
}

double transport_closure_defect(const ChartMetric& m, const curves::Trajectory& traj) {
  if (traj.size() < 2) throw PreconditionError("transport needs at least two samples");
  const auto& first = traj.states.front();
  const auto& last = traj.states.back();
  Mat g0 = m.g(first.x), g1 = m.g(last.x);
  SFrame s0 = s_frame_geodesic(g0, first.u);
  SFrame s1 = s_frame_geodesic(g1, last.u);
  double worst = 0.0;
  for (const TractorEndo& e : s0.basis) {
    Mat phi = rk_along(m, traj, endo_matrix(e, g0), [](const Mat& a, const Mat& p) -> Mat { return p * a - a * p; });
    worst = std::max(worst, s1.complement_norm(endo_from_matrix(phi, g1)));
  }
  return worst;
}

}  // namespace paracurves::tractor
