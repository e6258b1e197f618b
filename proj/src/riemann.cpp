#include "paracurves/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "json_util.hpp"
#include "paracurves/errors.hpp"

namespace paracurves::riemann {

// -- Domain -------------------------------------------------------------------

bool Domain::in_box(const Vec& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) < lo(i) || x(i) > hi(i)) return false;
  return true;
}

bool Domain::contains(const Vec& x) const {
  if (!x.allFinite()) return false;
  return valid ? valid(x) : true;
}

std::vector<Vec> Domain::lattice(int cap) const {
  const Eigen::Index n = lo.size();
  std::vector<Vec> out;
  long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= 3;
  if (total > cap) total = cap;
  for (long k = 0; k < total; ++k) {
    Vec x(n);
    long r = k;
    for (Eigen::Index i = 0; i < n; ++i) {
      int digit = static_cast<int>(r % 3);
      r /= 3;
      x(i) = lo(i) + 0.5 * digit * (hi(i) - lo(i));
    }
    if (contains(x)) out.push_back(x);
  }
  return out;
}

// -- ChartMetric --------------------------------------------------------------

ChartMetric::ChartMetric(std::string name, int n, Domain domain, MetricEvaluators ev)
    : name_(std::move(name)),
      n_(n),
      domain_(std::move(domain)),
      ev_(std::make_shared<const MetricEvaluators>(std::move(ev))) {
  if (n_ < 1) throw PreconditionError("metric dimension must be positive");
  if (domain_.lo.size() != n_ || domain_.hi.size() != n_) throw PreconditionError("domain box has wrong dimension");
}

ChartMetric ChartMetric::with_differentiation(Differentiation mode, double h1, double h2) const {
  ChartMetric out = *this;
  out.mode_ = mode;
  out.h1_ = h1;
  out.h2_ = h2;
  return out;
}

void ChartMetric::check_point(const Vec& x) const {
  if (x.size() != n_) throw PreconditionError("point has wrong dimension for metric '" + name_ + "'");
  if (!domain_.contains(x)) throw DomainError("point outside the domain of metric '" + name_ + "'");
}

void ChartMetric::check_metric(const Mat& g) const {
  if (!g.allFinite()) throw SingularMetricError("metric '" + name_ + "' is not finite");
  double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw SingularMetricError("metric '" + name_ + "' is not symmetric");
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw SingularMetricError("metric '" + name_ + "' is not positive definite");
  if (llt.matrixL().toDenseMatrix().diagonal().minCoeff() < 1e-12 * std::sqrt(scale))
    throw SingularMetricError("metric '" + name_ + "' is numerically singular");
}

namespace {

Mat to_matrix(const std::vector<double>& v, int n) {
  if (static_cast<int>(v.size()) != n * n) throw PreconditionError("metric evaluator returned wrong size");
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v[static_cast<std::size_t>(i * n + j)];
  return m;
}

std::vector<double> to_std(const Vec& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

}  // namespace

Mat ChartMetric::g(const Vec& x) const {
  check_point(x);
  Mat g = to_matrix(ev_->plain(to_std(x)), n_);
  check_metric(g);
  return g;
}

MetricJet ChartMetric::jet(const Vec& x, int order) const {
  check_point(x);
  const int n = n_;
  MetricJet out;
  out.g = to_matrix(ev_->plain(to_std(x)), n);
  check_metric(out.g);
  out.dg.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  if (order >= 2) out.ddg.assign(static_cast<std::size_t>(n * n), Mat::Zero(n, n));
  if (order <= 0) return out;

  if (mode_ == Differentiation::DualNumbers) {
    if (order == 1) {
      for (int a = 0; a < n; ++a) {
        std::vector<Dual1> xs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = Dual1(x(i), i == a ? 1.0 : 0.0);
        auto r = ev_->first(xs);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) out.dg[static_cast<std::size_t>(a)](i, j) = r[static_cast<std::size_t>(i * n + j)].d;
      }
      return out;
    }
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        std::vector<Dual2> xs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
          xs[static_cast<std::size_t>(i)] = Dual2(Dual1(x(i), i == b ? 1.0 : 0.0), Dual1(i == a ? 1.0 : 0.0, 0.0));
        auto r = ev_->second(xs);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const Dual2& e = r[static_cast<std::size_t>(i * n + j)];
            out.ddg[static_cast<std::size_t>(a * n + b)](i, j) = e.d.d;
            out.ddg[static_cast<std::size_t>(b * n + a)](i, j) = e.d.d;
            if (a == b) out.dg[static_cast<std::size_t>(a)](i, j) = e.d.v;
          }
      }
    return out;
  }

  // centered finite differences
  auto eval = [&](const Vec& p) { return to_matrix(ev_->plain(to_std(p)), n); };
  for (int a = 0; a < n; ++a) {
    Vec e = Vec::Unit(n, a) * h1_;
    out.dg[static_cast<std::size_t>(a)] = (eval(x + e) - eval(x - e)) / (2.0 * h1_);
  }
  if (order >= 2) {
    const double h = h2_;
    for (int a = 0; a < n; ++a) {
      Vec ea = Vec::Unit(n, a) * h;
      out.ddg[static_cast<std::size_t>(a * n + a)] = (eval(x + ea) - 2.0 * out.g + eval(x - ea)) / (h * h);
      for (int b = a + 1; b < n; ++b) {
        Vec eb = Vec::Unit(n, b) * h;
        Mat m = (eval(x + ea + eb) - eval(x + ea - eb) - eval(x - ea + eb) + eval(x - ea - eb)) / (4.0 * h * h);
        out.ddg[static_cast<std::size_t>(a * n + b)] = m;
        out.ddg[static_cast<std::size_t>(b * n + a)] = m;
      }
    }
  }
  return out;
}

// -- curvature ----------------------------------------------------------------

double Tensor4::max_abs() const {
  double m = 0.0;
  for (double v : data) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Mat> christoffel(const MetricJet& jet, const Mat& ginv) {
  const int n = static_cast<int>(jet.g.rows());
  // first-kind symbols: L[e](b, d) = ½(∂_b g_ed + ∂_d g_be − ∂_e g_bd)
  std::vector<Mat> lower(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int e = 0; e < n; ++e)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d)
        lower[static_cast<std::size_t>(e)](b, d) =
            0.5 * (jet.dg[static_cast<std::size_t>(b)](e, d) + jet.dg[static_cast<std::size_t>(d)](b, e) -
                   jet.dg[static_cast<std::size_t>(e)](b, d));
  std::vector<Mat> gamma(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e) gamma[static_cast<std::size_t>(c)] += ginv(c, e) * lower[static_cast<std::size_t>(e)];
  return gamma;
}

std::vector<Mat> christoffel(const ChartMetric& m, const Vec& x) {
  MetricJet jet = m.jet(x, 1);
  return christoffel(jet, jet.g.inverse());
}

Vec contract_gamma(const std::vector<Mat>& gamma, const Vec& u, const Vec& v) {
  Vec out(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t a = 0; a < gamma.size(); ++a) out(static_cast<Eigen::Index>(a)) = u.dot(gamma[a] * v);
  return out;
}

CurvaturePack curvature(const ChartMetric& m, const Vec& x) {
  const int n = m.n();
  if (n < 3) throw PreconditionError("Schouten and Weyl tensors need n >= 3");
  MetricJet jet = m.jet(x, 2);
  CurvaturePack p;
  p.n = n;
  p.x = x;
  p.g = jet.g;
  p.ginv = jet.g.inverse();
  p.gamma = christoffel(jet, p.ginv);
  const auto idx = [](int i) { return static_cast<std::size_t>(i); };

  // dGamma[a][c](b, d) = ∂_a Γ^c_bd
  std::vector<std::vector<Mat>> dgamma(idx(n), std::vector<Mat>(idx(n), Mat::Zero(n, n)));
  for (int a = 0; a < n; ++a) {
    // ½(∂_a∂_b g_ed + ∂_a∂_d g_be − ∂_a∂_e g_bd)
    std::vector<Mat> second(idx(n), Mat::Zero(n, n));
    for (int e = 0; e < n; ++e)
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d)
          second[idx(e)](b, d) = 0.5 * (jet.ddg[idx(a * n + b)](e, d) + jet.ddg[idx(a * n + d)](b, e) -
                                        jet.ddg[idx(a * n + e)](b, d));
    for (int c = 0; c < n; ++c) {
      Mat acc = Mat::Zero(n, n);
      for (int e = 0; e < n; ++e) acc += p.ginv(c, e) * second[idx(e)];
      // − g^cf ∂_a g_fh Γ^h_bd
      Mat dginv_row = -(p.ginv.row(c) * jet.dg[idx(a)]);  // 1 x n over h
      for (int h = 0; h < n; ++h) acc += dginv_row(0, h) * p.gamma[idx(h)];
      dgamma[idx(a)][idx(c)] = acc;
    }
  }

  // R^c_dab = ∂_aΓ^c_bd − ∂_bΓ^c_ad + Γ^c_ae Γ^e_bd − Γ^c_be Γ^e_ad; R_abcd = g_ce R^e_dab
  Tensor4 up(n);  // up(c, d, a, b)
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double v = dgamma[idx(a)][idx(c)](b, d) - dgamma[idx(b)][idx(c)](a, d);
          for (int e = 0; e < n; ++e)
            v += p.gamma[idx(c)](a, e) * p.gamma[idx(e)](b, d) - p.gamma[idx(c)](b, e) * p.gamma[idx(e)](a, d);
          up(c, d, a, b) = v;
        }
  p.riemann = Tensor4(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double v = 0.0;
          for (int e = 0; e < n; ++e) v += p.g(c, e) * up(e, d, a, b);
          p.riemann(a, b, c, d) = v;
        }

  p.ricci = Mat::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double v = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) v += p.ginv(a, c) * p.riemann(a, b, c, d);
      p.ricci(b, d) = v;
    }
  p.ricci = 0.5 * (p.ricci + p.ricci.transpose());
  p.scalar = (p.ginv.cwiseProduct(p.ricci)).sum();
  p.J = p.scalar / (2.0 * (n - 1));
  p.schouten = (p.ricci - p.J * p.g) / static_cast<double>(n - 2);

  p.weyl = Tensor4(n);
  const Mat& P = p.schouten;
  const Mat& g = p.g;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          p.weyl(a, b, c, d) = p.riemann(a, b, c, d) -
                               (P(a, c) * g(b, d) - P(b, c) * g(a, d) - P(a, d) * g(b, c) + P(b, d) * g(a, c));
  return p;
}

EinsteinReport einstein_check(const ChartMetric& m, const std::vector<Vec>& samples, double tol) {
  if (samples.size() < 5) throw PreconditionError("einstein_check needs at least five sample points");
  EinsteinReport r;
  double lo = 0.0, hi = 0.0, sum = 0.0;
  const double n = m.n();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CurvaturePack p = curvature(m, samples[i]);
    Mat endo = p.schouten_endomorphism();
    double lambda = endo.trace() / n;
    double dev = (endo - lambda * Mat::Identity(m.n(), m.n())).cwiseAbs().maxCoeff();
    r.max_deviation = std::max(r.max_deviation, dev);
    sum += lambda;
    if (i == 0) lo = hi = lambda;
    lo = std::min(lo, lambda);
    hi = std::max(hi, lambda);
  }
  r.lambda = sum / static_cast<double>(samples.size());
  r.lambda_variation = hi - lo;
  r.is_einstein = r.max_deviation < tol;
  return r;
}

// -- conformal factors --------------------------------------------------------

ConformalFactor::ConformalFactor(std::string name, int n, ScalarEvaluators ev)
    : name_(std::move(name)), n_(n), ev_(std::make_shared<const ScalarEvaluators>(std::move(ev))) {}

ConformalFactor ConformalFactor::constant(int n, double c) {
  return ConformalFactor("constant(" + std::to_string(c) + ")", n,
                         make_scalar_evaluators([c](const auto& x) {
                           using T = typename std::decay_t<decltype(x)>::value_type;
                           return T(c);
                         }));
}

namespace {

template <class T>
T quadratic_form(const std::vector<T>& x, double c, const Vec& b, const Mat& a) {
  T q = T(c);
  const auto n = static_cast<Eigen::Index>(x.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    q += b(i) * x[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j)
      q += (0.5 * a(i, j)) * (x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)]);
  }
  return q;
}

}  // namespace

ConformalFactor ConformalFactor::exp_quadratic(double c, const Vec& b, const Mat& a) {
  const int n = static_cast<int>(b.size());
  Mat sym = 0.5 * (a + a.transpose());
  return ConformalFactor("exp_quadratic", n, make_scalar_evaluators([c, b, sym](const auto& x) {
                           using std::exp;
                           return exp(quadratic_form(x, c, b, sym));
                         }));
}

ConformalFactor ConformalFactor::quadratic(double c, const Vec& b, const Mat& a) {
  const int n = static_cast<int>(b.size());
  Mat sym = 0.5 * (a + a.transpose());
  return ConformalFactor("quadratic", n,
                         make_scalar_evaluators([c, b, sym](const auto& x) { return quadratic_form(x, c, b, sym); }));
}

ConformalFactor ConformalFactor::inverse_stereographic(int n) {
  return ConformalFactor("inverse_stereographic", n, make_scalar_evaluators([](const auto& x) {
                           using T = typename std::decay_t<decltype(x)>::value_type;
                           T r2 = T(0.0);
                           for (const auto& xi : x) r2 += xi * xi;
                           return T(2.0) / (1.0 + r2);
                         }));
}

double ConformalFactor::value(const Vec& x) const { return ev_->plain(to_std(x)); }

Vec ConformalFactor::upsilon(const Vec& x) const {
  Vec out(n_);
  for (int a = 0; a < n_; ++a) {
    std::vector<Dual1> xs(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) xs[static_cast<std::size_t>(i)] = Dual1(x(i), i == a ? 1.0 : 0.0);
    Dual1 w = ev_->first(xs);
    out(a) = w.d / w.v;
  }
  return out;
}

Mat ConformalFactor::log_hessian(const Vec& x) const {
  Mat h(n_, n_);
  for (int a = 0; a < n_; ++a)
    for (int b = a; b < n_; ++b) {
      std::vector<Dual2> xs(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i)
        xs[static_cast<std::size_t>(i)] = Dual2(Dual1(x(i), i == b ? 1.0 : 0.0), Dual1(i == a ? 1.0 : 0.0, 0.0));
      Dual2 w = ev_->second(xs);
      double f = w.v.v, fa = w.d.v, fb = w.v.d, fab = w.d.d;
      h(a, b) = h(b, a) = fab / f - fa * fb / (f * f);
    }
  return h;
}

ChartMetric conformal_rescale(const ChartMetric& m, const ConformalFactor& omega) {
  if (omega.n() != m.n()) throw PreconditionError("conformal factor dimension does not match the metric");
  for (const Vec& x : m.domain().lattice()) {
    double w = omega.value(x);
    if (!(w > 0.0)) throw DomainError("conformal factor is not positive on the domain");
  }
  auto g = m.evaluators();
  auto w = omega.evaluators();
  auto scale = [](auto values, auto factor) {
    auto f2 = factor * factor;
    for (auto& v : values) v = v * f2;
    return values;
  };
  MetricEvaluators ev{
      [g, w, scale](const std::vector<double>& x) { return scale(g.plain(x), w.plain(x)); },
      [g, w, scale](const std::vector<Dual1>& x) { return scale(g.first(x), w.first(x)); },
      [g, w, scale](const std::vector<Dual2>& x) { return scale(g.second(x), w.second(x)); }};
  ChartMetric out(m.name() + "*" + omega.name() + "^2", m.n(), m.domain(), std::move(ev));
  return out.with_differentiation(m.differentiation(), m.fd_step_first(), m.fd_step_second());
}

Mat rescaled_schouten_law(const ChartMetric& m, const ConformalFactor& omega, const Vec& x) {
  CurvaturePack p = curvature(m, x);
  Vec ups = omega.upsilon(x);
  Mat hess = omega.log_hessian(x);
  Mat nabla_ups = hess;
  for (int c = 0; c < m.n(); ++c) nabla_ups -= ups(c) * p.gamma[static_cast<std::size_t>(c)];
  double ups2 = ups.dot(p.ginv * ups);
  return p.schouten - nabla_ups + ups * ups.transpose() - 0.5 * ups2 * p.g;
}

double schouten_rescale_residual(const ChartMetric& m, const ConformalFactor& omega, const Vec& x) {
  Mat direct = curvature(conformal_rescale(m, omega), x).schouten;
  return (direct - rescaled_schouten_law(m, omega, x)).cwiseAbs().maxCoeff();
}

OneFormField OneFormField::affine(const Vec& c, const Mat& a) {
  return {[c, a](const Vec& x) -> Vec { return c + a * x; }, [a](const Vec&) -> Mat { return a.transpose(); }};
}

Mat covariant_derivative(const std::vector<Mat>& gamma, const OneFormField& phi, const Vec& x) {
  Mat out = phi.jacobian(x);
  Vec v = phi.value(x);
  for (std::size_t c = 0; c < gamma.size(); ++c) out -= v(static_cast<Eigen::Index>(c)) * gamma[c];
  return out;
}

double connection_rescale_check(const ChartMetric& m, const ConformalFactor& omega, const OneFormField& phi,
                                const Vec& x) {
  ChartMetric hat = conformal_rescale(m, omega);
  Mat lhs = covariant_derivative(christoffel(hat, x), phi, x);
  MetricJet jet = m.jet(x, 1);
  Mat ginv = jet.g.inverse();
  Mat nabla = covariant_derivative(christoffel(jet, ginv), phi, x);
  Vec ups = omega.upsilon(x);
  Vec f = phi.value(x);
  Mat rhs = nabla - ups * f.transpose() - f * ups.transpose() + ups.dot(ginv * f) * jet.g;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

// -- catalog ------------------------------------------------------------------

namespace {

Domain box(int n, double half, std::function<bool(const Vec&)> valid = {}) {
  return Domain{Vec::Constant(n, -half), Vec::Constant(n, half), std::move(valid)};
}

template <class T>
std::vector<T> scaled_identity(int n, const T& s) {
  std::vector<T> g(static_cast<std::size_t>(n * n), T(0.0));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i * n + i)] = s;
  return g;
}

}  // namespace

ChartMetric flat_metric(int n) {
  return ChartMetric("flat", n, box(n, 1.0), make_metric_evaluators([n](const auto& x) {
                       using T = typename std::decay_t<decltype(x)>::value_type;
                       return scaled_identity(n, T(1.0));
                     }));
}

ChartMetric round_sphere(int n) {
  return ChartMetric("sphere", n, box(n, 1.0), make_metric_evaluators([n](const auto& x) {
                       using T = typename std::decay_t<decltype(x)>::value_type;
                       T r2 = T(0.0);
                       for (const auto& xi : x) r2 += xi * xi;
                       T d = 1.0 + r2;
                       return scaled_identity(n, T(4.0) / (d * d));
                     }));
}

ChartMetric hyperbolic_ball(int n) {
  auto inside = [](const Vec& x) { return x.squaredNorm() < 1.0; };
  return ChartMetric("hyperbolic", n, box(n, 0.4, inside), make_metric_evaluators([n](const auto& x) {
                       using T = typename std::decay_t<decltype(x)>::value_type;
                       T r2 = T(0.0);
                       for (const auto& xi : x) r2 += xi * xi;
                       T d = 1.0 - r2;
                       return scaled_identity(n, T(4.0) / (d * d));
                     }));
}

ChartMetric fubini_study_cp2() {
  // h_{jk̄} = δ_jk / s − z̄_j z_k / s², s = 1 + |z|²; real part on dx dx and dy dy,
  // imaginary part couples dx_j with dy_k.
  return ChartMetric("fubini_study", 4, box(4, 1.0), make_metric_evaluators([](const auto& v) {
                       using T = typename std::decay_t<decltype(v)>::value_type;
                       const T xs[2] = {v[0], v[2]};
                       const T ys[2] = {v[1], v[3]};
                       T s = 1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
                       T s2 = s * s;
                       std::vector<T> g(16, T(0.0));
                       auto at = [&g](int i, int j) -> T& { return g[static_cast<std::size_t>(i * 4 + j)]; };
                       for (int j = 0; j < 2; ++j)
                         for (int k = 0; k < 2; ++k) {
                           T re = (j == k ? T(1.0) / s : T(0.0)) - (xs[j] * xs[k] + ys[j] * ys[k]) / s2;
                           T im = -(xs[j] * ys[k] - ys[j] * xs[k]) / s2;
                           const int xj = 2 * j, yj = 2 * j + 1, xk = 2 * k, yk = 2 * k + 1;
                           at(xj, xk) = re;
                           at(yj, yk) = re;
                           at(xj, yk) = im;
                           at(yj, xk) = -im;
                         }
                       return g;
                     }));
}

ChartMetric non_einstein_diagonal(int n) {
  if (n < 3) throw PreconditionError("non-Einstein catalog metric needs n >= 3");
  return ChartMetric("non_einstein", n, box(n, 1.5), make_metric_evaluators([n](const auto& x) {
                       using T = typename std::decay_t<decltype(x)>::value_type;
                       auto g = scaled_identity(n, T(1.0));
                       g[static_cast<std::size_t>(n + 1)] = 1.0 + x[0] * x[0];
                       return g;
                     }));
}

namespace {

struct Term {
  double coef;
  std::vector<int> powers;
};

template <class T>
T int_pow(const T& x, int p) {
  T r = T(1.0);
  for (int i = 0; i < p; ++i) r = r * x;
  return r;
}

}  // namespace

ChartMetric polynomial_metric_from_json(const std::string& text) {
  using jsonio::Node;
  auto doc = jsonio::parse(text);
  Node root = Node::root(doc);
  root.expect_keys({"n", "name", "domain", "components"});
  const long long n_ll = root.at("n").integer();
  if (n_ll < 1 || n_ll > 16) root.at("n").fail("dimension must lie in 1..16");
  const int n = static_cast<int>(n_ll);
  std::string name = root.string_or("name", "polynomial");

  Domain domain = box(n, 1.0);
  if (root.has("domain")) {
    Node d = root.at("domain");
    d.expect_keys({"lo", "hi"});
    domain.lo = d.at("lo").vector(n);
    domain.hi = d.at("hi").vector(n);
    for (int i = 0; i < n; ++i)
      if (!(domain.lo(i) < domain.hi(i))) d.at("hi").at(static_cast<std::size_t>(i)).fail("hi must exceed lo");
  }

  // table[i*n+j] = terms
  std::vector<std::vector<Term>> table(static_cast<std::size_t>(n * n));
  std::vector<bool> seen(static_cast<std::size_t>(n * n), false);
  Node comps = root.at("components");
  comps.expect_array();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    Node c = comps.at(k);
    c.expect_keys({"i", "j", "terms"});
    long long i = c.at("i").integer(), j = c.at("j").integer();
    if (i < 0 || i >= n) c.at("i").fail("component index out of range");
    if (j < 0 || j >= n) c.at("j").fail("component index out of range");
    std::size_t slot = static_cast<std::size_t>(i * n + j);
    if (seen[slot]) c.fail("duplicate component (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    seen[slot] = seen[static_cast<std::size_t>(j * n + i)] = true;
    std::vector<Term> terms;
    Node ts = c.at("terms");
    ts.expect_array();
    for (std::size_t t = 0; t < ts.size(); ++t) {
      Node term = ts.at(t);
      term.expect_keys({"coef", "powers"});
      Term out{term.at("coef").number(), {}};
      Node pw = term.at("powers");
      pw.expect_array();
      if (static_cast<int>(pw.size()) != n) pw.fail("powers must have one entry per coordinate");
      for (std::size_t q = 0; q < pw.size(); ++q) {
        long long p = pw.at(q).integer();
        if (p < 0 || p > 32) pw.at(q).fail("power must lie in 0..32");
        out.powers.push_back(static_cast<int>(p));
      }
      terms.push_back(std::move(out));
    }
    table[slot] = terms;
    table[static_cast<std::size_t>(j * n + i)] = terms;
  }

  auto shared = std::make_shared<const std::vector<std::vector<Term>>>(std::move(table));
  ChartMetric m(name, n, domain, make_metric_evaluators([shared, n](const auto& x) {
                  using T = typename std::decay_t<decltype(x)>::value_type;
                  std::vector<T> g(static_cast<std::size_t>(n * n), T(0.0));
                  for (std::size_t s = 0; s < g.size(); ++s)
                    for (const Term& term : (*shared)[s]) {
                      T mono = T(term.coef);
                      for (int q = 0; q < n; ++q)
                        if (term.powers[static_cast<std::size_t>(q)] > 0)
                          mono = mono * int_pow(x[static_cast<std::size_t>(q)], term.powers[static_cast<std::size_t>(q)]);
                      g[s] += mono;
                    }
                  return g;
                }));
  // validate positivity where it will be sampled
  for (const Vec& x : domain.lattice()) {
    try {
      (void)m.g(x);
    } catch (const SingularMetricError& e) {
      throw SchemaError(std::string("polynomial metric invalid on its domain: ") + e.what(), root.line());
    }
  }
  return m;
}

std::vector<std::string> catalog_names() { return {"flat", "sphere", "hyperbolic", "fubini_study", "non_einstein"}; }

ChartMetric catalog_metric(const std::string& name, int n) {
  if (name == "flat") return flat_metric(n);
  if (name == "sphere") return round_sphere(n);
  if (name == "hyperbolic") return hyperbolic_ball(n);
  if (name == "fubini_study") {
    if (n != 4) throw PreconditionError("the Fubini-Study chart is four-dimensional");
    return fubini_study_cp2();
  }
  if (name == "non_einstein") return non_einstein_diagonal(n);
  throw PreconditionError("unknown catalog metric '" + name + "'");
}

}  // namespace paracurves::riemann
