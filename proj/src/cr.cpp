#include "paracurves/cr.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"

namespace paracurves::cr {

Sample Sample::zero(int n) {
  return Sample{n, MatC::Identity(n, n), MatC::Zero(n, n), MatC::Zero(n, n), VecC::Zero(n), {}, {}};
}

void Sample::validate(double tol) const {
  if (n < 1) throw PreconditionError("CR dimension must be positive");
  if (h.rows() != n || h.cols() != n || p.rows() != n || p.cols() != n || a.rows() != n || a.cols() != n ||
      t.size() != n)
    throw PreconditionError("CR sample components have inconsistent sizes");
  if (t_bar && t_bar->size() != n) throw PreconditionError("T_bar has the wrong size");
  if (a_bar && (a_bar->rows() != n || a_bar->cols() != n)) throw PreconditionError("A_bar has the wrong size");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol) throw PreconditionError("Levi form is not Hermitian");
  Eigen::FullPivLU<MatC> lu(h);
  if (!lu.isInvertible()) throw PreconditionError("Levi form is degenerate");
  if ((p - p.adjoint()).cwiseAbs().maxCoeff() > tol) throw PreconditionError("P is not Hermitian");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol) throw PreconditionError("A is not symmetric");
}

legendrean::BasicSample<Complex> to_legendrean(const Sample& s) {
  s.validate();
  // h^{αβ̄} as a matrix [unbarred][barred] is h⁻ᵀ
  MatC hinv = s.h.inverse();
  legendrean::BasicSample<Complex> out;
  out.n = s.n;
  out.p = s.p * hinv;
  out.a_lo = s.a;
  out.a_hi = hinv.transpose() * s.a.conjugate() * hinv;
  out.t_lo = s.t;
  out.t_hi = hinv.transpose() * s.t.conjugate();
  return out;
}

legendrean::BasicDirection<Complex> to_legendrean(const Sample& s, const Direction& d) {
  if (d.u.size() != s.n || d.v.size() != s.n) throw PreconditionError("direction has wrong size");
  return {d.u, s.h * d.v};
}

Check cr_constraint_check(const Sample& s, const Direction& d, double tol) {
  auto c = legendrean::constraint_check(to_legendrean(s), to_legendrean(s, d), tol);
  return Check{c.pass, c.lambda, c.k, c.eigen_residual};
}

EinsteinResult cr_einstein_check(const std::vector<Sample>& samples, double tol) {
  std::vector<legendrean::BasicSample<Complex>> data;
  for (const Sample& s : samples) data.push_back(to_legendrean(s));
  auto core = legendrean::einstein_scale_check(data, tol);
  EinsteinResult out;
  out.lambda = core.lambda.real();
  out.lambda_variation = core.lambda_variation;
  out.max_t = core.max_t;
  out.max_a = core.max_a;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Complex lam = data[i].p.trace() / static_cast<double>(samples[i].n);
    out.lambda_imag = std::max(out.lambda_imag, std::abs(lam.imag()));
    out.max_p_deviation =
        std::max(out.max_p_deviation, (samples[i].p - lam.real() * samples[i].h).cwiseAbs().maxCoeff());
  }
  out.pass = core.pass && out.lambda_imag < tol && out.max_p_deviation < tol;
  return out;
}

RealityReport reality_check(const Sample& s) {
  if (s.t.size() != s.n || s.a.rows() != s.n || s.p.rows() != s.n) throw PreconditionError("CR sample is malformed");
  RealityReport out;
  out.t_bar = s.t.conjugate();
  out.a_bar = s.a.conjugate();
  out.p_residual = (s.p - s.p.adjoint()).cwiseAbs().maxCoeff();
  if (s.t_bar) out.t_residual = (*s.t_bar - out.t_bar).norm();
  if (s.a_bar) out.a_residual = (*s.a_bar - out.a_bar).norm();
  out.barred_stored = s.t_bar.has_value() || s.a_bar.has_value();
  out.max_residual = std::max({out.t_residual, out.a_residual, out.p_residual});
  return out;
}

Direction random_direction(const Sample& s, std::mt19937_64& rng, bool conjugate) {
  if (!conjugate) {
    auto d = legendrean::random_direction<Complex>(s.n, rng);
    return Direction{d.u, s.h.lu().solve(d.v)};
  }
  std::normal_distribution<double> nd;
  for (;;) {
    VecC u = VecC::NullaryExpr(s.n, [&] {
      double re = nd(rng);
      return Complex(re, nd(rng));
    });
    VecC v = u.conjugate();
    Complex norm = (u.transpose() * s.h * v)(0, 0);
    // indefinite h admits null directions; redraw near them
    if (std::abs(norm) < 0.2) continue;
    return Direction{u, v / norm};
  }
}

legendrean::BasicProbeResult<Complex> corollary_equivalence_probe(const Sample& s, int trials, std::uint64_t seed,
                                                                  double tol) {
  auto core = legendrean::corollary_equivalence_probe(to_legendrean(s), trials, seed, tol);
  // reality: a complex λ passes the core Einstein test but not the CR one
  if (core.einstein_pass && !cr_einstein_check({s}, tol).pass) {
    core.einstein_pass = false;
    core.consistent = false;
  }
  return core;
}

Sample embed_real(const legendrean::Sample& s) {
  s.validate();
  const double tol = 1e-12;
  if ((s.p - s.p.transpose()).cwiseAbs().maxCoeff() > tol)
    throw PreconditionError("only symmetric P embeds as a Hermitian CR Schouten tensor");
  if ((s.a_hi - s.a_lo).cwiseAbs().maxCoeff() > tol)
    throw PreconditionError("real embedding needs A_hi = A_lo");
  if ((s.t_hi - s.t_lo).cwiseAbs().maxCoeff() > tol)
    throw PreconditionError("real embedding needs T_hi = T_lo");
  Sample out = Sample::zero(s.n);
  out.p = s.p.cast<Complex>();
  out.a = s.a_lo.cast<Complex>();
  out.t = s.t_lo.cast<Complex>();
  return out;
}

Direction embed_real(const legendrean::Direction& d) { return Direction{d.u.cast<Complex>(), d.v.cast<Complex>()}; }

Sample einstein_sample(const MatC& h, double lambda) {
  Sample s = Sample::zero(static_cast<int>(h.rows()));
  s.h = h;
  s.p = lambda * h;
  return s;
}

namespace {

void require(const jsonio::Node& node, bool ok, const std::string& what) {
  if (!ok) node.fail(what);
}

}  // namespace

Fixture parse_fixture(const std::string& text) {
  auto doc = jsonio::parse(text);
  jsonio::Node root = jsonio::Node::root(doc);
  root.expect_object();
  root.expect_keys({"n", "samples", "curve_meta"});
  Fixture out;
  jsonio::Node nn = root.at("n");
  long long n = nn.integer();
  require(nn, n >= 1 && n <= 64, "n must be between 1 and 64");
  out.n = static_cast<int>(n);
  jsonio::Node samples = root.at("samples");
  samples.expect_array();
  require(samples, samples.size() > 0, "samples must not be empty");
  const double tol = 1e-12;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    jsonio::Node s = samples.at(i);
    s.expect_object();
    s.expect_keys({"h", "P", "A", "T", "T_bar", "A_bar"});
    Sample sample = Sample::zero(out.n);
    if (s.has("h")) {
      sample.h = s.at("h").complex_matrix(out.n, out.n);
      require(s.at("h"), (sample.h - sample.h.adjoint()).cwiseAbs().maxCoeff() <= tol, "h must be Hermitian");
      require(s.at("h"), Eigen::FullPivLU<MatC>(sample.h).isInvertible(), "h must be nondegenerate");
    }
    sample.p = s.at("P").complex_matrix(out.n, out.n);
    require(s.at("P"), (sample.p - sample.p.adjoint()).cwiseAbs().maxCoeff() <= tol, "P must be Hermitian");
    sample.a = s.at("A").complex_matrix(out.n, out.n);
    require(s.at("A"), (sample.a - sample.a.transpose()).cwiseAbs().maxCoeff() <= tol, "A must be symmetric");
    sample.t = s.at("T").complex_vector(out.n);
    if (s.has("T_bar")) sample.t_bar = s.at("T_bar").complex_vector(out.n);
    if (s.has("A_bar")) sample.a_bar = s.at("A_bar").complex_matrix(out.n, out.n);
    out.samples.push_back(std::move(sample));
  }
  if (root.has("curve_meta")) {
    jsonio::Node meta = root.at("curve_meta");
    meta.expect_object();
    out.curve_meta = meta.raw().dump();
  }
  return out;
}

Fixture load_fixture(const std::string& path) { return parse_fixture(jsonio::read_file(path)); }

}  // namespace paracurves::cr
