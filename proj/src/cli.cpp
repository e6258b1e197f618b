#include "paracurves/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "paracurves/acceptance.hpp"
#include "paracurves/cr.hpp"
#include "paracurves/curves.hpp"
#include "paracurves/errors.hpp"
#include "paracurves/legendrean.hpp"
#include "paracurves/lie_core.hpp"
#include "paracurves/riemann.hpp"
#include "paracurves/tractor.hpp"

namespace paracurves::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using jsonio::Node;
using riemann::ChartMetric;
using riemann::Mat;
using riemann::Vec;
using Complex = std::complex<double>;

struct Context {
  Node root;
  std::string command;
  std::string id;
  std::uint64_t seed = 0;
  const RunOptions* opt = nullptr;

  double tol(double fallback) const {
    if (opt->tol) return *opt->tol;
    return root.number_or("tol", fallback);
  }
  std::string resolve(const std::string& path) const {
    fs::path p(path);
    if (p.is_relative() && !opt->base_dir.empty()) p = fs::path(opt->base_dir) / p;
    return p.string();
  }
};

struct Result {
  bool pass = false;
  double tol = 0.0;
  json payload = json::object();
};

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_json(const lie::Matrix& m, bool complex) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (complex)
        row.push_back(complex_json(m(i, j)));
      else
        row.push_back(m(i, j).real());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void require(const Node& node, bool ok, const std::string& what) {
  if (!ok) node.fail(what);
}

// -- metrics --------------------------------------------------------------------------

ChartMetric parse_metric(const Node& node, const Context& ctx) {
  node.expect_object();
  node.expect_keys({"catalog", "n", "polynomial", "file", "box"});
  const int sources = static_cast<int>(node.has("catalog")) + node.has("polynomial") + node.has("file");
  require(node, sources == 1, "metric needs exactly one of catalog, polynomial, file");
  std::optional<ChartMetric> m;
  if (node.has("catalog")) {
    Node name = node.at("catalog");
    const std::string tag = name.string();
    long long n = tag == "fubini_study" ? node.integer_or("n", 4) : node.at("n").integer();
    require(node, n >= 1 && n <= 16, "metric dimension must be between 1 and 16");
    try {
      m = riemann::catalog_metric(tag, static_cast<int>(n));
    } catch (const PreconditionError& e) {
      name.fail(e.what());
    }
  } else if (node.has("polynomial")) {
    Node poly = node.at("polynomial");
    poly.expect_object();
    m = riemann::polynomial_metric_from_json(poly.raw().dump());
  } else {
    m = riemann::polynomial_metric_from_json(jsonio::read_file(ctx.resolve(node.at("file").string())));
  }
  if (node.has("box")) {
    Node box = node.at("box");
    double half = box.number();
    require(box, half > 0.0 && std::isfinite(half), "box half-width must be positive");
    riemann::Domain d{Vec::Constant(m->n(), -half), Vec::Constant(m->n(), half), m->domain().valid};
    m = ChartMetric(m->name(), m->n(), d, m->evaluators());
  }
  return *m;
}

Vec random_point(const ChartMetric& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const auto& d = m.domain();
  for (;;) {
    Vec x = 0.5 * (d.lo + d.hi) + 0.4 * (d.hi - d.lo).cwiseProduct(Vec::NullaryExpr(m.n(), [&] { return uni(rng); }));
    if (d.contains(x)) return x;
  }
}

Vec random_normal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  return Vec::NullaryExpr(n, [&] { return nd(rng); });
}

Vec g_unit(const Mat& g, const Vec& v) { return v / std::sqrt(v.dot(g * v)); }

// -- symalg ---------------------------------------------------------------------------

Result cmd_symalg(const Context& ctx) {
  const Node& root = ctx.root;
  root.expect_keys({"id", "command", "seed", "tol", "geometry", "n", "curve", "u", "v", "c", "emit_basis"});
  Result r;
  r.tol = ctx.tol(linalg::kRankTolerance);
  Node geo = root.at("geometry");
  const std::string geometry = geo.string();
  Node nn = root.at("n");
  const long long n_ll = nn.integer();
  require(nn, n_ll >= 1 && n_ll <= 12, "n must be between 1 and 12");
  const int n = static_cast<int>(n_ll);
  std::mt19937_64 rng(ctx.seed);

  lie::SpecPtr spec;
  std::optional<lie::AlgebraElement> gen;
  lie::SymModel model{};
  lie::SymModelData data;
  int expected_sym = 0, expected_moduli = 0;
  std::string algebra;
  if (geometry == "conformal") {
    require(nn, n >= 2, "conformal geometry needs n >= 2");
    spec = lie::AlgebraSpec::conformal(n);
    algebra = "so(" + std::to_string(n + 1) + ",1)";
    const std::string curve = root.string_or("curve", "line");
    Vec u = root.has("u") ? root.at("u").vector(n) : random_normal(n, rng).normalized();
    if (root.has("u")) require(root.at("u"), std::abs(u.norm() - 1.0) < 1e-9, "u must be a unit vector");
    if (curve == "line") {
      gen = lie::conformal_line_generator(spec, u);
      model = lie::SymModel::ConfLine;
      data = {u.cast<Complex>(), {}, {}};
    } else if (curve == "circle") {
      Vec c;
      if (root.has("c")) {
        c = root.at("c").vector(n);
        require(root.at("c"), std::abs(c.dot(u)) < 1e-9, "c must be orthogonal to u");
      } else {
        c = random_normal(n, rng);
        c = (c - c.dot(u) * u).normalized();
      }
      gen = lie::conformal_circle_generator(spec, u, c);
      model = lie::SymModel::ConfCircle;
      data = {u.cast<Complex>(), {}, c.cast<Complex>()};
    } else {
      root.at("curve").fail("curve must be 'line' or 'circle'");
    }
    r.payload["curve"] = curve;
    expected_sym = (n - 1) * (n - 2) / 2 + 3;
    expected_moduli = 3 * (n - 1);
  } else if (geometry == "legendrean") {
    spec = lie::AlgebraSpec::contact_legendrean(n);
    algebra = "sl(" + std::to_string(n + 2) + ",R)";
    Vec u, v;
    if (root.has("u") || root.has("v")) {
      u = root.at("u").vector(n);
      v = root.at("v").vector(n);
      require(root.at("v"), std::abs(u.dot(v) - 1.0) < legendrean::kNormalizationTol, "u and v must pair to 1");
    } else {
      auto d = legendrean::random_direction<double>(n, rng);
      u = d.u;
      v = d.v;
    }
    gen = lie::legendrean_generator(spec, u, v);
    model = lie::SymModel::Legendrean;
    data = {u.cast<Complex>(), v.cast<Complex>(), {}};
    expected_sym = n * n - 2 * n + 4;
    expected_moduli = 6 * n - 1;
  } else if (geometry == "cr") {
    spec = lie::AlgebraSpec::cr(n);
    algebra = "su(" + std::to_string(n + 1) + ",1)";
    Eigen::VectorXcd u;
    if (root.has("u")) {
      u = root.at("u").complex_vector(n);
      require(root.at("u"), std::abs(u.norm() - 1.0) < 1e-9, "u must be a unit vector");
    } else {
      Vec re = random_normal(n, rng), im = random_normal(n, rng);
      u = (re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>()).normalized();
    }
    gen = lie::cr_generator(spec, u);
    model = lie::SymModel::CR;
    data = {u, {}, {}};
    expected_sym = n * n - 2 * n + 4;
    expected_moduli = 6 * n - 1;
  } else {
    geo.fail("geometry must be 'conformal', 'legendrean' or 'cr'");
  }

  auto f = lie::dkr_filtration(spec, *gen);
  auto check = lie::verify_sym_constraints(f.sym, model, data, r.tol);
  json chain = json::array();
  for (const auto& s : f.chain) chain.push_back(s.dim());
  auto& p = r.payload;
  p["geometry"] = geometry;
  p["n"] = n;
  p["algebra"] = algebra;
  p["dim_g"] = spec->dimension();
  p["dim_sym"] = f.sym.dim();
  p["moduli_dim"] = spec->dimension() - f.sym.dim();
  p["expected_sym_dim"] = expected_sym;
  p["expected_moduli_dim"] = expected_moduli;
  p["stable_index"] = f.stable_index;
  p["chain_dims"] = chain;
  p["constraints_ok"] = check.ok;
  p["max_constraint_residual"] = check.max_residual;
  if (root.boolean_or("emit_basis", true)) {
    json basis = json::array();
    const bool complex = spec->family() == lie::Family::SU;
    for (const auto& e : f.sym.basis()) basis.push_back(matrix_json(e.entries(), complex));
    p["sym_basis"] = basis;
  }
  r.pass = check.ok && f.sym.dim() == expected_sym && spec->dimension() - f.sym.dim() == expected_moduli;
  return r;
}

// -- integrate ------------------------------------------------------------------------

Result cmd_integrate(const Context& ctx) {
  const Node& root = ctx.root;
  root.expect_keys(
      {"id", "command", "seed", "tol", "metric", "kind", "x0", "u0", "c0", "length", "step", "normalize", "csv"});
  Result r;
  r.tol = ctx.tol(1e-5);
  ChartMetric m = parse_metric(root.at("metric"), ctx);
  const int n = m.n();
  require(root.at("metric"), n >= 3, "integrate needs a metric of dimension at least 3");
  Node kind_node = root.at("kind");
  const std::string kind = kind_node.string();
  require(kind_node, kind == "geodesic" || kind == "conformal_circle", "kind must be 'geodesic' or 'conformal_circle'");
  Vec x0 = root.at("x0").vector(n);
  Vec u0 = root.at("u0").vector(n);
  Vec c0 = root.has("c0") ? root.at("c0").vector(n) : Vec::Zero(n);
  require(root.at("x0"), m.domain().contains(x0), "x0 lies outside the metric's domain");
  const double length = root.at("length").number();
  require(root.at("length"), length > 0.0 && std::isfinite(length), "length must be positive");
  const double step = root.number_or("step", 1e-3);
  require(root, step > 0.0 && step <= length, "step must be positive and at most the length");
  if (root.boolean_or("normalize", false)) {
    Mat g = m.g(x0);
    require(root.at("u0"), u0.dot(g * u0) > 0.0, "u0 must be non-zero");
    u0 = g_unit(g, u0);
    c0 -= c0.dot(g * u0) * u0;
  }
  curves::IntegrateOptions io{step, false};
  curves::Trajectory tr;
  try {
    tr = kind == "geodesic" ? curves::geodesic_integrate(m, x0, u0, length, io)
                            : curves::conformal_circle_integrate(m, x0, u0, c0, length, io);
  } catch (const PreconditionError& e) {
    root.at("u0").fail(e.what());
  }
  auto& p = r.payload;
  p["metric"] = m.name();
  p["n"] = n;
  p["kind"] = kind;
  p["samples"] = tr.size();
  p["arc_length"] = tr.t.empty() ? 0.0 : tr.t.back();
  p["truncated"] = tr.truncated;
  p["truncation_reason"] = tr.truncation_reason;
  p["max_speed_drift"] = tr.stats.max_speed_drift;
  p["max_orth_drift"] = tr.stats.max_orth_drift;
  if (tr.size() < 3) throw NumericalBreakdown("trajectory has fewer than three samples");
  auto residual = curves::cc_residual(m, tr);
  if (!std::isfinite(residual.max_norm)) throw NumericalBreakdown("non-finite conformal-circle residual");
  p["max_residual"] = residual.max_norm;
  bool ok = !tr.truncated && residual.max_norm < r.tol;
  if (kind == "geodesic") {
    auto closure = tractor::closure_defect(m, tr);
    double cmax = closure.empty() ? 0.0 : *std::max_element(closure.begin(), closure.end());
    double emax = 0.0;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
      const auto& s = tr.states[i];
      Vec ec = curves::eigencheck(m, s.x, s.u);
      emax = std::max(emax, std::sqrt(ec.dot(m.g(s.x).inverse() * ec)));
    }
    p["closure_defect_max"] = cmax;
    p["eigencheck_max"] = emax;
    ok = ok && cmax < r.tol;
  }
  if (!ctx.opt->out_dir.empty() && root.boolean_or("csv", true)) {
    const std::string name = ctx.id + ".csv";
    fs::create_directories(ctx.opt->out_dir);
    std::ofstream out(fs::path(ctx.opt->out_dir) / name);
    if (!out) throw PreconditionError("cannot write " + name);
    curves::write_csv(out, tr, residual);
    p["csv"] = name;
  }
  r.pass = ok;
  return r;
}

// -- check ----------------------------------------------------------------------------

template <class Fixture, class Parse>
Fixture load_fixture_node(const Context& ctx, Parse parse) {
  const Node& root = ctx.root;
  require(root, root.has("fixture") != root.has("data"), "check needs exactly one of fixture, data");
  if (root.has("fixture")) return parse(jsonio::read_file(ctx.resolve(root.at("fixture").string())));
  root.at("data").expect_object();
  return parse(root.at("data").raw().dump());
}

json meta_json(const std::string& text) { return text.empty() ? json() : json::parse(text); }

Result check_riemannian(const Context& ctx) {
  const Node& root = ctx.root;
  Result r;
  ChartMetric m = parse_metric(root.at("metric"), ctx);
  const std::string test = root.string_or("test", "einstein");
  std::mt19937_64 rng(ctx.seed);
  auto& p = r.payload;
  p["metric"] = m.name();
  p["n"] = m.n();
  p["test"] = test;
  require(root.at("metric"), m.n() >= 3, "curvature checks need dimension at least 3");
  if (test == "einstein") {
    r.tol = ctx.tol(1e-7);
    long long count = root.integer_or("samples", 20);
    require(root, count >= 5 && count <= 10000, "samples must be between 5 and 10000");
    std::vector<Vec> pts;
    for (long long i = 0; i < count; ++i) pts.push_back(random_point(m, rng));
    auto e = riemann::einstein_check(m, pts, r.tol);
    p["is_einstein"] = e.is_einstein;
    p["lambda"] = e.lambda;
    p["max_deviation"] = e.max_deviation;
    p["lambda_variation"] = e.lambda_variation;
    p["samples"] = count;
    r.pass = e.is_einstein;
    if (root.has("expect_lambda")) r.pass = r.pass && std::abs(e.lambda - root.at("expect_lambda").number()) < r.tol;
  } else if (test == "closure") {
    r.tol = ctx.tol(1e-6);
    const double length = root.number_or("length", 0.3);
    const double step = root.number_or("step", 1e-3);
    require(root, length > 0.0 && step > 0.0 && step <= length, "length and step must be positive");
    std::vector<std::pair<Vec, Vec>> starts;
    if (root.has("x0")) {
      Vec x0 = root.at("x0").vector(m.n());
      require(root.at("x0"), m.domain().contains(x0), "x0 lies outside the metric's domain");
      starts.emplace_back(x0, g_unit(m.g(x0), root.at("u0").vector(m.n())));
    } else {
      long long count = root.integer_or("geodesics", 5);
      require(root, count >= 1 && count <= 1000, "geodesics must be between 1 and 1000");
      for (long long i = 0; i < count; ++i) {
        Vec x0 = random_point(m, rng);
        starts.emplace_back(x0, g_unit(m.g(x0), random_normal(m.n(), rng)));
      }
    }
    json runs = json::array();
    double worst = 0.0;
    for (const auto& [x0, u0] : starts) {
      auto tr = curves::geodesic_integrate(m, x0, u0, length, {step, false});
      if (tr.size() < 3) throw NumericalBreakdown("geodesic left the chart immediately");
      auto d = tractor::closure_defect(m, tr);
      double cmax = *std::max_element(d.begin(), d.end());
      double emax = 0.0;
      for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
        Vec ec = curves::eigencheck(m, tr.states[i].x, tr.states[i].u);
        emax = std::max(emax, std::sqrt(ec.dot(m.g(tr.states[i].x).inverse() * ec)));
      }
      worst = std::max(worst, cmax);
      runs.push_back({{"x0", vec_json(x0)}, {"u0", vec_json(u0)}, {"closure_defect_max", cmax},
                      {"eigencheck_max", emax}, {"truncated", tr.truncated}});
    }
    p["geodesics"] = runs;
    p["max_closure_defect"] = worst;
    r.pass = worst < r.tol;
  } else {
    root.at("test").fail("riemannian test must be 'einstein' or 'closure'");
  }
  return r;
}

Result check_legendrean(const Context& ctx) {
  const Node& root = ctx.root;
  Result r;
  r.tol = ctx.tol(legendrean::kDefaultTol);
  auto fx = load_fixture_node<legendrean::Fixture>(ctx, [](const std::string& t) { return legendrean::parse_fixture(t); });
  const std::string test = root.string_or("test", "einstein");
  auto& p = r.payload;
  p["n"] = fx.n;
  p["samples"] = fx.samples.size();
  p["test"] = test;
  p["curve_meta"] = meta_json(fx.curve_meta);
  if (test == "einstein") {
    auto e = legendrean::einstein_scale_check(fx.samples, r.tol);
    p["einstein_pass"] = e.pass;
    p["lambda"] = e.lambda;
    p["lambda_variation"] = e.lambda_variation;
    p["max_t"] = e.max_t;
    p["max_a"] = e.max_a;
    p["max_p_deviation"] = e.max_p_deviation;
    p["first_failure"] = e.first_failure;
    r.pass = e.pass;
    if (root.has("expect_lambda")) r.pass = r.pass && std::abs(e.lambda - root.at("expect_lambda").number()) < r.tol;
  } else if (test == "constraint") {
    legendrean::Direction d{root.at("u").vector(fx.n), root.at("v").vector(fx.n)};
    require(root.at("v"), std::abs(d.u.dot(d.v) - 1.0) <= legendrean::kNormalizationTol, "u and v must pair to 1");
    json per = json::array();
    bool all = true;
    for (const auto& s : fx.samples) {
      auto c = legendrean::constraint_check(s, d, r.tol);
      all = all && c.pass;
      per.push_back({{"pass", c.pass}, {"lambda", c.lambda}, {"k", c.k}, {"eigen_residual", c.eigen_residual}});
    }
    p["results"] = per;
    r.pass = all;
  } else if (test == "probe") {
    long long trials = root.integer_or("trials", 200);
    require(root, trials >= 1 && trials <= 100000, "trials must be between 1 and 100000");
    json per = json::array();
    bool all = true;
    for (std::size_t i = 0; i < fx.samples.size(); ++i) {
      auto pr = legendrean::corollary_equivalence_probe(fx.samples[i], static_cast<int>(trials), ctx.seed + i, r.tol);
      all = all && pr.consistent;
      per.push_back({{"consistent", pr.consistent}, {"einstein_pass", pr.einstein_pass},
                     {"witness_found", pr.witness_found}, {"witness_trial", pr.witness_trial},
                     {"trials_used", pr.trials_used}, {"false_witnesses", pr.false_witnesses}});
    }
    p["results"] = per;
    r.pass = all;
  } else {
    root.at("test").fail("legendrean test must be 'einstein', 'constraint' or 'probe'");
  }
  return r;
}

Result check_cr(const Context& ctx) {
  const Node& root = ctx.root;
  Result r;
  r.tol = ctx.tol(legendrean::kDefaultTol);
  auto fx = load_fixture_node<cr::Fixture>(ctx, [](const std::string& t) { return cr::parse_fixture(t); });
  const std::string test = root.string_or("test", "einstein");
  auto& p = r.payload;
  p["n"] = fx.n;
  p["samples"] = fx.samples.size();
  p["test"] = test;
  p["curve_meta"] = meta_json(fx.curve_meta);
  if (test == "einstein") {
    auto e = cr::cr_einstein_check(fx.samples, r.tol);
    p["einstein_pass"] = e.pass;
    p["lambda"] = e.lambda;
    p["lambda_imag"] = e.lambda_imag;
    p["lambda_variation"] = e.lambda_variation;
    p["max_t"] = e.max_t;
    p["max_a"] = e.max_a;
    p["max_p_deviation"] = e.max_p_deviation;
    r.pass = e.pass;
    if (root.has("expect_lambda")) r.pass = r.pass && std::abs(e.lambda - root.at("expect_lambda").number()) < r.tol;
  } else if (test == "constraint") {
    cr::Direction d{root.at("u").complex_vector(fx.n), root.at("v").complex_vector(fx.n)};
    json per = json::array();
    bool all = true;
    for (const auto& s : fx.samples) {
      Complex pair = (d.u.transpose() * s.h * d.v)(0, 0);
      require(root.at("v"), std::abs(pair - 1.0) <= legendrean::kNormalizationTol, "u and v must pair to 1 through h");
      auto c = cr::cr_constraint_check(s, d, r.tol);
      all = all && c.pass;
      per.push_back({{"pass", c.pass}, {"lambda", complex_json(c.lambda)}, {"k", complex_json(c.k)},
                     {"eigen_residual", c.eigen_residual}});
    }
    p["results"] = per;
    r.pass = all;
  } else if (test == "probe") {
    long long trials = root.integer_or("trials", 200);
    require(root, trials >= 1 && trials <= 100000, "trials must be between 1 and 100000");
    json per = json::array();
    bool all = true;
    for (std::size_t i = 0; i < fx.samples.size(); ++i) {
      auto pr = cr::corollary_equivalence_probe(fx.samples[i], static_cast<int>(trials), ctx.seed + i, r.tol);
      all = all && pr.consistent;
      per.push_back({{"consistent", pr.consistent}, {"einstein_pass", pr.einstein_pass},
                     {"witness_found", pr.witness_found}, {"witness_trial", pr.witness_trial},
                     {"trials_used", pr.trials_used}, {"false_witnesses", pr.false_witnesses}});
    }
    p["results"] = per;
    r.pass = all;
  } else if (test == "reality") {
    json per = json::array();
    double worst = 0.0;
    for (const auto& s : fx.samples) {
      auto rr = cr::reality_check(s);
      worst = std::max(worst, rr.max_residual);
      per.push_back({{"max_residual", rr.max_residual}, {"t_residual", rr.t_residual}, {"a_residual", rr.a_residual},
                     {"p_residual", rr.p_residual}, {"barred_stored", rr.barred_stored}});
    }
    p["results"] = per;
    p["max_residual"] = worst;
    r.pass = worst < r.tol;
  } else {
    root.at("test").fail("cr test must be 'einstein', 'constraint', 'probe' or 'reality'");
  }
  return r;
}

Result cmd_check(const Context& ctx) {
  const Node& root = ctx.root;
  root.expect_keys({"id", "command", "seed", "tol", "geometry", "test", "metric", "samples", "x0", "u0", "length",
                    "step", "geodesics", "fixture", "data", "u", "v", "trials", "expect_lambda"});
  Node geo = root.at("geometry");
  const std::string geometry = geo.string();
  Result r;
  if (geometry == "riemannian")
    r = check_riemannian(ctx);
  else if (geometry == "legendrean")
    r = check_legendrean(ctx);
  else if (geometry == "cr")
    r = check_cr(ctx);
  else
    geo.fail("geometry must be 'riemannian', 'legendrean' or 'cr'");
  r.payload["geometry"] = geometry;
  return r;
}

// -- suite ----------------------------------------------------------------------------

Result cmd_suite(const Context& ctx) {
  const Node& root = ctx.root;
  root.expect_keys({"id", "command", "seed", "tol", "fixtures", "criteria", "serial"});
  Result r;
  acceptance::Options opt;
  opt.seed = ctx.seed;
  opt.parallel = !root.boolean_or("serial", false);
  if (root.has("fixtures")) {
    Node fx = root.at("fixtures");
    fx.expect_object();
    fx.expect_keys({"d7", "homogeneous"});
    if (fx.has("d7")) opt.d7_fixture = ctx.resolve(fx.at("d7").string());
    if (fx.has("homogeneous")) opt.homogeneous_fixture = ctx.resolve(fx.at("homogeneous").string());
  }
  std::set<int> ids;
  if (root.has("criteria")) {
    Node list = root.at("criteria");
    list.expect_array();
    for (std::size_t i = 0; i < list.size(); ++i) {
      long long id = list.at(i).integer();
      require(list.at(i), id >= 1 && id <= acceptance::kCriterionCount, "unknown criterion");
      ids.insert(static_cast<int>(id));
    }
  } else {
    for (int id = 1; id <= acceptance::kCriterionCount; ++id) ids.insert(id);
  }
  std::vector<acceptance::Criterion> results;
  if (ids.size() == static_cast<std::size_t>(acceptance::kCriterionCount)) {
    results = acceptance::run_acceptance(opt);
  } else {
    for (int id : ids) results.push_back(acceptance::run_criterion(id, opt));
  }
  json scenarios = json::array();
  json skipped = json::array();
  bool all = true;
  for (const auto& c : results) {
    char name[32];
    std::snprintf(name, sizeof name, "criterion_%02d", c.id);
    json metrics = json::object();
    for (const auto& [k, v] : c.metrics) metrics[k] = v;
    scenarios.push_back({{"id", name}, {"title", c.title}, {"pass", c.pass}, {"detail", c.detail},
                         {"metrics", metrics}, {"skip_records", c.skip_records}});
    for (const auto& s : c.skip_records) skipped.push_back({{"scenario", name}, {"reason", s}});
    all = all && c.pass;
  }
  r.payload["scenarios"] = scenarios;
  r.payload["skipped"] = skipped;
  r.pass = all;
  return r;
}

// -- plumbing -------------------------------------------------------------------------

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 128 && std::all_of(id.begin(), id.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
  }) && id.front() != '.';
}

Outcome finish(json report, int code, const std::string& id, const RunOptions& opt) {
  report["exit_code"] = code;
  Outcome out{code, report.dump(2) + "\n", id};
  if (!opt.out_dir.empty() && !id.empty()) {
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    std::ofstream f(fs::path(opt.out_dir) / (id + ".json"));
    if (f) f << out.report;
  }
  return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Outcome run(std::string_view command, const std::string& config_text, const RunOptions& opt) {
  json report;
  report["command"] = std::string(command);
  report["version"] = kVersion;
  report["config_hash"] = hex64(fnv1a64(config_text));
  std::string id;
  auto error = [&](const char* kind, const std::string& message, int line, int code) {
    report["pass"] = false;
    json err = {{"kind", kind}, {"message", message}};
    if (line > 0) err["line"] = line;
    report["error"] = err;
    return finish(report, code, id, opt);
  };
  try {
    auto doc = jsonio::parse(config_text.empty() ? std::string("{}") : config_text);
    Context ctx{Node::root(doc), std::string(command), "", 0, &opt};
    ctx.root.expect_object();
    // hash the canonical form so formatting and key order do not matter
    report["config_hash"] = hex64(fnv1a64(doc->value.dump()));
    id = ctx.root.string_or("id", std::string(command));
    if (!valid_id(id)) {
      std::string bad = id;
      id.clear();
      ctx.root.at("id").fail("id '" + bad + "' must use letters, digits, '_', '-' or '.'");
    }
    ctx.id = id;
    report["id"] = id;
    if (ctx.root.has("command"))
      require(ctx.root.at("command"), ctx.root.at("command").string() == command, "config is for another command");
    ctx.seed = opt.seed ? *opt.seed : (ctx.root.has("seed") ? ctx.root.at("seed").unsigned_integer() : 0ULL);
    report["seed"] = ctx.seed;
    if (opt.tol && !(*opt.tol > 0.0)) throw PreconditionError("--tol must be positive");
    if (ctx.root.has("tol")) require(ctx.root.at("tol"), ctx.root.at("tol").number() > 0.0, "tol must be positive");

    Result r;
    if (command == "symalg")
      r = cmd_symalg(ctx);
    else if (command == "integrate")
      r = cmd_integrate(ctx);
    else if (command == "check")
      r = cmd_check(ctx);
    else if (command == "suite")
      r = cmd_suite(ctx);
    else
      throw PreconditionError("unknown command '" + std::string(command) + "'");
    report["pass"] = r.pass;
    report["payload"] = r.payload;
    if (command != "suite") report["tol"] = r.tol;
    return finish(report, r.pass ? kPass : kCheckFailure, id, opt);
  } catch (const SchemaError& e) {
    return error("schema", e.what(), e.line(), kConfigError);
  } catch (const NumericalBreakdown& e) {
    return error("numerical", e.what(), 0, kNumericalBreakdown);
  } catch (const SingularMetricError& e) {
    return error("numerical", e.what(), 0, kNumericalBreakdown);
  } catch (const DegenerateSamplingError& e) {
    return error("numerical", e.what(), 0, kNumericalBreakdown);
  } catch (const Error& e) {
    return error("precondition", e.what(), 0, kConfigError);
  } catch (const json::exception& e) {
    return error("schema", e.what(), 0, kConfigError);
  } catch (const std::exception& e) {
    return error("internal", e.what(), 0, kNumericalBreakdown);
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Distinguished curves in parabolic geometries: symmetry algebras, integrators and curvature checks"};
  std::string command, config, out_dir;
  std::uint64_t seed = 0;
  double tol = 0.0;
  app.add_option("command", command, "symalg | integrate | check | suite")
      ->required()
      ->check(CLI::IsMember({"symalg", "integrate", "check", "suite"}));
  app.add_option("--config", config, "scenario config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed, overrides the config");
  auto* tol_opt = app.add_option("--tol", tol, "tolerance, overrides the config");
  app.add_option("--out", out_dir, "directory for reports and CSV files");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  RunOptions opt;
  if (*seed_opt) opt.seed = seed;
  if (*tol_opt) opt.tol = tol;
  opt.out_dir = out_dir;
  std::string text;
  if (!config.empty()) {
    try {
      text = jsonio::read_file(config);
    } catch (const SchemaError& e) {
      std::cerr << e.what() << "\n";
      return kConfigError;
    }
    opt.base_dir = fs::path(config).parent_path().string();
  } else if (command != "suite") {
    std::cerr << command << " needs --config\n";
    return kConfigError;
  }
  Outcome o = run(command, text, opt);
  std::cout << o.report;
  return o.exit_code;
}

}  // namespace paracurves::cli
