#include "paracurves/legendrean.hpp"

#include "json_util.hpp"

namespace paracurves::legendrean {

std::vector<std::pair<std::string, Sample>> single_violation_battery(int n, double magnitude) {
  if (n < 1) throw PreconditionError("battery rank must be positive");
  std::vector<std::pair<std::string, Sample>> out;
  auto tag = [](const char* name, int i, int j) {
    return std::string(name) + "[" + std::to_string(i) + "]" + (j >= 0 ? "[" + std::to_string(j) + "]" : "");
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // a single diagonal entry is only a violation when it breaks P = λδ
      if (i == j && n == 1) continue;
      Sample s = Sample::zero(n);
      s.p(i, j) = magnitude;
      out.emplace_back(tag("P", i, j), s);
    }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Sample lo = Sample::zero(n), hi = Sample::zero(n);
      lo.a_lo(i, j) = lo.a_lo(j, i) = magnitude;
      hi.a_hi(i, j) = hi.a_hi(j, i) = magnitude;
      out.emplace_back(tag("A_lo", i, j), lo);
      out.emplace_back(tag("A_hi", i, j), hi);
    }
  for (int i = 0; i < n; ++i) {
    Sample lo = Sample::zero(n), hi = Sample::zero(n);
    lo.t_lo(i) = magnitude;
    hi.t_hi(i) = magnitude;
    out.emplace_back(tag("T_lo", i, -1), lo);
    out.emplace_back(tag("T_hi", i, -1), hi);
  }
  return out;
}

Sample einstein_sample(int n, double lambda) {
  Sample s = Sample::zero(n);
  s.p = lambda * Eigen::MatrixXd::Identity(n, n);
  return s;
}

namespace {

void require_symmetric(const jsonio::Node& node, const Eigen::MatrixXd& a, const char* name) {
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) node.fail(std::string(name) + " must be symmetric");
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
  if (n < 1 || n > 64) nn.fail("n must be between 1 and 64");
  out.n = static_cast<int>(n);
  jsonio::Node samples = root.at("samples");
  samples.expect_array();
  if (samples.size() == 0) samples.fail("samples must not be empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    jsonio::Node s = samples.at(i);
    s.expect_object();
    s.expect_keys({"P", "A_lo", "A_hi", "T_lo", "T_hi"});
    Sample sample;
    sample.n = out.n;
    sample.p = s.at("P").matrix(out.n, out.n);
    sample.a_lo = s.at("A_lo").matrix(out.n, out.n);
    sample.a_hi = s.at("A_hi").matrix(out.n, out.n);
    sample.t_lo = s.at("T_lo").vector(out.n);
    sample.t_hi = s.at("T_hi").vector(out.n);
    require_symmetric(s.at("A_lo"), sample.a_lo, "A_lo");
    require_symmetric(s.at("A_hi"), sample.a_hi, "A_hi");
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

}  // namespace paracurves::legendrean
