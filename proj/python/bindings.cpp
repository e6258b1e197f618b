#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "paracurves/acceptance.hpp"
#include "paracurves/cli.hpp"
#include "paracurves/cr.hpp"
#include "paracurves/curves.hpp"
#include "paracurves/errors.hpp"
#include "paracurves/legendrean.hpp"
#include "paracurves/riemann.hpp"
#include "paracurves/tractor.hpp"

namespace py = pybind11;
using namespace paracurves;
using riemann::ChartMetric;
using riemann::Mat;
using riemann::Vec;

namespace {

py::dict trajectory_dict(const ChartMetric& m, const curves::Trajectory& tr, bool closure) {
  const auto rows = static_cast<Eigen::Index>(tr.size());
  Mat x(rows, m.n()), u(rows, m.n()), c(rows, m.n());
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& s = tr.states[static_cast<std::size_t>(i)];
    x.row(i) = s.x.transpose();
    u.row(i) = s.u.transpose();
    c.row(i) = s.c.transpose();
  }
  py::dict d;
  d["t"] = tr.t;
  d["x"] = x;
  d["u"] = u;
  d["c"] = c;
  d["truncated"] = tr.truncated;
  d["truncation_reason"] = tr.truncation_reason;
  d["max_speed_drift"] = tr.stats.max_speed_drift;
  if (tr.size() >= 3) {
    auto r = curves::cc_residual(m, tr);
    d["residual_t"] = r.t;
    d["residual_norm"] = r.norm;
    d["max_residual"] = r.max_norm;
    if (closure) d["closure_defect"] = tractor::closure_defect(m, tr);
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_paracurves, mod) {
  mod.doc() = "Distinguished curves in parabolic geometries";
  mod.attr("__version__") = cli::kVersion;

  // translators run newest first, so the base class goes in first
  auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<SchemaError>(mod, "SchemaError", base.ptr());
  py::register_exception<PreconditionError>(mod, "PreconditionError", base.ptr());
  py::register_exception<DomainError>(mod, "DomainError", base.ptr());
  py::register_exception<NumericalBreakdown>(mod, "NumericalBreakdown", base.ptr());

  py::class_<ChartMetric>(mod, "Metric")
      .def_static("catalog", &riemann::catalog_metric, py::arg("name"), py::arg("n"))
      .def_static("from_json", &riemann::polynomial_metric_from_json, py::arg("text"))
      .def_property_readonly("name", &ChartMetric::name)
      .def_property_readonly("n", &ChartMetric::n)
      .def("g", &ChartMetric::g, py::arg("x"))
      .def("contains", [](const ChartMetric& m, const Vec& x) { return m.domain().contains(x); })
      .def("schouten", [](const ChartMetric& m, const Vec& x) { return riemann::curvature(m, x).schouten; })
      .def("ricci", [](const ChartMetric& m, const Vec& x) { return riemann::curvature(m, x).ricci; });

  mod.def("catalog_names", &riemann::catalog_names);

  mod.def(
      "einstein_check",
      [](const ChartMetric& m, const std::vector<Vec>& points, double tol) {
        auto r = riemann::einstein_check(m, points, tol);
        py::dict d;
        d["is_einstein"] = r.is_einstein;
        d["lambda"] = r.lambda;
        d["max_deviation"] = r.max_deviation;
        d["lambda_variation"] = r.lambda_variation;
        return d;
      },
      py::arg("metric"), py::arg("points"), py::arg("tol") = 1e-7);

  mod.def(
      "geodesic",
      [](const ChartMetric& m, const Vec& x0, const Vec& u0, double length, double step) {
        return trajectory_dict(m, curves::geodesic_integrate(m, x0, u0, length, {step, false}), true);
      },
      py::arg("metric"), py::arg("x0"), py::arg("u0"), py::arg("length"), py::arg("step") = 1e-3);

  mod.def(
      "conformal_circle",
      [](const ChartMetric& m, const Vec& x0, const Vec& u0, const Vec& c0, double length, double step) {
        return trajectory_dict(m, curves::conformal_circle_integrate(m, x0, u0, c0, length, {step, false}), false);
      },
      py::arg("metric"), py::arg("x0"), py::arg("u0"), py::arg("c0"), py::arg("length"), py::arg("step") = 1e-3);

  mod.def(
      "legendrean_einstein",
      [](const std::string& fixture_json, double tol) {
        auto fx = legendrean::parse_fixture(fixture_json);
        auto r = legendrean::einstein_scale_check(fx.samples, tol);
        py::dict d;
        d["pass"] = r.pass;
        d["lambda"] = r.lambda;
        d["max_t"] = r.max_t;
        d["max_a"] = r.max_a;
        d["max_p_deviation"] = r.max_p_deviation;
        d["first_failure"] = r.first_failure;
        return d;
      },
      py::arg("fixture_json"), py::arg("tol") = legendrean::kDefaultTol);

  mod.def(
      "cr_einstein",
      [](const std::string& fixture_json, double tol) {
        auto fx = cr::parse_fixture(fixture_json);
        auto r = cr::cr_einstein_check(fx.samples, tol);
        py::dict d;
        d["pass"] = r.pass;
        d["lambda"] = r.lambda;
        d["lambda_imag"] = r.lambda_imag;
        d["max_t"] = r.max_t;
        d["max_a"] = r.max_a;
        d["max_p_deviation"] = r.max_p_deviation;
        return d;
      },
      py::arg("fixture_json"), py::arg("tol") = legendrean::kDefaultTol);

  mod.def(
      "run_command",
      [](const std::string& command, const std::string& config, std::optional<std::uint64_t> seed,
         std::optional<double> tol, const std::string& out_dir, const std::string& base_dir) {
        cli::RunOptions opt{seed, tol, out_dir, base_dir};
        cli::Outcome o;
        {
          py::gil_scoped_release release;
          o = cli::run(command, config, opt);
        }
        return py::make_tuple(o.exit_code, o.report);
      },
      py::arg("command"), py::arg("config"), py::arg("seed") = py::none(), py::arg("tol") = py::none(),
      py::arg("out_dir") = "", py::arg("base_dir") = "");

  mod.def(
      "run_acceptance",
      [](std::uint64_t seed, std::vector<int> ids) {
        acceptance::Options opt;
        opt.seed = seed;
        std::vector<acceptance::Criterion> res;
        {
          py::gil_scoped_release release;
          if (ids.empty())
            res = acceptance::run_acceptance(opt);
          else
            for (int id : ids) res.push_back(acceptance::run_criterion(id, opt));
        }
        py::list out;
        for (const auto& c : res) {
          py::dict d;
          d["id"] = c.id;
          d["title"] = c.title;
          d["pass"] = c.pass;
          d["detail"] = c.detail;
          d["metrics"] = c.metrics;
          d["skip_records"] = c.skip_records;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1, py::arg("criteria") = std::vector<int>{});
}
