#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hball/error.hpp"
#include "hball/experiments.hpp"

namespace py = pybind11;
using namespace hball;

namespace {

std::string branch_name(int n, double alpha) {
  return coefficient_branch(Dimension(n), alpha) == Branch::upper ? "upper" : "lower";
}

py::dict fit_to_dict(const RegimeFit& f) {
  py::dict d;
  d["n"] = f.n;
  d["p"] = f.p;
  d["alpha"] = f.alpha;
  d["d"] = f.d;
  d["w"] = f.w;
  d["slope"] = f.slope;
  d["residual"] = f.residual;
  d["verdict"] = to_string(f.verdict);
  d["flat"] = f.flat;
  d["radii"] = f.radii;
  d["integrals"] = f.integrals;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hball, m) {
  m.doc() = "Reproducing kernels and weighted harmonic function spaces on the unit ball";

  py::register_exception<NonConvergent>(m, "NonConvergent", PyExc_RuntimeError);
  py::register_exception<AdmissibilityError>(m, "AdmissibilityError", PyExc_ValueError);
  py::register_exception<UnsupportedPair>(m, "UnsupportedPair", PyExc_ValueError);

  m.def("gamma_coeff", [](int n, double alpha, std::uint64_t k) { return gamma_coeff(Dimension(n), alpha, k).value; },
        py::arg("n"), py::arg("alpha"), py::arg("k"));
  m.def("gamma_ratio", [](int n, double s, double t, std::uint64_t k) { return gamma_ratio(Dimension(n), s, t, k); },
        py::arg("n"), py::arg("s"), py::arg("t"), py::arg("k"));
  m.def("coefficient_branch", &branch_name, py::arg("n"), py::arg("alpha"));
  m.def("dim_spherical_harmonics", [](int n, std::uint64_t k) { return dim_spherical_harmonics(Dimension(n), k); });
  m.def("gegenbauer", &gegenbauer, py::arg("lam"), py::arg("k"), py::arg("u"));
  m.def("zonal", [](int n, unsigned k, const Point& x, const Point& y) { return zonal(Dimension(n), k, x, y); },
        py::arg("n"), py::arg("k"), py::arg("x"), py::arg("y"));
  m.def("weight_constant", [](int n, double alpha) { return weight_constant(Dimension(n), alpha).value; });

  m.def(
      "kernel_eval",
      [](int n, double alpha, const Point& x, const Point& y, double tol) {
        const KernelEval e = kernel_eval(Dimension(n), alpha, x, y, tol);
        return py::make_tuple(e.value, e.degree_used, e.tail_bound);
      },
      py::arg("n"), py::arg("alpha"), py::arg("x"), py::arg("y"), py::arg("tol") = 1e-12,
      "R_alpha(x, y) as (value, degree, tail bound).");

  m.def(
      "gauss_jacobi",
      [](std::size_t m_, double a, double b) {
        const Rule1D r = gauss_jacobi(m_, a, b);
        return py::make_tuple(r.nodes, r.weights);
      },
      py::arg("m"), py::arg("a"), py::arg("b"));

  m.def(
      "membership_kernel_atom",
      [](int n, double p, double s, double beta) { return to_string(membership_kernel_atom(Dimension(n), p, s, beta)); },
      py::arg("n"), py::arg("p"), py::arg("s"), py::arg("beta"));

  m.def("growth_exponent", [](int n, double p, double alpha, double d) { return growth_exponent(Dimension(n), p, alpha, d); });
  m.def(
      "fit_kernel_growth",
      [](int n, double p, double alpha, double d, int j_first, int j_last) {
        GrowthOptions o;
        o.j_first = j_first;
        o.j_last = j_last;
        return fit_to_dict(fit_kernel_growth(Dimension(n), p, alpha, d, o));
      },
      py::arg("n"), py::arg("p"), py::arg("alpha"), py::arg("d"), py::arg("j_first") = 3, py::arg("j_last") = 12);

  m.def(
      "run_experiment_json",
      [](const std::string& id, const std::string& config) {
        ExperimentReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment(id, ExperimentConfig::parse(Json::parse(config)));
        }
        return r.to_json().dump();
      },
      py::arg("id"), py::arg("config"));
}
