#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "tlreflect/jobrunner.hpp"

namespace py = pybind11;
using namespace tlr;

namespace {

using PyMatrix = std::vector<std::vector<cplx>>;

PyMatrix to_py(const CMatrix& m) {
  PyMatrix out(m.rows(), std::vector<cplx>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

CMatrix from_py(const PyMatrix& rows) {
  if (rows.empty()) return {};
  CMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw Error(ErrorCode::ShapeMismatch, "ragged matrix");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

ModelSpec make_spec(std::size_t n, const std::vector<cplx>& lambdas,
                    const std::vector<long>& exponents,
                    const std::string& branch,
                    const std::optional<std::vector<cplx>>& v,
                    const std::optional<std::vector<cplx>>& w) {
  ModelSpec spec;
  spec.n = n;
  spec.lambdas = lambdas;
  spec.exponents = exponents;
  if (branch == "plus") {
    spec.branch = Branch::Plus;
  } else if (branch == "minus") {
    spec.branch = Branch::Minus;
  } else {
    throw Error(ErrorCode::ConfigInvalid, "branch must be plus or minus");
  }
  if (v && w) spec.vw = {*v, *w};
  spec.validate();
  return spec;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Temperley-Lieb / reflection-equation verification workbench";
  m.attr("__version__") = std::string(kToolVersion);

  py::register_exception<Error>(m, "TlrError");

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init(&make_spec), py::arg("n"), py::arg("lambdas"),
           py::arg("exponents"), py::arg("branch") = "plus",
           py::arg("v") = std::nullopt, py::arg("w") = std::nullopt)
      .def_static("fourier", [](std::size_t n, const std::string& branch) {
        return ModelSpec::fourier(
            n, branch == "minus" ? Branch::Minus : Branch::Plus);
      }, py::arg("n"), py::arg("branch") = "plus")
      .def_readonly("n", &ModelSpec::n)
      .def_readonly("lambdas", &ModelSpec::lambdas)
      .def_readonly("exponents", &ModelSpec::exponents);

  py::class_<TLData>(m, "TLData")
      .def_property_readonly("q", [](const TLData& d) { return d.q; })
      .def_property_readonly("qprime", [](const TLData& d) { return d.qprime; })
      .def_property_readonly("omega",
                             [](const TLData& d) { return to_py(d.omega); })
      .def_property_readonly("t_gen",
                             [](const TLData& d) { return to_py(d.t_gen); })
      .def_property_readonly("x_gen",
                             [](const TLData& d) { return to_py(d.x_gen); });

  m.def("fourier_matrix",
        [](std::size_t n) { return to_py(fourier_matrix(n)); }, py::arg("n"));
  m.def("solve_qprime", [](std::size_t n, const std::string& branch) {
    return solve_qprime(n, branch == "minus" ? Branch::Minus : Branch::Plus);
  }, py::arg("n"), py::arg("branch") = "plus");

  m.def("is_generalized_hadamard", [](const PyMatrix& u) {
    const HadamardVerdict verdict = is_generalized_hadamard(from_py(u));
    return py::make_tuple(verdict.passes, verdict.residual);
  }, py::arg("u"));

  m.def("build_tl_data", [](const ModelSpec& spec) {
    return build_tl_data(spec);
  }, py::arg("spec"));

  m.def("tl_residuals", [](const TLData& data) {
    const TLCheckReport report = tl_check(data);
    return py::make_tuple(report.idempotent, report.braid_left,
                          report.braid_right);
  }, py::arg("data"));

  m.def("ybe_residual", [](const TLData& data) { return ybe_residual(data); },
        py::arg("data"));

  m.def("build_R", [](const TLData& data) { return to_py(build_R(data)); },
        py::arg("data"));

  m.def("reflection_residual", [](const PyMatrix& r, const PyMatrix& k) {
    return reflection_residual(from_py(r), from_py(k));
  }, py::arg("r"), py::arg("k"));

  m.def("algebraic_residual",
        [](const TLData& data, const PyMatrix& k, std::size_t r) {
          return algebraic_residual(data, from_py(k), r);
        },
        py::arg("data"), py::arg("k"), py::arg("r"));

  m.def("moduli_dim", [](const std::string& kind, std::size_t size,
                         std::size_t rank) {
    BlockKind k;
    if (kind == "nilpotent") {
      k = BlockKind::Nilpotent;
    } else if (kind == "involution") {
      k = BlockKind::Involution;
    } else if (kind == "two_eigen") {
      k = BlockKind::TwoEigen;
    } else {
      throw Error(ErrorCode::ConfigInvalid, "unknown block kind " + kind);
    }
    return moduli_dim(k, size, rank);
  }, py::arg("kind"), py::arg("size"), py::arg("rank"));

  m.def("run_job", [](const std::string& config_json) {
    const JobConfig config = parse_config(nlohmann::json::parse(config_json));
    const RunResult result = run_job(config);
    return py::make_tuple(result.all_pass, result.report.dump(2));
  }, py::arg("config_json"),
     "Run a job from a JSON string; returns (all_pass, report_json)");
}
