#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "gramsos/bench.hpp"
#include "gramsos/error.hpp"
#include "gramsos/pipeline.hpp"

namespace py = pybind11;
using namespace gramsos;

namespace {

Polynomial poly_from_str(const std::string& text, std::optional<int> nvars) {
  return parse_polynomial(text, nvars);
}

std::vector<std::string> basis_strings(const MonomialBasis& basis) {
  std::vector<std::string> out;
  out.reserve(basis.monomials.size());
  for (const auto& m : basis.monomials) out.push_back(to_string(m));
  return out;
}

py::dict outcome_to_dict(const SosOutcome& out) {
  py::dict d;
  d["exact"] = out.exact;
  d["basis_size"] = out.basis.size();
  d["constraints"] = out.constraint_count;
  d["solver_rel_err"] = out.solve_result.rel_err;
  d["solver_iterations"] = out.solve_result.iterations;
  d["solver_rank"] = out.solve_result.rank;
  d["theta"] = out.refine_result.theta;
  d["gn_iterations"] = out.refine_result.gn_iterations;
  if (out.exact) {
    d["squares"] = int(out.certificate.squares.size());
    d["denom_bound"] = out.denom_bound_used;
    d["certificate_json"] = certificate_to_json(out.certificate);
  } else {
    d["failure_stage"] = out.failure_stage;
    d["diagnostic"] = out.diagnostic;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Minimum-rank Gram matrix completion and exact rational "
      "sum-of-squares certificates";

  py::register_exception<Error>(m, "GramsosError", PyExc_ValueError);

  py::class_<Polynomial>(m, "Polynomial")
      .def(py::init(&poly_from_str), py::arg("text"),
           py::arg("nvars") = std::nullopt,
           "Parse from text like '3/2*x1^2*x2 - x3 + 1'.")
      .def_property_readonly("nvars", &Polynomial::nvars)
      .def_property_readonly("degree", &Polynomial::degree)
      .def_property_readonly("term_count", &Polynomial::term_count)
      .def("__str__",
           [](const Polynomial& f) { return to_string(f); })
      .def("__repr__",
           [](const Polynomial& f) {
             return "Polynomial(\"" + to_string(f) + "\")";
           })
      .def("__eq__", &Polynomial::operator==)
      .def("__add__", &Polynomial::operator+)
      .def("__sub__",
           [](const Polynomial& a, const Polynomial& b) { return a - b; })
      .def("__mul__", &Polynomial::operator*)
      .def(
          "eval",
          [](const Polynomial& f, const std::vector<std::string>& point) {
            std::vector<Rational> pt;
            pt.reserve(point.size());
            for (const auto& s : point) pt.push_back(rational_from_string(s));
            return to_string(f.eval(pt));
          },
          py::arg("point"),
          "Exact evaluation; coordinates and result are rational strings.");

  m.def(
      "expand_square_sum",
      [](const std::vector<Polynomial>& factors) {
        return expand_square_sum(factors);
      },
      py::arg("factors"), "Sum of squares of the factors, expanded exactly.");

  py::class_<MonomialBasis>(m, "MonomialBasis")
      .def_property_readonly("size", &MonomialBasis::size)
      .def_readonly("nvars", &MonomialBasis::nvars)
      .def_readonly("max_degree", &MonomialBasis::max_degree)
      .def_property_readonly("monomials", &basis_strings)
      .def("__repr__", [](const MonomialBasis& b) {
        return "<MonomialBasis n=" + std::to_string(b.size()) + ">";
      });

  m.def(
      "build_basis",
      [](const Polynomial& f, bool homogeneous) {
        return build_basis(
            f, homogeneous ? BasisKind::Homogeneous : BasisKind::Degree);
      },
      py::arg("f"), py::arg("homogeneous") = false);

  py::class_<ConstraintSystem>(m, "ConstraintSystem")
      .def_readonly("n", &ConstraintSystem::n)
      .def_property_readonly("p", &ConstraintSystem::p)
      .def_readonly("b", &ConstraintSystem::b)
      .def("apply_map", &apply_map, py::arg("w"))
      .def("apply_adjoint", &apply_adjoint, py::arg("y"))
      .def("op_norm_sq", &op_norm_sq)
      .def("to_json", &constraints_to_json)
      .def("__repr__", [](const ConstraintSystem& cs) {
        return "<ConstraintSystem n=" + std::to_string(cs.n) +
               " p=" + std::to_string(cs.p()) + ">";
      });

  m.def("build_constraints", &build_constraints, py::arg("f"),
        py::arg("basis"));
  m.def("constraints_from_json", &constraints_from_json, py::arg("text"));

  py::enum_<Variant>(m, "Variant")
      .value("MFPC", Variant::Mfpc)
      .value("MFPC_BB", Variant::MfpcBb)
      .value("AFPC_BB", Variant::AfpcBb);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("variant", &SolverConfig::variant)
      .def_readwrite("mu_bar", &SolverConfig::mu_bar)
      .def_readwrite("mu_1", &SolverConfig::mu_1)
      .def_readwrite("eta", &SolverConfig::eta)
      .def_readwrite("continuation", &SolverConfig::continuation)
      .def_readwrite("tau_fixed", &SolverConfig::tau_fixed)
      .def_readwrite("tau_min", &SolverConfig::tau_min)
      .def_readwrite("tau_max", &SolverConfig::tau_max)
      .def_readwrite("epsilon", &SolverConfig::epsilon)
      .def_readwrite("eps_rank", &SolverConfig::eps_rank)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_readwrite("xtol", &SolverConfig::xtol)
      .def_readwrite("stage_xtol", &SolverConfig::stage_xtol);

  py::class_<HistoryRow>(m, "HistoryRow")
      .def_readonly("iter", &HistoryRow::iter)
      .def_readonly("mu", &HistoryRow::mu)
      .def_readonly("tau", &HistoryRow::tau)
      .def_readonly("s_k", &HistoryRow::s_k)
      .def_readonly("rel_err", &HistoryRow::rel_err)
      .def_readonly("objective", &HistoryRow::objective)
      .def_readonly("rank", &HistoryRow::rank);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("w", &SolveResult::w)
      .def_readonly("rel_err", &SolveResult::rel_err)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("rank", &SolveResult::rank)
      .def_readonly("converged", &SolveResult::converged)
      .def_readonly("fixed_point_residual", &SolveResult::fixed_point_residual)
      .def_readonly("history", &SolveResult::history)
      .def("__repr__", [](const SolveResult& r) {
        return "<SolveResult rel_err=" + std::to_string(r.rel_err) +
               " rank=" + std::to_string(r.rank) +
               " iterations=" + std::to_string(r.iterations) + ">";
      });

  m.def("solve", &solve, py::arg("cs"), py::arg("config") = SolverConfig());

  m.def(
      "threshold",
      [](const Matrix& w, double nu) { return threshold(w, nu); },
      py::arg("w"), py::arg("nu"),
      "Eigenvalue soft-threshold: keeps (lambda_i - nu)+ on the spectrum.");
  m.def("nuclear_norm", &nuclear_norm, py::arg("w"));
  m.def("freedom_ratio", &freedom_ratio, py::arg("n"), py::arg("r"),
        py::arg("p"));

  py::class_<BenchInstance>(m, "BenchInstance")
      .def_readonly("n", &BenchInstance::n)
      .def_readonly("r", &BenchInstance::r)
      .def_readonly("seed", &BenchInstance::seed)
      .def_readonly("f", &BenchInstance::f)
      .def_readonly("cs", &BenchInstance::cs)
      .def_readonly("fr", &BenchInstance::fr)
      .def_property_readonly(
          "w_true", [](const BenchInstance& b) { return b.w_true.to_double(); })
      .def("__repr__", [](const BenchInstance& b) {
        return "<BenchInstance n=" + std::to_string(b.n) +
               " r=" + std::to_string(b.r) + " p=" + std::to_string(b.cs.p()) +
               ">";
      });

  m.def("random_instance", &random_instance, py::arg("n"), py::arg("r"),
        py::arg("seed"), py::arg("entry_bound") = 5,
        py::arg("sparse_basis") = false);

  m.def(
      "sos_certificate",
      [](const Polynomial& f, const SolverConfig& config,
         std::optional<int> rank, unsigned denom_bits, bool approx_ok) {
        SosOptions options;
        options.solver = config;
        options.rank = rank;
        options.denom_bound = Integer(1) << denom_bits;
        options.approx_ok = approx_ok;
        return outcome_to_dict(sos_pipeline(f, options));
      },
      py::arg("f"), py::arg("config") = SolverConfig(),
      py::arg("rank") = std::nullopt, py::arg("denom_bits") = 32u,
      py::arg("approx_ok") = false,
      "Full pipeline from polynomial to exact certificate; returns a dict.");

  m.def(
      "verify_certificate",
      [](const Polynomial& f, const std::string& cert_json) {
        SosCertificate cert = certificate_from_json(cert_json);
        Polynomial g = f;
        if (g.nvars() < cert.basis.nvars) {
          // Pad the exponent vectors up to the certificate's space.
          Polynomial wider(cert.basis.nvars);
          for (const auto& [mono, c] : f.terms()) {
            std::vector<int> e = mono.exponents;
            e.resize(cert.basis.nvars, 0);
            wider.add_term(Monomial(std::move(e)), c);
          }
          g = std::move(wider);
        }
        std::string diagnostic;
        const bool ok = verify_certificate(g, cert, &diagnostic);
        return py::make_tuple(ok, diagnostic);
      },
      py::arg("f"), py::arg("certificate_json"),
      "Re-run all exact checks; returns (ok, diagnostic).");
}
