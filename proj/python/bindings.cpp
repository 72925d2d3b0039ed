#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "treekz/ensemble.hpp"
#include "treekz/experiment.hpp"
#include "treekz/oracles.hpp"
#include "treekz/problem_io.hpp"
#include "treekz/robustness.hpp"
#include "treekz/solver.hpp"

namespace py = pybind11;
using namespace treekz;

namespace {

// Edges given as (parent, child) or (parent, child, weight) on dense indices.
TreeTopology tree_from_edges(std::size_t node_count, std::size_t root, const std::vector<py::tuple>& edges) {
  TreeSpec spec{node_count, node(root), {}, {}};
  for (const auto& e : edges) {
    if (e.size() < 2 || e.size() > 3) throw py::value_error("edges are (parent, child[, weight]) tuples");
    Edge edge{node(e[0].cast<std::size_t>()), node(e[1].cast<std::size_t>()), std::nullopt};
    if (e.size() == 3) edge.weight = e[2].cast<double>();
    spec.edges.push_back(edge);
  }
  return TreeTopology::build(spec);
}

std::vector<std::size_t> indices(std::span<const NodeId> ids) {
  std::vector<std::size_t> out;
  for (NodeId v : ids) out.push_back(v.index());
  return out;
}

}  // namespace

PYBIND11_MODULE(_treekz, m) {
  m.doc() = "Distributed Kaczmarz iteration on trees";

  static py::exception<Error> error(m, "TreekzError");
  static py::exception<ValidationError> validation(m, "ValidationError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      std::string msg = e.what();
      for (const auto& v : e.violations()) msg += "\n  " + std::string(to_string(v.code)) + ": " + v.message;
      py::set_error(validation, msg.c_str());
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<TreeTopology>(m, "Tree")
      .def(py::init(&tree_from_edges), py::arg("node_count"), py::arg("root"), py::arg("edges"))
      .def_static("chain", &TreeTopology::chain)
      .def_static("star", &TreeTopology::star)
      .def_property_readonly("node_count", &TreeTopology::node_count)
      .def_property_readonly("root", [](const TreeTopology& t) { return t.root().index(); })
      .def_property_readonly("depth", &TreeTopology::depth)
      .def_property_readonly("leaves", [](const TreeTopology& t) { return indices(t.leaves()); })
      .def("children", [](const TreeTopology& t, std::size_t v) { return indices(t.children(node(v))); })
      .def("edge_weight", [](const TreeTopology& t, std::size_t v) { return t.edge_weight(node(v)); })
      .def("leaf_weights",
           [](const TreeTopology& t) {
             std::map<std::size_t, double> out;
             for (auto [leaf, w] : leaf_weights(t)) out[leaf.index()] = w;
             return out;
           })
      .def("cumulative_weights", [](const TreeTopology& t) { return cumulative_weights(t); });

  py::class_<TreeSystem>(m, "System")
      .def(py::init(&TreeSystem::one_row_per_node), py::arg("tree"), py::arg("A"), py::arg("b"),
           "One row of A per node, row i on node i.")
      .def_property_readonly("tree", &TreeSystem::tree)
      .def_property_readonly("dimension", &TreeSystem::dimension)
      .def_property_readonly("matrix", &TreeSystem::matrix)
      .def_property_readonly("rhs", &TreeSystem::rhs)
      .def("iterate", [](const TreeSystem& s, double omega, const Vector& x) { return iterate(s, omega, x); },
           py::arg("omega"), py::arg("x"));

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("solution", &SolveResult::solution)
      .def_readonly("iterations", &SolveResult::iterations_used)
      .def_readonly("converged", &SolveResult::converged)
      .def_readonly("final_change", &SolveResult::final_change);

  m.def(
      "solve",
      [](const TreeSystem& s, double omega, double tol, int max_iter, std::optional<Vector> initial) {
        SolverConfig cfg;
        cfg.omega = omega;
        cfg.tolerance = tol;
        cfg.max_iterations = max_iter;
        cfg.initial = std::move(initial);
        return solve(s, cfg);
      },
      py::arg("system"), py::arg("omega") = 1.0, py::arg("tol") = 1e-10, py::arg("max_iter") = 10000,
      py::arg("initial") = std::nullopt);

  py::class_<SorOperators>(m, "Operators")
      .def_readonly("omega", &SorOperators::omega)
      .def_readonly("B", &SorOperators::B)
      .def_readonly("bvec", &SorOperators::bvec)
      .def_readonly("basis", &SorOperators::basis)
      .def_readonly("B_hat", &SorOperators::B_hat)
      .def_readonly("rho_hat", &SorOperators::rho_hat)
      .def("fixed_point", [](const SorOperators& ops) { return fixed_point(ops); });
  m.def("operators", py::overload_cast<const TreeSystem&, double>(&build_sor), py::arg("system"), py::arg("omega"));

  py::class_<OmegaSweep>(m, "OmegaSweep")
      .def_readonly("grid", &OmegaSweep::grid)
      .def_readonly("omega_opt", &OmegaSweep::omega_opt)
      .def_readonly("rho_opt", &OmegaSweep::rho_opt)
      .def_readonly("Omega", &OmegaSweep::Omega)
      .def_readonly("rho_at_max", &OmegaSweep::rho_at_max)
      .def_readonly("reentry", &OmegaSweep::reentry)
      .def_readonly("warnings", &OmegaSweep::warnings);
  m.def(
      "omega_sweep",
      [](const TreeSystem& s, double omega_max, double step) {
        return omega_sweep(s, SweepOptions{omega_max, step, 1e-9});
      },
      py::arg("system"), py::arg("omega_max") = 4.0, py::arg("step") = 0.005);

  m.def("min_norm_solution", &min_norm_solution, py::arg("A"), py::arg("b"));
  m.def(
      "weighted_ls_solution", [](const TreeSystem& s) { return weighted_ls_solution(make_weighted_ls_problem(s)); },
      py::arg("system"));
  m.def("brute_force_iterate", &brute_force_iterate, py::arg("system"), py::arg("omega"), py::arg("x"));

  m.def(
      "example1_eigenvalues",
      [](double alpha, const std::string& variant, double omega) {
        return example1_eigenvalues(
            {alpha, variant == "averaged" ? Example1Variant::averaged : Example1Variant::standard}, omega);
      },
      py::arg("alpha"), py::arg("variant"), py::arg("omega"));
  m.def(
      "example1_optima",
      [](double alpha, const std::string& variant) {
        auto o = example1_optima({alpha, variant == "averaged" ? Example1Variant::averaged : Example1Variant::standard});
        return py::make_tuple(o.omega_opt, o.rho_opt, o.Omega);
      },
      py::arg("alpha"), py::arg("variant"));

  m.def("load_problem", [](const std::string& path) {
    auto p = load_problem(path);
    return py::make_tuple(std::move(p.system), p.reference);
  });
  m.def(
      "generate",
      [](const std::string& kind, const std::string& shape, std::size_t size, std::uint64_t seed) {
        auto g = generate(parse_matrix_kind(kind), parse_tree_shape(shape), size, seed);
        return py::make_tuple(std::move(g.system), g.x_true);
      },
      py::arg("kind"), py::arg("shape"), py::arg("size"), py::arg("seed"));
  m.def(
      "experiment_csv",
      [](std::size_t size, std::uint64_t seed, std::size_t trials) { return format_csv(run_experiment(size, seed, trials)); },
      py::arg("size"), py::arg("seed") = 1, py::arg("trials") = 1);

  m.def(
      "error_simulation",
      [](const TreeSystem& s, double omega, double magnitude, int iterations, std::uint64_t seed) {
        SolverConfig cfg;
        cfg.omega = omega;
        cfg.max_iterations = iterations;
        cfg.tolerance = 0.0;
        ErrorModel model;
        model.magnitude_bound = magnitude;
        model.seed = seed;
        auto [res, report] = solve_with_errors(s, cfg, model);
        py::dict out;
        out["errors"] = report.errors;
        out["deviations"] = report.deviations;
        out["limsup"] = report.limsup;
        out["K"] = report.K;
        out["rho"] = report.rho;
        out["bound"] = report.bound;
        out["applicable"] = report.applicable;
        out["holds"] = report.holds;
        return out;
      },
      py::arg("system"), py::arg("omega") = 1.0, py::arg("magnitude") = 1e-3, py::arg("iterations") = 500,
      py::arg("seed") = 0);
}
