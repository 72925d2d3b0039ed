#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "treekz/csv.hpp"
#include "treekz/ensemble.hpp"
#include "treekz/experiment.hpp"
#include "treekz/oracles.hpp"
#include "treekz/problem_io.hpp"
#include "treekz/robustness.hpp"
#include "treekz/solver.hpp"

using namespace treekz;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--out", c.out, "Output file (default: stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "table"}));
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  f << text;
}

// Summary lines go to stdout when the data went to a file, else stderr.
std::ostream& summary_stream(const Common& c) { return c.out.empty() ? std::cerr : std::cout; }

std::string render(const Common& c, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  if (c.format == "table") return format_aligned(header, rows);
  std::ostringstream s;
  CsvWriter w(s, header);
  for (const auto& r : rows) w.row(r);
  return s.str();
}

std::string na(const std::optional<double>& v) { return v ? format_real(*v) : "NA"; }

struct ProblemSource {
  std::string problem;
  std::string ensemble = "normal";
  std::string shape = "fig_graphs_8";
  std::size_t size = 0;
};

void add_source(CLI::App* cmd, ProblemSource& s, bool allow_generated) {
  cmd->add_option("--problem", s.problem, "Problem JSON file");
  if (!allow_generated) return;
  cmd->add_option("--ensemble", s.ensemble, "Matrix family when no problem file is given")
      ->check(CLI::IsMember({"almost_orthogonal", "normal", "uniform"}));
  cmd->add_option("--shape", s.shape, "Tree shape when no problem file is given")
      ->check(CLI::IsMember({"chain", "fig_graphs_3", "fig_graphs_8"}));
  cmd->add_option("--size", s.size, "System size (default: node count of the shape)");
}

ProblemFile load_source(const ProblemSource& s, std::uint64_t seed) {
  if (!s.problem.empty()) return load_problem(s.problem);
  const auto shape = parse_tree_shape(s.shape);
  std::size_t size = s.size;
  if (size == 0) size = shape == TreeShape::fig_graphs_3 ? 3 : 8;
  auto g = generate(parse_matrix_kind(s.ensemble), shape, size, seed);
  return {std::move(g.system), std::move(g.x_true)};
}

int cmd_solve(const Common& c, const ProblemSource& src, double omega, double tol, int max_iter,
              const std::string& trace_path) {
  auto p = load_source(src, c.seed);
  SolverConfig cfg;
  cfg.omega = omega;
  cfg.tolerance = tol;
  cfg.max_iterations = max_iter;
  cfg.trace_level = trace_path.empty() ? TraceLevel::none : TraceLevel::root_only;
  auto r = solve(p.system, cfg);

  if (!trace_path.empty()) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"n", "change_norm"};
    if (p.reference) header.push_back("error_vs_reference");
    int n = 0;
    for (const auto& it : r.trace->iterations) {
      std::vector<std::string> row{std::to_string(++n), format_real(it.change)};
      if (p.reference) row.push_back(format_real((it.x_out - *p.reference).norm()));
      rows.push_back(std::move(row));
    }
    Common trace_fmt = c;
    trace_fmt.format = "csv";
    write_output(trace_path, render(trace_fmt, header, rows));
  }

  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index i = 0; i < r.solution.size(); ++i) rows.push_back({std::to_string(i), format_real(r.solution(i))});
  write_output(c.out, render(c, {"index", "value"}, rows));
  auto& s = summary_stream(c);
  s << (r.converged ? "converged" : "not converged") << " after " << r.iterations_used
    << " iterations, last change " << format_real(r.final_change);
  if (p.reference) s << ", error vs reference " << format_real((r.solution - *p.reference).norm());
  s << '\n';
  return r.converged ? 0 : 1;
}

void print_sweep_summary(std::ostream& s, const OmegaSweep& sw) {
  s << "omega_opt=" << format_real(sw.omega_opt) << " rho_opt=" << format_real(sw.rho_opt)
    << " Omega=" << format_real(sw.Omega) << '\n';
  if (sw.rho_at_max < 1.0) s << "note: spectral radius still below 1 at the end of the searched range\n";
  for (const auto& w : sw.warnings) s << "warning: " << w << '\n';
}

int cmd_sweep(const Common& c, const ProblemSource& src, const SweepOptions& opts) {
  auto p = load_source(src, c.seed);
  auto sw = omega_sweep(p.system, opts);
  std::vector<std::vector<std::string>> rows;
  for (auto [w, r] : sw.grid) rows.push_back({format_real(w), format_real(r)});
  write_output(c.out, render(c, {"omega", "rho"}, rows));
  print_sweep_summary(summary_stream(c), sw);
  return 0;
}

int cmd_experiment(const Common& c, std::size_t size, std::size_t trials, const std::string& save_dir,
                   const SweepOptions& opts) {
  auto report = run_experiment(size, c.seed, trials, opts);
  if (!save_dir.empty()) {
    std::filesystem::create_directories(save_dir);
    for (const auto& row : report.rows) {
      const auto s = matrix_seed(row.kind, row.seed);
      for (auto shape : {TreeShape::chain, distributed_shape(size)}) {
        auto g = generate(row.kind, shape, size, s);
        const auto name = std::string(to_string(row.kind)) + "_" + std::string(to_string(shape)) + "_seed" +
                          std::to_string(row.seed) + ".json";
        save_problem(std::filesystem::path(save_dir) / name, g.system, g.x_true);
      }
    }
  }
  write_output(c.out, c.format == "table" ? format_table(report) : format_csv(report));
  return 0;
}

int cmd_error_sim(const Common& c, const ProblemSource& src, double omega, double magnitude, int iterations,
                  const std::string& stages) {
  auto p = load_source(src, c.seed);
  SolverConfig cfg;
  cfg.omega = omega;
  cfg.max_iterations = iterations;
  cfg.tolerance = 0.0;
  ErrorModel model;
  model.magnitude_bound = magnitude;
  model.seed = c.seed;
  model.stages = stages == "dispersion" ? NoiseStages::dispersion
                 : stages == "pooling"  ? NoiseStages::pooling
                                        : NoiseStages::both;
  auto [res, report] = solve_with_errors(p.system, cfg, model);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t n = 0; n < report.deviations.size(); ++n) {
    rows.push_back({std::to_string(n), n < report.errors.size() ? format_real(report.errors[n]) : "NA",
                    format_real(report.deviations[n]), na(report.bound)});
  }
  write_output(c.out, render(c, {"n", "error", "deviation", "bound"}, rows));
  auto& s = summary_stream(c);
  s << "K=" << report.K << " rho=" << format_real(report.rho) << " limsup=" << format_real(report.limsup)
    << " bound=" << na(report.bound);
  if (report.applicable)
    s << (report.holds ? " holds" : " VIOLATED");
  else
    s << " (not applicable: needs full column rank and rho < 1)";
  s << '\n';
  return 0;
}

int cmd_example1(const Common& c, double alpha, const std::string& variant_name, const SweepOptions& opts,
                 std::optional<double> theta) {
  std::vector<Example1Variant> variants;
  if (variant_name != "averaged") variants.push_back(Example1Variant::standard);
  if (variant_name != "standard") variants.push_back(Example1Variant::averaged);

  std::vector<std::vector<std::string>> rows;
  std::ostringstream summary;
  const Matrix plane = example1_plane_basis();
  for (auto v : variants) {
    Example1Config cfg{alpha, v};
    cfg.validate();
    const bool standard = v == Example1Variant::standard;
    const auto tree = standard ? example1_chain(cfg) : example1_as_tree(cfg);
    auto tree_rho = [&](double w) {
      return standard ? build_sor(tree, w).rho_hat : restrict_to_subspace(build_sor(tree, w).B, plane).rho_hat;
    };
    auto analytic_rho = [&](double w) {
      double r = 0.0;
      for (auto l : example1_eigenvalues(cfg, w)) r = std::max(r, std::abs(l));
      return r;
    };
    auto sw = omega_sweep(tree_rho, opts);
    for (auto [w, r] : sw.grid) {
      rows.push_back({standard ? "standard" : "averaged", format_real(w), format_real(analytic_rho(w)),
                      format_real(spectral_radius(example1_iteration_matrix(cfg, w))), format_real(r)});
    }
    const auto o = example1_optima(cfg);
    summary << (standard ? "standard" : "averaged") << ": closed form omega_opt=" << format_real(o.omega_opt)
            << " rho_opt=" << format_real(o.rho_opt) << " Omega=" << format_real(o.Omega)
            << "; numeric omega_opt=" << format_real(sw.omega_opt) << " rho_opt=" << format_real(sw.rho_opt)
            << " Omega=" << format_real(sw.Omega) << '\n';
    if (theta) {
      Vector x0(2);
      x0 << std::cos(*theta), std::sin(*theta);
      Vector x = x0;
      if (!standard) {
        x = Vector::Zero(3);
        x.head(2) = x0;
      }
      const Vector x1 = iterate(tree, o.omega_opt, x);
      const Vector r = example1_matrix_a(cfg) * x1.head(2) - example1_chain(cfg).rhs();
      summary << "  one step from (" << format_real(x0(0)) << ", " << format_real(x0(1))
              << ") at omega_opt: x1 = (" << format_real(x1(0)) << ", " << format_real(x1(1))
              << "), residual norm " << format_real(r.norm()) << '\n';
    }
  }
  write_output(c.out, render(c, {"variant", "omega", "rho_closed_form", "rho_matrix", "rho_tree"}, rows));
  summary_stream(c) << summary.str();
  return 0;
}

int cmd_generate(const Common& c, const std::string& kind, const std::string& shape, std::size_t size) {
  const auto sh = parse_tree_shape(shape);
  if (size == 0) size = sh == TreeShape::fig_graphs_3 ? 3 : 8;
  auto g = generate(parse_matrix_kind(kind), sh, size, c.seed);
  write_output(c.out, serialize_problem(g.system, g.x_true) + "\n");
  return 0;
}

int cmd_validate(const Common& c, const std::string& path) {
  auto p = load_problem(path);
  const auto& t = p.system.tree();
  std::ostringstream s;
  s << "valid: " << t.node_count() << " nodes, " << p.system.row_count() << " rows, dimension "
    << p.system.dimension() << ", depth " << t.depth() << ", " << t.leaves().size() << " leaves, rank "
    << numerical_rank(p.system.matrix()) << '\n';
  write_output(c.out, s.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed Kaczmarz solver on trees"};
  app.require_subcommand(1);

  Common common;
  ProblemSource source;
  SweepOptions sweep_opts;
  double omega = 1.0, tol = 1e-10, magnitude = 1e-3, alpha = std::numbers::pi / 3;
  int max_iter = 10000, iterations = 500;
  std::string trace, save_dir, stages = "both", variant = "both", kind = "normal", shape = "fig_graphs_8";
  std::size_t size = 0, trials = 1;
  std::optional<double> theta;

  auto positive = CLI::PositiveNumber;

  auto* solve_cmd = app.add_subcommand("solve", "Run the distributed iteration on a problem file");
  add_common(solve_cmd, common);
  solve_cmd->add_option("--problem", source.problem, "Problem JSON file")->required();
  solve_cmd->add_option("--omega", omega, "Relaxation parameter (> 0)")->check(positive);
  solve_cmd->add_option("--tol", tol, "Relative change tolerance")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--max-iter", max_iter, "Iteration cap")->check(positive);
  solve_cmd->add_option("--trace", trace, "Per-iteration CSV");

  auto* sweep_cmd = app.add_subcommand("sweep", "Spectral radius as a function of omega");
  add_common(sweep_cmd, common);
  add_source(sweep_cmd, source, true);
  sweep_cmd->add_option("--omega-max", sweep_opts.omega_max, "Upper end of the grid")->check(positive);
  sweep_cmd->add_option("--step", sweep_opts.grid_step, "Grid spacing")->check(positive);

  auto* exp_cmd = app.add_subcommand("experiment", "Optimal relaxation on random matrix families");
  add_common(exp_cmd, common);
  exp_cmd->add_option("--size", size, "System size")->required()->check(CLI::IsMember({3, 8}));
  exp_cmd->add_option("--trials", trials, "Seeds per matrix family")->check(positive);
  exp_cmd->add_option("--save-dir", save_dir, "Directory for the generated problem files");
  exp_cmd->add_option("--step", sweep_opts.grid_step, "Grid spacing")->check(positive);

  auto* err_cmd = app.add_subcommand("error-sim", "Iterate with bounded message errors");
  add_common(err_cmd, common);
  add_source(err_cmd, source, true);
  err_cmd->add_option("--omega", omega, "Relaxation parameter (> 0)")->check(positive);
  err_cmd->add_option("--magnitude", magnitude, "Error bound M")->check(CLI::NonNegativeNumber);
  err_cmd->add_option("--iterations", iterations, "Iterations to run")->check(positive);
  err_cmd->add_option("--stages", stages, "Where errors enter")
      ->check(CLI::IsMember({"dispersion", "pooling", "both"}));

  auto* ex_cmd = app.add_subcommand("example1", "Two lines in the plane: closed forms against the iteration");
  add_common(ex_cmd, common);
  ex_cmd->add_option("--alpha", alpha, "Angle between the lines, radians");
  ex_cmd->add_option("--variant", variant, "Which method")->check(CLI::IsMember({"standard", "averaged", "both"}));
  ex_cmd->add_option("--step", sweep_opts.grid_step, "Grid spacing")->check(positive);
  ex_cmd->add_option("--omega-max", sweep_opts.omega_max, "Upper end of the grid")->check(positive);
  ex_cmd->add_option("--demo-theta", theta, "Show one step from (cos t, sin t) at the optimal omega");

  auto* gen_cmd = app.add_subcommand("generate", "Write a random problem file");
  add_common(gen_cmd, common);
  gen_cmd->add_option("--ensemble", kind, "Matrix family")
      ->check(CLI::IsMember({"almost_orthogonal", "normal", "uniform"}));
  gen_cmd->add_option("--shape", shape, "Tree shape")->check(CLI::IsMember({"chain", "fig_graphs_3", "fig_graphs_8"}));
  gen_cmd->add_option("--size", size, "System size");

  auto* val_cmd = app.add_subcommand("validate", "Check a problem file");
  add_common(val_cmd, common);
  val_cmd->add_option("--problem", source.problem, "Problem JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve_cmd) return cmd_solve(common, source, omega, tol, max_iter, trace);
    if (*sweep_cmd) return cmd_sweep(common, source, sweep_opts);
    if (*exp_cmd) {
      if (exp_cmd->count("--format") == 0) common.format = "table";
      return cmd_experiment(common, size, trials, save_dir, sweep_opts);
    }
    if (*err_cmd) return cmd_error_sim(common, source, omega, magnitude, iterations, stages);
    if (*ex_cmd) return cmd_example1(common, alpha, variant, sweep_opts, theta);
    if (*gen_cmd) return cmd_generate(common, kind, shape, size);
    if (*val_cmd) return cmd_validate(common, source.problem);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& v : e.violations()) std::cerr << "  " << to_string(v.code) << ": " << v.message << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
