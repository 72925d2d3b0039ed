#include "treekz/experiment.hpp"

#include <cstdio>
#include <sstream>

#include "treekz/csv.hpp"
#include "treekz/solver.hpp"

namespace treekz {

double error_after(const TreeSystem& system, const Vector& x_true, double omega, int iterations) {
  Vector x = Vector::Zero(system.dimension());
  for (int n = 0; n < iterations; ++n) x = iterate(system, omega, x);
  return (x - x_true).norm();
}

VariantResult analyse_variant(const TreeSystem& system, const Vector& x_true, const SweepOptions& options) {
  const auto sweep = omega_sweep(system, options);
  VariantResult r;
  r.omega_opt = sweep.omega_opt;
  r.rho_opt = sweep.rho_opt;
  r.Omega = sweep.Omega;
  r.exceeds_search = sweep.rho_at_max < 1.0;
  r.reentry = sweep.reentry;
  r.e10 = error_after(system, x_true, sweep.omega_opt, 10);
  return r;
}

std::uint64_t matrix_seed(MatrixKind kind, std::uint64_t seed) {
  return seed * 3 + static_cast<std::uint64_t>(kind);
}

TreeShape distributed_shape(std::size_t size) {
  if (size == 3) return TreeShape::fig_graphs_3;
  if (size == 8) return TreeShape::fig_graphs_8;
  throw Error(ErrorCode::SizeMismatch, "experiments use sizes 3 or 8, got " + std::to_string(size));
}

ExperimentRow run_experiment_case(MatrixKind kind, std::size_t size, std::uint64_t seed, const SweepOptions& options) {
  const auto shape = distributed_shape(size);
  const auto s = matrix_seed(kind, seed);
  const auto chain = generate(kind, TreeShape::chain, size, s);
  const auto tree = generate(kind, shape, size, s);
  ExperimentRow row;
  row.kind = kind;
  row.seed = seed;
  row.standard = analyse_variant(chain.system, chain.x_true, options);
  row.distributed = analyse_variant(tree.system, tree.x_true, options);
  return row;
}

ExperimentReport run_experiment(std::size_t size, std::uint64_t seed, std::size_t trials, const SweepOptions& options) {
  ExperimentReport report;
  report.size = size;
  for (auto kind : {MatrixKind::almost_orthogonal, MatrixKind::normal, MatrixKind::uniform}) {
    for (std::size_t t = 0; t < trials; ++t) report.rows.push_back(run_experiment_case(kind, size, seed + t, options));
  }
  return report;
}

namespace {

std::string fixed5(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5f", x);
  return buf;
}

std::string sci(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", x);
  return buf;
}

}  // namespace

std::string format_table(const ExperimentReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows) {
    rows.push_back({std::string(to_string(r.kind)), std::to_string(r.seed), fixed5(r.standard.omega_opt),
                    fixed5(r.standard.rho_opt), sci(r.standard.e10), fixed5(r.distributed.omega_opt),
                    fixed5(r.distributed.rho_opt), sci(r.distributed.e10), fixed5(r.distributed.Omega)});
  }
  std::ostringstream out;
  out << report.size << " x " << report.size << " systems  (standard = chain, distributed = "
      << to_string(distributed_shape(report.size)) << ")\n";
  out << format_aligned({"matrix", "seed", "std omega_opt", "std rho_opt", "std e10", "dist omega_opt",
                         "dist rho_opt", "dist e10", "dist Omega"},
                        rows);
  return out.str();
}

std::string format_csv(const ExperimentReport& report) {
  std::ostringstream out;
  CsvWriter csv(out, {"size", "matrix", "seed", "variant", "omega_opt", "rho_opt", "e10", "Omega",
                      "exceeds_search", "reentry"});
  for (const auto& r : report.rows) {
    for (const auto& [name, v] : {std::pair{"standard", r.standard}, std::pair{"distributed", r.distributed}}) {
      csv.row({std::to_string(report.size), std::string(to_string(r.kind)), std::to_string(r.seed), name,
               format_real(v.omega_opt), format_real(v.rho_opt), format_real(v.e10), format_real(v.Omega),
               v.exceeds_search ? "1" : "0", v.reentry ? "1" : "0"});
    }
  }
  return out.str();
}

}  // namespace treekz
