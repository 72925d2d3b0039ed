#pragma once

// Optimal-relaxation experiment: for each matrix family, compare classical
// Kaczmarz (all rows on a chain) with the distributed method on the small
// fixed trees, at the numerically optimal omega.

#include <cstdint>
#include <string>
#include <vector>

#include "treekz/ensemble.hpp"
#include "treekz/sor.hpp"

namespace treekz {

struct VariantResult {
  double omega_opt = 0.0;
  double rho_opt = 0.0;
  double Omega = 0.0;
  /// Error |x(10) - x_true| from x(0) = 0 at omega_opt.
  double e10 = 0.0;
  /// rho(omega_max) < 1: convergence extends past the searched range.
  bool exceeds_search = false;
  bool reentry = false;
};

struct ExperimentRow {
  MatrixKind kind = MatrixKind::normal;
  std::uint64_t seed = 0;
  VariantResult standard;
  VariantResult distributed;
};

struct ExperimentReport {
  std::size_t size = 0;
  std::vector<ExperimentRow> rows;
};

/// Error after `iterations` sweeps from zero at relaxation omega.
double error_after(const TreeSystem& system, const Vector& x_true, double omega, int iterations);

VariantResult analyse_variant(const TreeSystem& system, const Vector& x_true, const SweepOptions& options = {});

/// Both variants on one generated matrix. size must be 3 or 8.
ExperimentRow run_experiment_case(MatrixKind kind, std::size_t size, std::uint64_t seed,
                                  const SweepOptions& options = {});

/// `trials` seeds per matrix kind, starting at `seed`.
ExperimentReport run_experiment(std::size_t size, std::uint64_t seed, std::size_t trials = 1,
                                const SweepOptions& options = {});

/// Matrix seed used for (kind, trial seed): keeps families independent.
std::uint64_t matrix_seed(MatrixKind kind, std::uint64_t seed);

TreeShape distributed_shape(std::size_t size);

std::string format_table(const ExperimentReport& report);
std::string format_csv(const ExperimentReport& report);

}  // namespace treekz
