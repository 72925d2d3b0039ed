#pragma once

// Reference solutions used to check the distributed iteration: minimal-norm
// and weighted least-squares limits, the two-equation closed forms, and an
// affine-map brute force of one sweep.

#include <vector>

#include "treekz/sor.hpp"
#include "treekz/system.hpp"

namespace treekz {

/// Minimal-norm solution of a consistent system. Throws Inconsistent when the
/// least-squares residual is not zero to 1e-9 (relative).
Vector min_norm_solution(const Matrix& a, const Vector& b);

/// The limit functional z -> <D^{-1} V (b - A z), b - A z> over the row space.
struct WeightedLsProblem {
  Matrix A;
  Vector b;
  /// Diagonal of D: squared row norms.
  Vector D;
  /// Diagonal of V: cumulative leaf weight of the node owning each row.
  Vector V;
};

WeightedLsProblem make_weighted_ls_problem(const TreeSystem& system);

/// Minimizer of the weighted functional inside the row space of A.
Vector weighted_ls_solution(const WeightedLsProblem& problem);

struct OmegaLimitReport {
  std::vector<double> omegas;
  std::vector<double> deviations;
  /// Least-squares slope of log(deviation) against log(omega).
  double slope = 0.0;
  /// All deviations are at rounding level; the limit does not depend on omega.
  bool omega_independent = false;
  /// deviation = O(omega): slope >= 0.9, or omega_independent.
  bool order_omega = false;
  Vector x_ls;
};

/// |x(omega) - x_LS| for each omega (in (0, 2), decreasing).
OmegaLimitReport verify_omega_limit(const TreeSystem& system, const std::vector<double>& omegas);

enum class Example1Variant { standard, averaged };

/// Two lines in the plane: the x-axis and a line at angle alpha to it.
struct Example1Config {
  double alpha = 0.0;
  Example1Variant variant = Example1Variant::standard;
  /// Intersection point of the two lines.
  Vector target = Vector::Zero(2);

  void validate() const;
};

/// Rows (-sin a, cos a) and (0, 1).
Matrix example1_matrix_a(const Example1Config& cfg);

/// Closed-form iteration matrix of the chosen variant.
Matrix example1_iteration_matrix(const Example1Config& cfg, double omega);

/// Closed-form eigenvalues of example1_iteration_matrix, sorted by (re, im).
std::vector<Complex> example1_eigenvalues(const Example1Config& cfg, double omega);

struct Example1Optima {
  double omega_opt = 0.0;
  double rho_opt = 0.0;
  double Omega = 0.0;
};

Example1Optima example1_optima(const Example1Config& cfg);

/// Standard variant as a distributed system: the root holds the first row,
/// its single child the second.
TreeSystem example1_chain(const Example1Config& cfg);

/// Averaged variant embedded in R^3: the root row e3 (rhs 0) never touches the
/// plane, and two leaves hold the lifted rows. span{e1, e2} is invariant and
/// the sweep restricted to it equals the averaged method.
/// Throws VariantUnsupported for the standard variant.
TreeSystem example1_as_tree(const Example1Config& cfg);

/// Orthonormal basis of the plane carrying the averaged method in
/// example1_as_tree.
Matrix example1_plane_basis();

/// One sweep computed by composing explicit d x d affine maps per row along
/// each leaf path. Throws TooLarge above 32 rows.
Vector brute_force_iterate(const TreeSystem& system, double omega, const Vector& x);

}  // namespace treekz
