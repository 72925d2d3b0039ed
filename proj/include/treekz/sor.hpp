#pragma once

// Exact affine form of one distributed sweep,
//   x(n+1) = B x(n) + bvec,  B = sum_l w(l,r) B_l,
// where each leaf path contributes the classical SOR-type Kaczmarz operator
//   B_l = I - omega S_l^T (D_l + omega L_l)^{-1} S_l.
// Also: restriction of B to the row space, spectral radii and the search for
// the optimal relaxation parameter.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treekz/system.hpp"

namespace treekz {

struct LeafOperators {
  NodeId leaf;
  /// Rows along the root-to-leaf path, one per equation.
  Matrix S;
  Vector b;
  /// Diagonal of D_l: squared row norms.
  Vector D;
  /// Strictly lower triangular Gram part: L(i,j) = a_i·a_j for i > j.
  Matrix L;
};

LeafOperators build_leaf_operators(const TreeSystem& system, NodeId leaf);

struct SorOperators {
  double omega = 1.0;
  std::vector<LeafOperators> leaf_ops;
  std::vector<double> leaf_weight;
  std::vector<Matrix> B_leaf;
  std::vector<Vector> b_leaf;
  Matrix B;
  Vector bvec;
  /// Orthonormal columns spanning the row space of the system matrix.
  Matrix basis;
  Matrix B_hat;
  double rho_hat = 0.0;
};

/// Builds every operator and the row-space restriction. The basis overload
/// skips the rank-revealing factorization when one is already known.
SorOperators build_sor(const TreeSystem& system, double omega);
SorOperators build_sor(const TreeSystem& system, double omega, const Matrix& basis);

/// B x + bvec
Vector iterate_via_sor(const SorOperators& ops, const Vector& x);

struct Restriction {
  Matrix B_hat;
  double rho_hat = 0.0;
};

/// basis^T B basis and its spectral radius, for the row-space basis in ops.
Restriction restrict_to_row_space(const SorOperators& ops);

/// Same for any orthonormal basis of a B-invariant subspace.
Restriction restrict_to_subspace(const Matrix& B, const Matrix& basis);

/// Largest |(I - P) B Q| entry-norm, where Q = basis and P = Q Q^T; zero when
/// span(basis) is invariant under B.
double invariance_defect(const Matrix& B, const Matrix& basis);

/// The limit x(omega) inside the row space. Throws SpectralRadiusAtLeastOne
/// when rho_hat >= 1, ConvergenceFailure if the characterising residual does
/// not vanish.
Vector fixed_point(const SorOperators& ops);

/// sum_l w_l S_l^T (D_l + omega L_l)^{-1} (b_l - S_l z); zero exactly at z = x(omega).
Vector fixed_point_residual(const SorOperators& ops, const Vector& z);

struct SweepOptions {
  double omega_max = 4.0;
  double grid_step = 0.005;
  /// Resolution of the golden-section and bisection refinements.
  double omega_tolerance = 1e-9;
};

struct OmegaSweep {
  std::vector<std::pair<double, double>> grid;
  double omega_opt = 0.0;
  double rho_opt = 0.0;
  /// First omega above omega_opt where rho reaches 1; omega_max if never.
  double Omega = 0.0;
  double rho_at_max = 0.0;
  /// rho dropped back below 1 somewhere after the first crossing.
  bool reentry = false;
  std::vector<std::string> warnings;
};

/// Dense grid over (0, omega_max], golden-section refinement of the minimum
/// inside the best bracketing triple, bisection for Omega.
OmegaSweep omega_sweep(const std::function<double(double)>& rho, const SweepOptions& options = {});

/// rho(B-hat) of the distributed iteration for every grid point.
OmegaSweep omega_sweep(const TreeSystem& system, const SweepOptions& options = {});

/// Spectral radius of the row-space restriction at a single omega.
double restricted_spectral_radius(const TreeSystem& system, double omega, const Matrix& basis);

}  // namespace treekz
