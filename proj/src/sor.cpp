#include "treekz/sor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace treekz {

LeafOperators build_leaf_operators(const TreeSystem& system, NodeId leaf) {
  const auto& tree = system.tree();
  if (!tree.is_leaf(leaf)) throw Error(ErrorCode::InvalidArgument, tree.describe(leaf) + " is not a leaf");

  std::vector<const RowEquation*> rows;
  for (NodeId v : path_from_root(tree, leaf)) {
    for (const auto& eq : system.equations(v)) rows.push_back(&eq);
  }
  const auto p = static_cast<Eigen::Index>(rows.size());
  LeafOperators ops{leaf, Matrix(p, system.dimension()), Vector(p), Vector(p), Matrix::Zero(p, p)};
  for (Eigen::Index i = 0; i < p; ++i) {
    ops.S.row(i) = rows[i]->a().transpose();
    ops.b[i] = rows[i]->b();
    ops.D[i] = rows[i]->norm_sq();
    for (Eigen::Index j = 0; j < i; ++j) ops.L(i, j) = rows[i]->a().dot(rows[j]->a());
  }
  return ops;
}

namespace {

// (D + omega L)^{-1} rhs by forward substitution.
Matrix lower_solve(const LeafOperators& ops, double omega, const Matrix& rhs) {
  Matrix t = omega * ops.L;
  t.diagonal() = ops.D;
  assert((ops.D.array() > 0.0).all());
  return t.triangularView<Eigen::Lower>().solve(rhs);
}

SorOperators assemble(const TreeSystem& system, double omega, Matrix basis) {
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "relaxation parameter must be positive");
  const Eigen::Index d = system.dimension();
  SorOperators ops;
  ops.omega = omega;
  ops.basis = std::move(basis);
  ops.B = Matrix::Zero(d, d);
  ops.bvec = Vector::Zero(d);
  const auto weights = leaf_weights(system.tree());
  for (const auto& [leaf, w] : weights) {
    auto lo = build_leaf_operators(system, leaf);
    const Matrix gain = lower_solve(lo, omega, lo.S);
    const Vector offset = lower_solve(lo, omega, lo.b);
    Matrix B_l = Matrix::Identity(d, d) - omega * lo.S.transpose() * gain;
    Vector b_l = omega * lo.S.transpose() * offset;
    ops.B += w * B_l;
    ops.bvec += w * b_l;
    ops.leaf_ops.push_back(std::move(lo));
    ops.leaf_weight.push_back(w);
    ops.B_leaf.push_back(std::move(B_l));
    ops.b_leaf.push_back(std::move(b_l));
  }
  auto r = restrict_to_row_space(ops);
  ops.B_hat = std::move(r.B_hat);
  ops.rho_hat = r.rho_hat;
  return ops;
}

}  // namespace

SorOperators build_sor(const TreeSystem& system, double omega) {
  return assemble(system, omega, row_space_basis(system.matrix()));
}

SorOperators build_sor(const TreeSystem& system, double omega, const Matrix& basis) {
  require_dimension(system.dimension(), basis.rows(), "build_sor basis");
  return assemble(system, omega, basis);
}

Vector iterate_via_sor(const SorOperators& ops, const Vector& x) {
  require_dimension(ops.B.cols(), x.size(), "iterate_via_sor");
  return ops.B * x + ops.bvec;
}

Restriction restrict_to_subspace(const Matrix& B, const Matrix& basis) {
  require_dimension(B.rows(), basis.rows(), "restrict_to_subspace");
  Restriction r;
  r.B_hat = basis.transpose() * B * basis;
  r.rho_hat = spectral_radius(r.B_hat);
  return r;
}

Restriction restrict_to_row_space(const SorOperators& ops) { return restrict_to_subspace(ops.B, ops.basis); }

double invariance_defect(const Matrix& B, const Matrix& basis) {
  const Matrix image = B * basis;
  const Matrix outside = image - basis * (basis.transpose() * image);
  return outside.cols() == 0 ? 0.0 : outside.norm();
}

Vector fixed_point_residual(const SorOperators& ops, const Vector& z) {
  require_dimension(ops.B.cols(), z.size(), "fixed_point_residual");
  Vector out = Vector::Zero(z.size());
  for (std::size_t i = 0; i < ops.leaf_ops.size(); ++i) {
    const auto& lo = ops.leaf_ops[i];
    const Vector defect = lo.b - lo.S * z;
    out += ops.leaf_weight[i] * (lo.S.transpose() * lower_solve(lo, ops.omega, defect));
  }
  return out;
}

Vector fixed_point(const SorOperators& ops) {
  const Eigen::Index r = ops.basis.cols();
  if (r == 0) return Vector::Zero(ops.B.rows());
  if (!(ops.rho_hat < 1.0)) {
    std::ostringstream msg;
    msg << "spectral radius " << ops.rho_hat << " at omega " << ops.omega;
    throw Error(ErrorCode::SpectralRadiusAtLeastOne, msg.str());
  }
  const Matrix lhs = Matrix::Identity(r, r) - ops.B_hat;
  const Vector rhs = ops.basis.transpose() * ops.bvec;
  const Vector coords = lhs.colPivHouseholderQr().solve(rhs);
  Vector x = ops.basis * coords;

  const double scale =
      (ops.bvec.norm() + (Matrix::Identity(ops.B.rows(), ops.B.cols()) - ops.B).norm() * x.norm()) /
      ops.omega;
  const double res = fixed_point_residual(ops, x).norm();
  if (res > 1e-9 * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << "fixed point residual " << res << " exceeds tolerance";
    throw Error(ErrorCode::ConvergenceFailure, msg.str());
  }
  return x;
}

namespace {

constexpr double kInvGolden = 0.6180339887498949;

std::pair<double, double> golden_section(const std::function<double(double)>& f, double lo, double hi,
                                         double tol) {
  double x1 = hi - kInvGolden * (hi - lo);
  double x2 = lo + kInvGolden * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvGolden * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

OmegaSweep omega_sweep(const std::function<double(double)>& rho, const SweepOptions& options) {
  if (!(options.grid_step > 0.0) || !(options.omega_max > options.grid_step)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < grid_step < omega_max");
  }
  OmegaSweep out;
  if (options.omega_max > 4.0) {
    out.warnings.push_back("omega_max above 4: beyond the range where convergence has been observed");
  }
  const auto count = static_cast<std::size_t>(std::llround(options.omega_max / options.grid_step));
  out.grid.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    const double w = std::min(options.omega_max, static_cast<double>(i) * options.grid_step);
    out.grid.emplace_back(w, rho(w));
  }
  out.rho_at_max = out.grid.back().second;

  std::size_t best = 0;
  for (std::size_t i = 1; i < out.grid.size(); ++i) {
    if (out.grid[i].second < out.grid[best].second) best = i;
  }
  const double lo = best == 0 ? 0.0 : out.grid[best - 1].first;
  const double hi = best + 1 < out.grid.size() ? out.grid[best + 1].first : out.grid[best].first;
  out.omega_opt = out.grid[best].first;
  out.rho_opt = out.grid[best].second;
  if (hi > lo) {
    const auto [w, r] = golden_section(rho, lo, hi, options.omega_tolerance);
    if (r <= out.rho_opt) {
      out.omega_opt = w;
      out.rho_opt = r;
    }
  }

  if (!(out.rho_opt < 1.0)) {
    out.Omega = 0.0;
    out.warnings.push_back("spectral radius never drops below 1 on the grid");
    return out;
  }

  std::size_t first_bad = out.grid.size();
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    if (out.grid[i].first > out.omega_opt && out.grid[i].second >= 1.0) {
      first_bad = i;
      break;
    }
  }
  if (first_bad == out.grid.size()) {
    out.Omega = options.omega_max;
    return out;
  }
  double good = out.omega_opt;
  for (std::size_t i = 0; i < first_bad; ++i) {
    if (out.grid[i].first > out.omega_opt) good = out.grid[i].first;
  }
  double bad = out.grid[first_bad].first;
  while (bad - good > options.omega_tolerance) {
    const double mid = 0.5 * (good + bad);
    (rho(mid) < 1.0 ? good : bad) = mid;
  }
  out.Omega = 0.5 * (good + bad);
  for (std::size_t i = first_bad + 1; i < out.grid.size(); ++i) {
    if (out.grid[i].second < 1.0) {
      out.reentry = true;
      out.warnings.push_back("spectral radius drops below 1 again after the first crossing");
      break;
    }
  }
  return out;
}

double restricted_spectral_radius(const TreeSystem& system, double omega, const Matrix& basis) {
  return build_sor(system, omega, basis).rho_hat;
}

OmegaSweep omega_sweep(const TreeSystem& system, const SweepOptions& options) {
  const Matrix basis = row_space_basis(system.matrix());
  return omega_sweep([&](double w) { return restricted_spectral_radius(system, w, basis); }, options);
}

}  // namespace treekz
