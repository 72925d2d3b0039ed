#pragma once

// Dense vectors and matrices, single-row Kaczmarz maps and the dense
// kernels (spectra, rank, minimal-norm solves) the rest of the library uses.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace treekz {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

/// Singular values below this fraction of the largest one count as zero.
inline constexpr double kDefaultRankTolerance = 1e-10;

/// One linear equation a·x = b with a nonzero row a.
class RowEquation {
 public:
  /// Throws ZeroRow when a == 0 and NonFinite on NaN/Inf input.
  RowEquation(Vector a, double b);

  const Vector& a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double norm_sq() const noexcept { return norm_sq_; }
  Eigen::Index dimension() const noexcept { return a_.size(); }

 private:
  Vector a_;
  double b_;
  double norm_sq_;
};

double apply_row(const RowEquation& eq, const Vector& z);

/// b - a·z
double residual(const RowEquation& eq, const Vector& z);

/// z + omega * residual / |a|^2 * a. With omega = 1 the result satisfies the
/// equation exactly (up to rounding).
Vector kaczmarz_update(const RowEquation& eq, const Vector& z, double omega);

/// Orthogonal projection onto the null space of z -> a·z.
Vector linear_projection(const RowEquation& eq, const Vector& z);

/// Affine projection onto the hyperplane a·z = b.
Vector affine_projection(const RowEquation& eq, const Vector& z);

/// All eigenvalues with algebraic multiplicity, sorted by (real, imag).
std::vector<Complex> eigenvalues(const Matrix& m);

double spectral_radius(const Matrix& m);

/// Orthonormal basis (as columns) of the row space of a. The numerical rank
/// counts singular values above tol * sigma_max.
Matrix row_space_basis(const Matrix& a, double tol = kDefaultRankTolerance);

/// Numerical rank of a at the same threshold as row_space_basis.
Eigen::Index numerical_rank(const Matrix& a, double tol = kDefaultRankTolerance);

/// Minimal-norm least-squares solution of m x = rhs.
Vector pseudo_solve(const Matrix& m, const Vector& rhs, double tol = kDefaultRankTolerance);

/// Throws DimensionMismatch unless the sizes agree.
void require_dimension(Eigen::Index expected, Eigen::Index actual, const char* what);

bool all_finite(const Vector& v);

}  // namespace treekz
