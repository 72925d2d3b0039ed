#include "treekz/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "treekz/errors.hpp"

namespace treekz {

void require_dimension(Eigen::Index expected, Eigen::Index actual, const char* what) {
  if (expected != actual) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                  std::to_string(expected) + ", got " +
                                                  std::to_string(actual));
  }
}

bool all_finite(const Vector& v) { return v.allFinite(); }

RowEquation::RowEquation(Vector a, double b) : a_(std::move(a)), b_(b) {
  if (!a_.allFinite() || !std::isfinite(b_)) {
    throw Error(ErrorCode::NonFinite, "equation has non-finite coefficients");
  }
  norm_sq_ = a_.squaredNorm();
  if (!(norm_sq_ > 0.0)) {
    throw Error(ErrorCode::ZeroRow, "equation row is identically zero");
  }
}

double apply_row(const RowEquation& eq, const Vector& z) {
  require_dimension(eq.dimension(), z.size(), "apply_row");
  return eq.a().dot(z);
}

double residual(const RowEquation& eq, const Vector& z) { return eq.b() - apply_row(eq, z); }

Vector kaczmarz_update(const RowEquation& eq, const Vector& z, double omega) {
  const double step = omega * residual(eq, z) / eq.norm_sq();
  return z + step * eq.a();
}

Vector linear_projection(const RowEquation& eq, const Vector& z) {
  const double coeff = apply_row(eq, z) / eq.norm_sq();
  return z - coeff * eq.a();
}

Vector affine_projection(const RowEquation& eq, const Vector& z) {
  const Vector h = (eq.b() / eq.norm_sq()) * eq.a();
  return linear_projection(eq, z) + h;
}

std::vector<Complex> eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NotSquare, "eigenvalues of a " + std::to_string(m.rows()) + "x" +
                                          std::to_string(m.cols()) + " matrix");
  }
  std::vector<Complex> out;
  if (m.rows() == 0) return out;
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "eigenvalues of a non-finite matrix");

  // Hessenberg reduction followed by shifted (Francis) QR on the real Schur form.
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "QR iteration did not converge");
  }
  const auto& values = solver.eigenvalues();
  out.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) out.push_back(values[i]);
  std::sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

double spectral_radius(const Matrix& m) {
  double rho = 0.0;
  for (const auto& lambda : eigenvalues(m)) rho = std::max(rho, std::abs(lambda));
  return rho;
}

namespace {

Eigen::Index rank_from_singular_values(const Vector& sigma, double tol) {
  if (sigma.size() == 0 || sigma[0] <= 0.0) return 0;
  const double cutoff = tol * sigma[0];
  Eigen::Index r = 0;
  while (r < sigma.size() && sigma[r] > cutoff) ++r;
  return r;
}

}  // namespace

Matrix row_space_basis(const Matrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return Matrix(a.cols(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinV);
  const Eigen::Index r = rank_from_singular_values(svd.singularValues(), tol);
  return svd.matrixV().leftCols(r);
}

Eigen::Index numerical_rank(const Matrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return rank_from_singular_values(svd.singularValues(), tol);
}

Vector pseudo_solve(const Matrix& m, const Vector& rhs, double tol) {
  require_dimension(m.rows(), rhs.size(), "pseudo_solve");
  if (m.rows() == 0 || m.cols() == 0) return Vector::Zero(m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const Eigen::Index r = rank_from_singular_values(sigma, tol);
  const Vector coeffs =
      (svd.matrixU().leftCols(r).transpose() * rhs).cwiseQuotient(sigma.head(r));
  return svd.matrixV().leftCols(r) * coeffs;
}

}  // namespace treekz
