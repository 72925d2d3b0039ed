#include "treekz/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace treekz {

Vector min_norm_solution(const Matrix& a, const Vector& b) {
  Vector x = pseudo_solve(a, b);
  const double res = (a * x - b).norm();
  if (res > 1e-9 * std::max(1.0, b.norm())) {
    std::ostringstream msg;
    msg << "least-squares residual " << res << " is not zero";
    throw Error(ErrorCode::Inconsistent, msg.str());
  }
  return x;
}

WeightedLsProblem make_weighted_ls_problem(const TreeSystem& system) {
  WeightedLsProblem p{system.matrix(), system.rhs(), Vector(), Vector()};
  p.D = p.A.rowwise().squaredNorm();
  const auto cumulative = cumulative_weights(system.tree());
  const auto owners = system.row_owners();
  p.V.resize(static_cast<Eigen::Index>(owners.size()));
  for (std::size_t i = 0; i < owners.size(); ++i) {
    p.V[static_cast<Eigen::Index>(i)] = cumulative[owners[i].index()];
  }
  return p;
}

Vector weighted_ls_solution(const WeightedLsProblem& problem) {
  require_dimension(problem.A.rows(), problem.b.size(), "weighted_ls_solution rhs");
  require_dimension(problem.A.rows(), problem.D.size(), "weighted_ls_solution D");
  require_dimension(problem.A.rows(), problem.V.size(), "weighted_ls_solution V");
  const Matrix basis = row_space_basis(problem.A);
  if (basis.cols() == 0) return Vector::Zero(problem.A.cols());

  // Minimize |W^{1/2} (b - A Q c)| over coordinates c in the row space; the
  // weighted design A Q has full column rank there.
  const Vector sqrt_w = problem.V.cwiseQuotient(problem.D).cwiseSqrt();
  const Matrix design = sqrt_w.asDiagonal() * (problem.A * basis);
  const Vector target = sqrt_w.cwiseProduct(problem.b);
  const Vector coords = design.colPivHouseholderQr().solve(target);
  Vector x = basis * coords;

  const Vector weights = problem.V.cwiseQuotient(problem.D);
  const Vector stationarity = problem.A.transpose() * weights.cwiseProduct(problem.b - problem.A * x);
  const double scale = problem.A.norm() * weights.maxCoeff() * (problem.b.norm() + problem.A.norm() * x.norm());
  if (stationarity.norm() > 1e-9 * std::max(1.0, scale)) {
    throw Error(ErrorCode::ConvergenceFailure, "weighted normal equations not satisfied");
  }
  return x;
}

OmegaLimitReport verify_omega_limit(const TreeSystem& system, const std::vector<double>& omegas) {
  if (omegas.empty()) throw Error(ErrorCode::InvalidArgument, "no relaxation parameters given");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] > 0.0 && omegas[i] < 2.0)) {
      throw Error(ErrorCode::InvalidArgument, "relaxation parameters must lie in (0, 2)");
    }
    if (i > 0 && !(omegas[i] < omegas[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "relaxation parameters must be decreasing");
    }
  }
  OmegaLimitReport report;
  report.omegas = omegas;
  report.x_ls = weighted_ls_solution(make_weighted_ls_problem(system));
  const Matrix basis = row_space_basis(system.matrix());
  for (double w : omegas) {
    const Vector x = fixed_point(build_sor(system, w, basis));
    report.deviations.push_back((x - report.x_ls).norm());
  }

  const double floor = 1e-9 * std::max(1.0, report.x_ls.norm());
  report.omega_independent = std::all_of(report.deviations.begin(), report.deviations.end(),
                                         [floor](double dev) { return dev <= floor; });

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (report.deviations[i] > 0.0) {
      lx.push_back(std::log(omegas[i]));
      ly.push_back(std::log(report.deviations[i]));
    }
  }
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i] / n;
      my += ly[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    report.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  report.order_omega = report.omega_independent || report.slope >= 0.9;
  return report;
}

void Example1Config::validate() const {
  if (!(alpha > 0.0 && alpha <= std::numbers::pi / 2 + 1e-15)) {
    throw Error(ErrorCode::InvalidArgument, "angle must lie in (0, pi/2]");
  }
  require_dimension(2, target.size(), "example target");
}

Matrix example1_matrix_a(const Example1Config& cfg) {
  cfg.validate();
  Matrix a(2, 2);
  a << -std::sin(cfg.alpha), std::cos(cfg.alpha), 0.0, 1.0;
  return a;
}

Matrix example1_iteration_matrix(const Example1Config& cfg, double omega) {
  cfg.validate();
  const double s = std::sin(cfg.alpha);
  const double c = std::cos(cfg.alpha);
  Matrix m(2, 2);
  if (cfg.variant == Example1Variant::standard) {
    m << 1.0 - omega * s * s, omega * s * c,
        omega * (1.0 - omega) * s * c, (1.0 - omega) * (1.0 - omega * c * c);
  } else {
    const double h = 0.5 * omega;
    m << 1.0 - h * s * s, h * s * c,
        h * s * c, h * s * s - omega + 1.0;
  }
  return m;
}

std::vector<Complex> example1_eigenvalues(const Example1Config& cfg, double omega) {
  cfg.validate();
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "relaxation parameter must be positive");
  const double s = std::sin(cfg.alpha);
  const double c = std::cos(cfg.alpha);
  std::vector<Complex> out;
  if (cfg.variant == Example1Variant::standard) {
    // Half the trace plus/minus the discriminant root; det = (1 - omega)^2.
    const double centre = 0.5 * omega * omega * c * c + (1.0 - omega);
    const double disc = (omega - 2.0) * (omega - 2.0) - omega * omega * s * s;
    const double half = 0.5 * omega * c;
    const Complex root = disc >= 0.0 ? Complex(half * std::sqrt(disc), 0.0)
                                     : Complex(0.0, half * std::sqrt(-disc));
    out = {Complex(centre) - root, Complex(centre) + root};
  } else {
    out = {Complex(1.0 + 0.5 * omega * (-c - 1.0)), Complex(1.0 + 0.5 * omega * (c - 1.0))};
  }
  std::sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

Example1Optima example1_optima(const Example1Config& cfg) {
  cfg.validate();
  const double s = std::sin(cfg.alpha);
  const double c = std::cos(cfg.alpha);
  if (cfg.variant == Example1Variant::standard) {
    const double w = 2.0 / (1.0 + s);
    return {w, w - 1.0, 2.0};
  }
  return {2.0, c, 4.0 / (1.0 + c)};
}

TreeSystem example1_chain(const Example1Config& cfg) {
  const Matrix a = example1_matrix_a(cfg);
  return TreeSystem::one_row_per_node(TreeTopology::chain(2), a, a * cfg.target);
}

TreeSystem example1_as_tree(const Example1Config& cfg) {
  if (cfg.variant != Example1Variant::averaged) {
    throw Error(ErrorCode::VariantUnsupported, "only the averaged variant has a tree realization");
  }
  const Matrix a = example1_matrix_a(cfg);
  const Vector b = a * cfg.target;
  Matrix lifted = Matrix::Zero(3, 3);
  lifted(0, 2) = 1.0;
  lifted.block(1, 0, 2, 2) = a;
  Vector rhs(3);
  rhs << 0.0, b[0], b[1];
  return TreeSystem::one_row_per_node(TreeTopology::star(2), lifted, rhs);
}

Matrix example1_plane_basis() { return Matrix::Identity(3, 2); }

Vector brute_force_iterate(const TreeSystem& system, double omega, const Vector& x) {
  if (system.row_count() > 32) {
    throw Error(ErrorCode::TooLarge, "brute force limited to 32 rows, system has " +
                                         std::to_string(system.row_count()));
  }
  require_dimension(system.dimension(), x.size(), "brute_force_iterate");
  const Eigen::Index d = system.dimension();
  const Matrix identity = Matrix::Identity(d, d);
  Vector out = Vector::Zero(d);
  for (const auto& [leaf, weight] : leaf_weights(system.tree())) {
    Matrix linear = identity;
    Vector shift = Vector::Zero(d);
    for (NodeId v : path_from_root(system.tree(), leaf)) {
      for (const auto& eq : system.equations(v)) {
        const Matrix step = identity - (omega / eq.norm_sq()) * eq.a() * eq.a().transpose();
        const Vector offset = (omega * eq.b() / eq.norm_sq()) * eq.a();
        linear = step * linear;
        shift = step * shift + offset;
      }
    }
    out += weight * (linear * x + shift);
  }
  return out;
}

}  // namespace treekz
