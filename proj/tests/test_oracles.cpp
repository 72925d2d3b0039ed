#include <gtest/gtest.h>

#include <cmath>

#include "testing/random_systems.hpp"
#include "treekz/oracles.hpp"
#include "treekz/solver.hpp"

using namespace treekz;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

bool close(const std::vector<Complex>& a, const std::vector<Complex>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

// Eigenvalues of a real 2x2 matrix from trace and determinant.
std::vector<Complex> quadratic_roots(const Matrix& m) {
  const double tr = m.trace(), det = m.determinant();
  const Complex s = std::sqrt(Complex(tr * tr / 4 - det, 0));
  std::vector<Complex> r{tr / 2 - s, tr / 2 + s};
  std::sort(r.begin(), r.end(), [](Complex x, Complex y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return r;
}

}  // namespace

TEST(MinNorm, Examples) {
  Matrix one(1, 2);
  one << 1, 1;
  EXPECT_LE((min_norm_solution(one, Vector::Constant(1, 2)) - v2(1, 1)).norm(), 1e-14);

  Matrix sq(2, 2);
  sq << 2, 1, 1, 3;
  EXPECT_LE((min_norm_solution(sq, sq * v2(0.5, -1)) - v2(0.5, -1)).norm(), 1e-14);

  Matrix dup(2, 2);
  dup << 1, 1, 1, 1;
  EXPECT_LE((min_norm_solution(dup, v2(2, 2)) - v2(1, 1)).norm(), 1e-14);

  Matrix col(2, 1);
  col << 1, 1;
  EXPECT_THROW(min_norm_solution(col, v2(0, 1)), Error);
}

TEST(WeightedLs, ChainOfTwo) {
  Matrix a(2, 1);
  a << 1, 1;
  auto sys = TreeSystem::one_row_per_node(TreeTopology::chain(2), a, v2(0, 1));
  auto p = make_weighted_ls_problem(sys);
  EXPECT_EQ(p.V, v2(1, 1));
  EXPECT_NEAR(weighted_ls_solution(p)(0), 0.5, 1e-15);
}

TEST(WeightedLs, ThreeNodeStar) {
  Matrix a(3, 1);
  a << 1, 1, 1;
  auto sys = TreeSystem::one_row_per_node(TreeTopology::star(2), a, (Vector(3) << 0, 3, 0).finished());
  auto p = make_weighted_ls_problem(sys);
  EXPECT_EQ(p.V, (Vector(3) << 1, 0.5, 0.5).finished());
  EXPECT_EQ(p.D, Vector::Ones(3));
  EXPECT_NEAR(weighted_ls_solution(p)(0), 0.75, 1e-15);
}

TEST(WeightedLs, ConsistentEqualsMinimalNorm) {
  testkit::Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    auto sys = testkit::make_consistent(rng, testkit::random_system(rng, {8, 6, 2, trial % 2 == 0}));
    const Vector x = weighted_ls_solution(make_weighted_ls_problem(sys));
    const Vector xm = min_norm_solution(sys.matrix(), sys.rhs());
    EXPECT_LE((x - xm).norm(), 1e-9 * std::max(1.0, xm.norm()));
  }
}

TEST(WeightedLs, LiesInRowSpaceAndIsStationary) {
  testkit::Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    auto sys = testkit::random_system(rng, {8, 6, 2, true});
    auto p = make_weighted_ls_problem(sys);
    const Vector x = weighted_ls_solution(p);
    const Matrix q = row_space_basis(p.A);
    EXPECT_LE((x - q * (q.transpose() * x)).norm(), 1e-10 * std::max(1.0, x.norm()));
    // Gradient of the weighted functional vanishes.
    const Vector g = p.A.transpose() * (p.V.cwiseQuotient(p.D).asDiagonal() * (p.b - p.A * x));
    EXPECT_LE(g.norm(), 1e-9 * (1 + p.b.norm()) * p.A.norm());
  }
}

TEST(OmegaLimit, ChainSlopeIsOne) {
  Matrix a(2, 1);
  a << 1, 1;
  auto sys = TreeSystem::one_row_per_node(TreeTopology::chain(2), a, v2(0, 1));
  auto r = verify_omega_limit(sys, {0.1, 0.05, 0.02, 0.01, 0.005});
  EXPECT_NEAR(r.x_ls(0), 0.5, 1e-15);
  for (std::size_t i = 0; i < r.omegas.size(); ++i) {
    const double w = r.omegas[i];
    EXPECT_NEAR(r.deviations[i], w / (2 * (2 - w)), 1e-13);
  }
  EXPECT_GE(r.slope, 0.9);
  EXPECT_TRUE(r.order_omega);
  EXPECT_THROW(verify_omega_limit(sys, {0.1, 0.2}), Error);
  EXPECT_THROW(verify_omega_limit(sys, {2.5, 0.1}), Error);
}

TEST(OmegaLimit, ConsistentSystemIsOmegaIndependent) {
  auto r = verify_omega_limit(TreeSystem::one_row_per_node(TreeTopology::chain(2), Matrix::Identity(2, 2), v2(1, 2)),
                              {0.5, 0.1, 0.01});
  EXPECT_TRUE(r.omega_independent);
  EXPECT_TRUE(r.order_omega);
}

TEST(Example1, EigenvalueExamples) {
  EXPECT_TRUE(close(example1_eigenvalues({M_PI / 2}, 1.0), {0, 0}, 1e-14));
  EXPECT_TRUE(close(example1_eigenvalues({M_PI / 2, Example1Variant::averaged}, 2.0), {0, 0}, 1e-14));
  EXPECT_TRUE(close(example1_eigenvalues({M_PI / 3, Example1Variant::averaged}, 1.0), {0.25, 0.75}, 1e-14));
  // At alpha = pi/3, omega = 1 the closed-form matrix has eigenvalues 0 and cos^2(alpha).
  EXPECT_TRUE(close(example1_eigenvalues({M_PI / 3}, 1.0), {0, 0.25}, 1e-14));
}

TEST(Example1, EigenvaluesMatchNumericAndQuadratic) {
  for (auto variant : {Example1Variant::standard, Example1Variant::averaged}) {
    for (double alpha : {M_PI / 6, M_PI / 3, M_PI / 2, 0.3}) {
      Example1Config cfg{alpha, variant};
      for (int i = 1; i <= 19; ++i) {
        const double w = 0.1 * i;
        const Matrix m = example1_iteration_matrix(cfg, w);
        auto analytic = example1_eigenvalues(cfg, w);
        EXPECT_TRUE(close(analytic, eigenvalues(m), 1e-10)) << alpha << " " << w;
        EXPECT_TRUE(close(analytic, quadratic_roots(m), 1e-10)) << alpha << " " << w;
      }
    }
  }
}

TEST(Example1, Optima) {
  auto s = example1_optima({M_PI / 3});
  EXPECT_NEAR(s.omega_opt, 1.0718, 1e-4);
  EXPECT_NEAR(s.rho_opt, 0.0718, 1e-4);
  EXPECT_NEAR(s.Omega, 2.0, 1e-15);

  auto a = example1_optima({M_PI / 3, Example1Variant::averaged});
  EXPECT_NEAR(a.omega_opt, 2.0, 1e-15);
  EXPECT_NEAR(a.rho_opt, 0.5, 1e-15);
  EXPECT_NEAR(a.Omega, 8.0 / 3.0, 1e-15);

  auto r = example1_optima({M_PI / 2, Example1Variant::averaged});
  EXPECT_NEAR(r.rho_opt, 0.0, 1e-15);
  EXPECT_NEAR(r.Omega, 4.0, 1e-15);
}

TEST(Example1, OptimaAgreeWithNumericSweep) {
  for (auto variant : {Example1Variant::standard, Example1Variant::averaged}) {
    for (double alpha : {M_PI / 6, M_PI / 3, 1.2}) {
      Example1Config cfg{alpha, variant};
      auto s = omega_sweep([&](double w) { return spectral_radius(example1_iteration_matrix(cfg, w)); });
      auto o = example1_optima(cfg);
      EXPECT_NEAR(s.omega_opt, o.omega_opt, 1e-3);
      EXPECT_NEAR(s.rho_opt, o.rho_opt, 1e-6);
      EXPECT_NEAR(s.Omega, o.Omega, 1e-3);
    }
  }
}

TEST(Example1, AveragedTreeMatchesClosedForm) {
  Example1Config cfg{M_PI / 3, Example1Variant::averaged};
  auto tree = example1_as_tree(cfg);
  const Matrix plane = example1_plane_basis();
  for (double w : {0.5, 1.0, 2.0, 2.5}) {
    auto ops = build_sor(tree, w);
    EXPECT_LE(invariance_defect(ops.B, plane), 1e-15);
    EXPECT_LE((plane.transpose() * ops.B * plane - example1_iteration_matrix(cfg, w)).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(example1_as_tree({M_PI / 3}), Error);
}

TEST(Example1, SingleStepConvergenceAtRightAngle) {
  Example1Config std_cfg{M_PI / 2};
  Example1Config avg_cfg{M_PI / 2, Example1Variant::averaged};
  auto chain = example1_chain(std_cfg);
  auto tree = example1_as_tree(avg_cfg);
  for (double theta : {0.0, 0.4, 2.0}) {
    const Vector x0 = v2(std::cos(theta), std::sin(theta));
    EXPECT_LE(iterate(chain, 1.0, x0).norm(), 1e-15);
    Vector lifted = Vector::Zero(3);
    lifted.head(2) = x0;
    EXPECT_LE(iterate(tree, 2.0, lifted).norm(), 1e-15);
  }
}

TEST(Example1, TargetShiftsSolution) {
  Example1Config cfg{0.7};
  cfg.target = v2(2, -1);
  auto sys = example1_chain(cfg);
  EXPECT_LE((sys.matrix() * v2(2, -1) - sys.rhs()).norm(), 1e-14);
  EXPECT_THROW(Example1Config{0.0}.validate(), Error);
}

TEST(BruteForce, WorkedExampleAndFixedPoints) {
  Matrix a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  auto sys = TreeSystem::one_row_per_node(TreeTopology::star(2), a, (Vector(3) << 1, 1, 2).finished());
  EXPECT_LE((brute_force_iterate(sys, 1.0, v2(0, 0)) - v2(1.25, 0.75)).norm(), 1e-15);
  EXPECT_LE((brute_force_iterate(sys, 0.6, v2(1, 1)) - v2(1, 1)).norm(), 1e-15);

  testkit::Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = testkit::random_system(rng, {8, 6, 2, false});
    const double w = 0.05 + 0.019 * trial;
    Vector x = testkit::random_matrix(rng, s.dimension(), 1);
    EXPECT_LE((brute_force_iterate(s, w, x) - iterate(s, w, x)).norm(), 1e-11 * (1 + x.norm()));
  }
  EXPECT_THROW(brute_force_iterate(TreeSystem::one_row_per_node(TreeTopology::chain(33), Matrix::Ones(33, 1),
                                                                Vector::Ones(33)),
                                   1.0, Vector::Zero(1)),
               Error);
}
