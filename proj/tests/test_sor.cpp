#include <gtest/gtest.h>

#include <cmath>

#include "testing/random_systems.hpp"
#include "testing/stacked.hpp"
#include "treekz/oracles.hpp"
#include "treekz/solver.hpp"
#include "treekz/sor.hpp"

using namespace treekz;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

TreeSystem chain_1d() {
  Matrix a(2, 1);
  a << 1, 1;
  return TreeSystem::one_row_per_node(TreeTopology::chain(2), a, v2(0, 1));
}

TreeSystem single_equation() {
  Matrix a(1, 2);
  a << 1, 1;
  return TreeSystem::one_row_per_node(TreeTopology::chain(1), a, Vector::Constant(1, 2));
}

TreeSystem worked_example() {
  Matrix a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  return TreeSystem::one_row_per_node(TreeTopology::star(2), a, (Vector(3) << 1, 1, 2).finished());
}

}  // namespace

TEST(LeafOperators, ChainOfOnes) {
  auto ops = build_leaf_operators(chain_1d(), node(1));
  EXPECT_EQ(ops.S, (Matrix(2, 1) << 1, 1).finished());
  EXPECT_EQ(ops.D, v2(1, 1));
  EXPECT_EQ(ops.L, (Matrix(2, 2) << 0, 0, 1, 0).finished());
  EXPECT_EQ(ops.b, v2(0, 1));
  EXPECT_THROW(build_leaf_operators(chain_1d(), node(0)), Error);
}

TEST(LeafOperators, OrthogonalRowsHaveZeroL) {
  auto sys = TreeSystem::one_row_per_node(TreeTopology::chain(2), Matrix::Identity(2, 2), v2(1, 1));
  EXPECT_TRUE(build_leaf_operators(sys, node(1)).L.isZero());
}

TEST(LeafOperators, SingleNode) {
  auto ops = build_leaf_operators(single_equation(), node(0));
  EXPECT_EQ(ops.S, (Matrix(1, 2) << 1, 1).finished());
  EXPECT_EQ(ops.D, Vector::Constant(1, 2.0));
  EXPECT_EQ(ops.L, Matrix::Zero(1, 1));
}

TEST(BuildSor, ChainClosedForm) {
  for (double w : {0.25, 0.5, 1.0, 1.5, 1.9}) {
    auto ops = build_sor(chain_1d(), w);
    EXPECT_NEAR(ops.B(0, 0), 1 - w * (2 - w), 1e-15);
    EXPECT_NEAR(ops.bvec(0), w, 1e-15);
    EXPECT_NEAR(ops.rho_hat, (1 - w) * (1 - w), 1e-15);
  }
  EXPECT_NEAR(build_sor(chain_1d(), 1.0).rho_hat, 0.0, 1e-15);
}

TEST(BuildSor, SmallOmegaApproachesIdentity) {
  testkit::Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto sys = testkit::random_system(rng);
    auto ops = build_sor(sys, 1e-6);
    const auto d = sys.dimension();
    EXPECT_LE((ops.B - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-4);
    EXPECT_LE(ops.bvec.cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(BuildSor, Example1StandardMatchesClosedForm) {
  for (double alpha : {M_PI / 6, M_PI / 3, M_PI / 2, 1.0}) {
    Example1Config cfg{alpha};
    for (double w = 0.1; w < 2.0; w += 0.1) {
      auto ops = build_sor(example1_chain(cfg), w);
      EXPECT_LE((ops.B - example1_iteration_matrix(cfg, w)).cwiseAbs().maxCoeff(), 1e-12) << alpha << " " << w;
    }
  }
}

TEST(IterateViaSor, WorkedExample) {
  auto sys = worked_example();
  auto ops = build_sor(sys, 1.0);
  EXPECT_LE((iterate_via_sor(ops, v2(0, 0)) - v2(1.25, 0.75)).norm(), 1e-15);
  EXPECT_EQ(iterate_via_sor(ops, v2(0, 0)), ops.bvec);
  EXPECT_LE((iterate_via_sor(ops, v2(1, 1)) - v2(1, 1)).norm(), 1e-15);
  EXPECT_THROW(iterate_via_sor(ops, Vector::Zero(3)), Error);
}

TEST(Restrict, FullRankIsWholeSpace) {
  testkit::Rng rng(6);
  auto sys = testkit::random_unique_system(rng, 4);
  auto ops = build_sor(sys, 1.3);
  EXPECT_EQ(ops.basis.cols(), 4);
  EXPECT_NEAR(ops.rho_hat, spectral_radius(ops.B), 1e-12);
}

TEST(Restrict, SingleEquation) {
  for (double w : {0.3, 1.0, 1.7}) {
    auto ops = build_sor(single_equation(), w);
    ASSERT_EQ(ops.B_hat.rows(), 1);
    EXPECT_NEAR(ops.B_hat(0, 0), 1 - w, 1e-15);
    EXPECT_NEAR(ops.rho_hat, std::abs(1 - w), 1e-15);
    auto r = restrict_to_row_space(ops);
    EXPECT_EQ(r.B_hat, ops.B_hat);
  }
}

TEST(FixedPoint, Chain) {
  for (double w : {0.25, 0.5, 1.0, 1.5}) EXPECT_NEAR(fixed_point(build_sor(chain_1d(), w))(0), 1 / (2 - w), 1e-14);
  auto ops = build_sor(chain_1d(), 0.5);
  const Vector x = fixed_point(ops);
  EXPECT_LE((iterate_via_sor(ops, x) - x).norm(), 1e-15);
  EXPECT_LE(fixed_point_residual(ops, x).norm(), 1e-14);
  EXPECT_THROW(fixed_point(build_sor(chain_1d(), 2.5)), Error);
}

TEST(FixedPoint, ConsistentIsMinimalNorm) {
  testkit::Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    auto sys = testkit::make_consistent(rng, testkit::random_system(rng, {8, 6, 2, trial % 2 == 1}));
    const Vector xm = pseudo_solve(sys.matrix(), sys.rhs());
    for (double w : {0.3, 1.0, 1.8}) {
      EXPECT_LE((fixed_point(build_sor(sys, w)) - xm).norm(), 1e-9 * std::max(1.0, xm.norm()));
    }
  }
}

TEST(FixedPoint, MatchesSolverOnInconsistentSystems) {
  testkit::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = testkit::random_matrix(rng, 4, 4);
    Vector b = testkit::random_matrix(rng, 4, 1);
    auto sys = testkit::distribute_rows(rng, a, b);
    const double w = 0.4 + 0.05 * trial;
    auto ops = build_sor(sys, w);
    if (ops.rho_hat > 0.999) continue;
    SolverConfig cfg;
    cfg.omega = w;
    cfg.tolerance = 1e-14;
    cfg.max_iterations = 1000000;
    auto r = solve(sys, cfg);
    const Vector x = fixed_point(ops);
    EXPECT_LE((r.solution - x).norm(), 1e-12 / (1 - ops.rho_hat) * std::max(1.0, x.norm()) * 10) << trial;
  }
}

TEST(OmegaSweep, SingleEquationAndChain) {
  for (const auto& sys : {single_equation(), chain_1d()}) {
    auto s = omega_sweep(sys);
    EXPECT_NEAR(s.omega_opt, 1.0, 1e-6);
    EXPECT_NEAR(s.rho_opt, 0.0, 1e-6);
    EXPECT_NEAR(s.Omega, 2.0, 1e-6);
    EXPECT_FALSE(s.reentry);
    EXPECT_EQ(s.grid.size(), 800u);
  }
}

TEST(OmegaSweep, AveragedExampleTree) {
  Example1Config cfg{M_PI / 3, Example1Variant::averaged};
  auto tree = example1_as_tree(cfg);
  const Matrix plane = example1_plane_basis();
  auto s = omega_sweep([&](double w) { return restrict_to_subspace(build_sor(tree, w).B, plane).rho_hat; });
  EXPECT_NEAR(s.omega_opt, 2.0, 1e-3);
  EXPECT_NEAR(s.rho_opt, 0.5, 1e-6);
  EXPECT_NEAR(s.Omega, 8.0 / 3.0, 1e-3);
}

TEST(OmegaSweep, FlagsReentryAndWarnsAboveFour) {
  auto bumpy = [](double w) { return w < 1.0 ? 1 - w / 2 : (w < 2.0 ? 0.5 + (w - 1) : (w < 3.0 ? 0.9 : 1.2)); };
  auto s = omega_sweep(bumpy, {4.5, 0.01, 1e-9});
  EXPECT_NEAR(s.omega_opt, 1.0, 1e-6);
  EXPECT_NEAR(s.Omega, 1.5, 1e-6);
  EXPECT_TRUE(s.reentry);
  EXPECT_EQ(s.warnings.size(), 2u);
  EXPECT_THROW(omega_sweep(bumpy, {4.0, 0.0, 1e-9}), Error);
}

TEST(Properties, OperatorEquivalence) {
  testkit::Rng rng(31);
  std::uniform_real_distribution<double> omega(0.01, 1.99);
  for (int trial = 0; trial < 200; ++trial) {
    auto sys = testkit::random_system(rng, {8, 6, 2, trial % 3 == 0});
    const double w = omega(rng);
    Vector x = testkit::random_matrix(rng, sys.dimension(), 1);
    const Vector direct = iterate(sys, w, x);
    EXPECT_LE((direct - iterate_via_sor(build_sor(sys, w), x)).norm(), 1e-11 * (1 + x.norm()));
    EXPECT_LE((direct - brute_force_iterate(sys, w, x)).norm(), 1e-11 * (1 + x.norm()));
  }
}

TEST(Properties, SpectralRadiusBelowOne) {
  testkit::Rng rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    auto sys = testkit::random_system(rng, {8, 6, 2, trial % 2 == 0});
    const Matrix basis = row_space_basis(sys.matrix());
    for (double w : {0.1, 0.5, 1.0, 1.5, 1.9}) EXPECT_LT(restricted_spectral_radius(sys, w, basis), 1.0);
  }
}

TEST(Properties, LeafOperatorsAreNonExpansive) {
  testkit::Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    auto sys = testkit::random_system(rng);
    auto ops = build_sor(sys, 0.1 + 0.037 * trial);
    for (const auto& bl : ops.B_leaf) {
      Vector z1 = testkit::random_matrix(rng, sys.dimension(), 1), z2 = testkit::random_matrix(rng, sys.dimension(), 1);
      EXPECT_LE((bl * z1 - bl * z2).norm(), (z1 - z2).norm() * (1 + 1e-12));
    }
  }
}

TEST(Properties, StackedCommutationAndAssembly) {
  testkit::Rng rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    auto sys = testkit::random_system(rng, {6, 4, 2, false});
    const double w = 0.2 + 0.03 * trial;
    auto st = testkit::stack(sys);
    const Eigen::Index m = st.S.rows();
    const Matrix T = st.D + w * st.L;
    const Matrix Tinv = T.triangularView<Eigen::Lower>().solve(Matrix::Identity(m, m));
    EXPECT_LE((Tinv * st.W - st.W * Tinv).norm(), 1e-12 * (1 + Tinv.norm()));

    auto ops = build_sor(sys, w);
    const auto d = sys.dimension();
    const Matrix B = Matrix::Identity(d, d) - w * st.S.transpose() * Tinv * st.W * st.S;
    const Vector bvec = w * st.S.transpose() * Tinv * st.W * st.b;
    EXPECT_LE((B - ops.B).norm(), 1e-11);
    EXPECT_LE((bvec - ops.bvec).norm(), 1e-11 * (1 + bvec.norm()));
  }
}

TEST(Properties, RowSpaceIsInvariant) {
  testkit::Rng rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    auto sys = testkit::random_system(rng, {8, 6, 2, true});
    auto ops = build_sor(sys, 0.1 + 0.035 * trial);
    EXPECT_LE(invariance_defect(ops.B, ops.basis), 1e-10);
  }
}
