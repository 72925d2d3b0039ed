#include "treekz/ensemble.hpp"

#include <cmath>
#include <random>
#include <string>

namespace treekz {

std::string_view to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::almost_orthogonal: return "almost_orthogonal";
    case MatrixKind::normal: return "normal";
    case MatrixKind::uniform: return "uniform";
  }
  return "?";
}

std::string_view to_string(TreeShape shape) {
  switch (shape) {
    case TreeShape::chain: return "chain";
    case TreeShape::fig_graphs_3: return "fig_graphs_3";
    case TreeShape::fig_graphs_8: return "fig_graphs_8";
    case TreeShape::custom: return "custom";
  }
  return "?";
}

MatrixKind parse_matrix_kind(std::string_view name) {
  for (auto k : {MatrixKind::almost_orthogonal, MatrixKind::normal, MatrixKind::uniform}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown matrix kind '" + std::string(name) + "'");
}

TreeShape parse_tree_shape(std::string_view name) {
  for (auto s : {TreeShape::chain, TreeShape::fig_graphs_3, TreeShape::fig_graphs_8, TreeShape::custom}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown tree shape '" + std::string(name) + "'");
}

double truncate_one_decimal(double x) { return std::trunc(x * 10.0) / 10.0; }

Matrix generate_matrix(MatrixKind kind, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::SizeMismatch, "matrix size must be positive");
  const auto size = static_cast<Eigen::Index>(n);
  std::mt19937_64 rng(seed);
  Matrix m(size, size);
  switch (kind) {
    case MatrixKind::uniform: {
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      for (Eigen::Index i = 0; i < size; ++i)
        for (Eigen::Index j = 0; j < size; ++j) m(i, j) = unit(rng);
      return m;
    }
    case MatrixKind::normal:
    case MatrixKind::almost_orthogonal: {
      std::normal_distribution<double> gauss;
      for (Eigen::Index i = 0; i < size; ++i)
        for (Eigen::Index j = 0; j < size; ++j) m(i, j) = gauss(rng);
      if (kind == MatrixKind::normal) return m;
      // Q from QR with the signs of R's diagonal folded in is Haar distributed.
      Eigen::HouseholderQR<Matrix> qr(m);
      Matrix q = qr.householderQ() * Matrix::Identity(size, size);
      const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (Eigen::Index j = 0; j < size; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
      }
      return q.unaryExpr([](double x) { return truncate_one_decimal(x); });
    }
  }
  return m;
}

TreeTopology make_tree(TreeShape shape, std::size_t size) {
  auto fixed = [](std::size_t n, std::initializer_list<std::pair<int, int>> edges) {
    TreeSpec spec;
    spec.node_count = n;
    spec.root = node(0);
    for (std::size_t i = 0; i < n; ++i) spec.labels.push_back(static_cast<std::int64_t>(i + 1));
    for (auto [p, c] : edges) spec.edges.push_back({node(p - 1), node(c - 1), std::nullopt});
    return TreeTopology::build(spec);
  };
  switch (shape) {
    case TreeShape::chain:
      if (size == 0) throw Error(ErrorCode::SizeMismatch, "chain needs at least one node");
      return TreeTopology::chain(size);
    case TreeShape::fig_graphs_3:
      if (size != 3) throw Error(ErrorCode::SizeMismatch, "fig_graphs_3 has 3 nodes, size is " + std::to_string(size));
      return fixed(3, {{1, 2}, {1, 3}});
    case TreeShape::fig_graphs_8:
      if (size != 8) throw Error(ErrorCode::SizeMismatch, "fig_graphs_8 has 8 nodes, size is " + std::to_string(size));
      return fixed(8, {{1, 2}, {1, 3}, {2, 4}, {2, 5}, {3, 6}, {3, 7}, {3, 8}});
    case TreeShape::custom:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "custom trees must be supplied explicitly");
}

GeneratedProblem generate(MatrixKind kind, TreeShape shape, std::size_t size, std::uint64_t seed,
                          const std::optional<TreeTopology>& custom_tree) {
  TreeTopology tree = [&] {
    if (shape != TreeShape::custom) return make_tree(shape, size);
    if (!custom_tree) throw Error(ErrorCode::InvalidArgument, "custom shape needs a tree");
    return *custom_tree;
  }();
  if (tree.node_count() != size) {
    throw Error(ErrorCode::SizeMismatch, "tree has " + std::to_string(tree.node_count()) +
                                             " nodes but the matrix has " + std::to_string(size) + " rows");
  }
  const Matrix a = generate_matrix(kind, size, seed);
  // Separate stream for the solution so the matrix does not depend on it.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss;
  Vector x(static_cast<Eigen::Index>(size));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = gauss(rng);
  x /= x.norm();
  return {TreeSystem::one_row_per_node(std::move(tree), a, a * x), x};
}

}  // namespace treekz
