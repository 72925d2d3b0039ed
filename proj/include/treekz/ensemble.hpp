#pragma once

// Random test problems in the three matrix families used for the
// relaxation experiments, on chain or fixed small trees.

#include <cstdint>
#include <optional>
#include <string_view>

#include "treekz/system.hpp"

namespace treekz {

enum class MatrixKind { almost_orthogonal, normal, uniform };
enum class TreeShape { chain, fig_graphs_3, fig_graphs_8, custom };

std::string_view to_string(MatrixKind kind);
std::string_view to_string(TreeShape shape);
MatrixKind parse_matrix_kind(std::string_view name);
TreeShape parse_tree_shape(std::string_view name);

/// n x n matrix. almost_orthogonal: Haar-random orthogonal matrix with every
/// entry truncated toward zero to one decimal. normal: iid N(0, 1).
/// uniform: iid U[-1, 1].
Matrix generate_matrix(MatrixKind kind, std::size_t n, std::uint64_t seed);

/// Round toward zero at the first decimal.
double truncate_one_decimal(double x);

/// chain: path of `size` nodes with weights 1. fig_graphs_3: 1 -> {2, 3}.
/// fig_graphs_8: 1 -> {2, 3}, 2 -> {4, 5}, 3 -> {6, 7, 8}. Uniform weights,
/// labels as listed. custom is not constructible here.
TreeTopology make_tree(TreeShape shape, std::size_t size);

struct GeneratedProblem {
  TreeSystem system;
  /// Unit-norm solution of the generated system.
  Vector x_true;
};

/// One row per node (row i on the node with index i). custom_tree is used
/// for TreeShape::custom. Throws SizeMismatch when the tree does not have
/// `size` nodes.
GeneratedProblem generate(MatrixKind kind, TreeShape shape, std::size_t size, std::uint64_t seed,
                          const std::optional<TreeTopology>& custom_tree = std::nullopt);

}  // namespace treekz
