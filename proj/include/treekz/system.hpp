#pragma once

#include <span>
#include <vector>

#include "treekz/linalg.hpp"
#include "treekz/topology.hpp"

namespace treekz {

/// Equations distributed over the nodes of a tree. Every node holds at least
/// one row; a node with several rows applies them in stored order, which is
/// the same as replacing the node by a path of single-row nodes.
class TreeSystem {
 public:
  /// equations[v] are the rows held by node v. Throws ValidationError on
  /// missing equations or mixed dimensions.
  TreeSystem(TreeTopology tree, std::vector<std::vector<RowEquation>> equations);

  /// Convenience: one row per node, row i of a belongs to node i.
  static TreeSystem one_row_per_node(TreeTopology tree, const Matrix& a, const Vector& b);

  const TreeTopology& tree() const noexcept { return tree_; }
  std::span<const RowEquation> equations(NodeId v) const;
  Eigen::Index dimension() const noexcept { return dimension_; }
  std::size_t row_count() const noexcept { return row_count_; }

  /// All rows stacked in node order (stored order within a node).
  Matrix matrix() const;
  Vector rhs() const;
  /// Node owning each row of matrix().
  std::vector<NodeId> row_owners() const;

  /// Same topology and rows with a different right-hand side.
  TreeSystem with_rhs(const Vector& b) const;

 private:
  TreeTopology tree_;
  std::vector<std::vector<RowEquation>> equations_;
  Eigen::Index dimension_ = 0;
  std::size_t row_count_ = 0;
};

}  // namespace treekz
