#include "testing/stacked.hpp"

#include "treekz/sor.hpp"

namespace treekz::testkit {

Stacked stack(const TreeSystem& system) {
  const auto weights = leaf_weights(system.tree());
  std::vector<LeafOperators> ops;
  Eigen::Index total = 0;
  for (NodeId leaf : system.tree().leaves()) {
    ops.push_back(build_leaf_operators(system, leaf));
    total += ops.back().S.rows();
  }
  const Eigen::Index d = system.dimension();
  Stacked s{Matrix::Zero(total, d), Vector::Zero(total), Matrix::Zero(total, total), Matrix::Zero(total, total),
            Matrix::Zero(total, total)};
  Eigen::Index at = 0;
  for (const auto& op : ops) {
    const Eigen::Index m = op.S.rows();
    s.S.middleRows(at, m) = op.S;
    s.b.segment(at, m) = op.b;
    s.D.block(at, at, m, m) = op.D.asDiagonal();
    s.L.block(at, at, m, m) = op.L;
    s.W.block(at, at, m, m) = weights.at(op.leaf) * Matrix::Identity(m, m);
    at += m;
  }
  return s;
}

}  // namespace treekz::testkit
