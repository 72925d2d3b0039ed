#include "treekz/system.hpp"

namespace treekz {

TreeSystem::TreeSystem(TreeTopology tree, std::vector<std::vector<RowEquation>> equations)
    : tree_(std::move(tree)), equations_(std::move(equations)) {
  std::vector<Violation> problems;
  if (equations_.size() != tree_.node_count()) {
    problems.push_back({ErrorCode::SizeMismatch,
                        "equation table has " + std::to_string(equations_.size()) +
                            " entries for " + std::to_string(tree_.node_count()) + " nodes"});
    throw ValidationError(std::move(problems));
  }
  dimension_ = -1;
  for (std::size_t v = 0; v < equations_.size(); ++v) {
    if (equations_[v].empty()) {
      problems.push_back({ErrorCode::MissingEquation, tree_.describe(node(v)) + " holds no equation"});
    }
    for (const auto& eq : equations_[v]) {
      if (dimension_ < 0) dimension_ = eq.dimension();
      if (eq.dimension() != dimension_) {
        problems.push_back({ErrorCode::DimensionMismatch,
                            tree_.describe(node(v)) + " has a row of dimension " +
                                std::to_string(eq.dimension()) + ", expected " +
                                std::to_string(dimension_)});
      }
      ++row_count_;
    }
  }
  if (dimension_ == 0) problems.push_back({ErrorCode::DimensionMismatch, "rows have dimension 0"});
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

TreeSystem TreeSystem::one_row_per_node(TreeTopology tree, const Matrix& a, const Vector& b) {
  if (static_cast<std::size_t>(a.rows()) != tree.node_count() || a.rows() != b.size()) {
    throw Error(ErrorCode::SizeMismatch, "need exactly one row and one rhs entry per node");
  }
  std::vector<std::vector<RowEquation>> eqs(tree.node_count());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    eqs[static_cast<std::size_t>(i)].emplace_back(a.row(i).transpose(), b[i]);
  }
  return TreeSystem(std::move(tree), std::move(eqs));
}

std::span<const RowEquation> TreeSystem::equations(NodeId v) const {
  if (v.index() >= equations_.size()) {
    throw Error(ErrorCode::UnknownNode, "node index " + std::to_string(v.value) + " out of range");
  }
  return equations_[v.index()];
}

Matrix TreeSystem::matrix() const {
  Matrix a(static_cast<Eigen::Index>(row_count_), dimension_);
  Eigen::Index r = 0;
  for (const auto& rows : equations_) {
    for (const auto& eq : rows) a.row(r++) = eq.a().transpose();
  }
  return a;
}

Vector TreeSystem::rhs() const {
  Vector b(static_cast<Eigen::Index>(row_count_));
  Eigen::Index r = 0;
  for (const auto& rows : equations_) {
    for (const auto& eq : rows) b[r++] = eq.b();
  }
  return b;
}

std::vector<NodeId> TreeSystem::row_owners() const {
  std::vector<NodeId> owners;
  owners.reserve(row_count_);
  for (std::size_t v = 0; v < equations_.size(); ++v) {
    owners.insert(owners.end(), equations_[v].size(), node(v));
  }
  return owners;
}

TreeSystem TreeSystem::with_rhs(const Vector& b) const {
  require_dimension(static_cast<Eigen::Index>(row_count_), b.size(), "with_rhs");
  std::vector<std::vector<RowEquation>> eqs(equations_.size());
  Eigen::Index r = 0;
  for (std::size_t v = 0; v < equations_.size(); ++v) {
    for (const auto& eq : equations_[v]) eqs[v].emplace_back(eq.a(), b[r++]);
  }
  return TreeSystem(tree_, std::move(eqs));
}

}  // namespace treekz
