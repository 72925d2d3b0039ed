#pragma once

// Rooted, edge-weighted trees that index the equations of a distributed
// system. A TreeTopology is immutable once built and always valid.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treekz/errors.hpp"

namespace treekz {

/// Dense node index in [0, node_count).
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}
  constexpr std::size_t index() const noexcept { return value; }
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline constexpr NodeId node(std::size_t index) { return NodeId(static_cast<std::uint32_t>(index)); }

struct Edge {
  NodeId parent;
  NodeId child;
  /// Omitted weights default to 1/|children(parent)|.
  std::optional<double> weight;
};

/// Unvalidated description of a tree, as read from a file or built by hand.
struct TreeSpec {
  std::size_t node_count = 0;
  NodeId root;
  std::vector<Edge> edges;
  /// External identifiers used in messages; empty means "use the index".
  std::vector<std::int64_t> labels;
};

inline constexpr double kWeightSumTolerance = 1e-12;

/// Every invariant violation of spec, in a deterministic order. Empty iff the
/// spec describes a valid weighted rooted tree.
std::vector<Violation> validate(const TreeSpec& spec);

class TreeTopology {
 public:
  /// Throws ValidationError listing all violations.
  static TreeTopology build(const TreeSpec& spec);

  /// Path 0 -> 1 -> ... -> n-1, every weight 1.
  static TreeTopology chain(std::size_t n);

  /// Root 0 with children 1..k, uniform weights.
  static TreeTopology star(std::size_t leaves);

  std::size_t node_count() const noexcept { return parent_.size(); }
  NodeId root() const noexcept { return root_; }
  std::optional<NodeId> parent(NodeId v) const;
  std::span<const NodeId> children(NodeId v) const;
  /// w(v, parent(v)); 1 for the root.
  double edge_weight(NodeId v) const;
  std::span<const NodeId> leaves() const noexcept { return leaves_; }
  bool is_leaf(NodeId v) const;
  /// Number of edges between the root and v.
  std::size_t level(NodeId v) const;
  /// Longest root-to-leaf edge count.
  std::size_t depth() const noexcept { return depth_; }
  std::int64_t label(NodeId v) const;
  std::string describe(NodeId v) const;
  /// Nodes in depth-first preorder, children ascending.
  std::span<const NodeId> preorder() const noexcept { return preorder_; }

  /// Equivalent TreeSpec with all weights explicit.
  TreeSpec to_spec() const;

 private:
  TreeTopology() = default;
  void check(NodeId v) const;

  NodeId root_;
  std::vector<std::optional<NodeId>> parent_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<double> weight_;
  std::vector<NodeId> leaves_;
  std::vector<std::size_t> level_;
  std::vector<NodeId> preorder_;
  std::vector<std::int64_t> labels_;
  std::size_t depth_ = 0;
};

struct LeafPath {
  NodeId leaf;
  /// root first, leaf last
  std::vector<NodeId> nodes;
  std::size_t length() const noexcept { return nodes.size(); }
};

/// Root-to-v node sequence.
std::vector<NodeId> path_from_root(const TreeTopology& tree, NodeId v);

/// One path per leaf, leaves in ascending order.
std::vector<LeafPath> leaf_paths(const TreeTopology& tree);

/// Product of edge weights on the path from u up to its predecessor v;
/// path_weight(v, v) = 1. Throws NotOnPath when v is not on the root path of u.
double path_weight(const TreeTopology& tree, NodeId u, NodeId v);

/// w(leaf, root) for every leaf. The values sum to one.
std::map<NodeId, double> leaf_weights(const TreeTopology& tree);

/// Sum of w(leaf, root) over the leaves below or equal to v.
double node_cumulative_weight(const TreeTopology& tree, NodeId v);

/// node_cumulative_weight for every node, computed bottom-up.
std::vector<double> cumulative_weights(const TreeTopology& tree);

}  // namespace treekz
