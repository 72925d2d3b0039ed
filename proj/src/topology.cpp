#include "treekz/topology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace treekz {

namespace {

std::string label_of(const TreeSpec& spec, NodeId v) {
  if (v.index() < spec.labels.size()) return std::to_string(spec.labels[v.index()]);
  return std::to_string(v.value);
}

std::string edge_name(const TreeSpec& spec, const Edge& e) {
  return "(" + label_of(spec, e.parent) + "->" + label_of(spec, e.child) + ")";
}

bool in_range(const TreeSpec& spec, NodeId v) { return v.index() < spec.node_count; }

}  // namespace

std::vector<Violation> validate(const TreeSpec& spec) {
  std::vector<Violation> out;
  const std::size_t n = spec.node_count;
  if (n == 0) {
    out.push_back({ErrorCode::DisconnectedNode, "tree has no nodes"});
    return out;
  }
  if (!spec.labels.empty() && spec.labels.size() != n) {
    out.push_back({ErrorCode::InvalidArgument, "label count does not match node count"});
  }
  if (!in_range(spec, spec.root)) {
    out.push_back({ErrorCode::UnknownNode, "root " + label_of(spec, spec.root) + " is not a node"});
    return out;
  }

  std::vector<std::optional<NodeId>> parent(n);
  std::vector<std::vector<const Edge*>> child_edges(n);
  for (const auto& e : spec.edges) {
    if (!in_range(spec, e.parent) || !in_range(spec, e.child)) {
      out.push_back({ErrorCode::UnknownNode, "edge " + edge_name(spec, e) + " references an unknown node"});
      continue;
    }
    if (e.parent == e.child) {
      out.push_back({ErrorCode::CycleDetected, "edge " + edge_name(spec, e) + " is a self loop"});
      continue;
    }
    if (e.child == spec.root) {
      out.push_back({ErrorCode::CycleDetected, "edge " + edge_name(spec, e) + " gives the root a parent"});
      continue;
    }
    if (parent[e.child.index()]) {
      out.push_back({ErrorCode::CycleDetected,
                     "node " + label_of(spec, e.child) + " has more than one parent"});
      continue;
    }
    if (e.weight && !(std::isfinite(*e.weight) && *e.weight > 0.0)) {
      std::ostringstream msg;
      msg << "edge " << edge_name(spec, e) << " has weight " << *e.weight;
      out.push_back({ErrorCode::WeightNotPositive, msg.str()});
    }
    parent[e.child.index()] = e.parent;
    child_edges[e.parent.index()].push_back(&e);
  }

  for (std::size_t v = 0; v < n; ++v) {
    NodeId cur = node(v);
    std::size_t steps = 0;
    while (cur != spec.root && parent[cur.index()] && steps < n) {
      cur = *parent[cur.index()];
      ++steps;
    }
    if (cur == spec.root) continue;
    if (steps >= n) {
      out.push_back({ErrorCode::CycleDetected, "node " + label_of(spec, node(v)) + " lies on a cycle"});
    } else {
      out.push_back({ErrorCode::DisconnectedNode,
                     "node " + label_of(spec, node(v)) + " is not connected to the root"});
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    const auto& edges = child_edges[v];
    if (edges.empty()) continue;
    const double uniform = 1.0 / static_cast<double>(edges.size());
    double sum = 0.0;
    std::string names;
    bool bad_weight = false;
    for (const Edge* e : edges) {
      const double w = e->weight.value_or(uniform);
      bad_weight = bad_weight || !(std::isfinite(w) && w > 0.0);
      sum += w;
      names += (names.empty() ? "" : ", ") + edge_name(spec, *e);
    }
    if (!bad_weight && std::abs(sum - 1.0) > kWeightSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "weights of edges " << names << " sum to " << sum << ", not 1";
      out.push_back({ErrorCode::WeightsNotNormalized, msg.str()});
    }
  }
  return out;
}

TreeTopology TreeTopology::build(const TreeSpec& spec) {
  if (auto violations = validate(spec); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  const std::size_t n = spec.node_count;
  TreeTopology t;
  t.root_ = spec.root;
  t.parent_.assign(n, std::nullopt);
  t.children_.assign(n, {});
  t.weight_.assign(n, 1.0);
  t.level_.assign(n, 0);
  t.labels_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    t.labels_[v] = spec.labels.empty() ? static_cast<std::int64_t>(v) : spec.labels[v];
  }
  for (const auto& e : spec.edges) {
    t.parent_[e.child.index()] = e.parent;
    t.children_[e.parent.index()].push_back(e.child);
  }
  for (auto& kids : t.children_) std::sort(kids.begin(), kids.end());
  for (const auto& e : spec.edges) {
    const double uniform = 1.0 / static_cast<double>(t.children_[e.parent.index()].size());
    t.weight_[e.child.index()] = e.weight.value_or(uniform);
  }

  std::vector<NodeId> stack{t.root_};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    t.preorder_.push_back(v);
    const auto& kids = t.children_[v.index()];
    if (kids.empty()) t.leaves_.push_back(v);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      t.level_[it->index()] = t.level_[v.index()] + 1;
      t.depth_ = std::max(t.depth_, t.level_[it->index()]);
      stack.push_back(*it);
    }
  }
  std::sort(t.leaves_.begin(), t.leaves_.end());
  return t;
}

TreeTopology TreeTopology::chain(std::size_t n) {
  TreeSpec spec;
  spec.node_count = n;
  spec.root = node(0);
  for (std::size_t v = 1; v < n; ++v) spec.edges.push_back({node(v - 1), node(v), 1.0});
  return build(spec);
}

TreeTopology TreeTopology::star(std::size_t leaves) {
  TreeSpec spec;
  spec.node_count = leaves + 1;
  spec.root = node(0);
  for (std::size_t v = 1; v <= leaves; ++v) spec.edges.push_back({node(0), node(v), std::nullopt});
  return build(spec);
}

void TreeTopology::check(NodeId v) const {
  if (v.index() >= node_count()) {
    throw Error(ErrorCode::UnknownNode, "node index " + std::to_string(v.value) + " out of range");
  }
}

std::optional<NodeId> TreeTopology::parent(NodeId v) const {
  check(v);
  return parent_[v.index()];
}

std::span<const NodeId> TreeTopology::children(NodeId v) const {
  check(v);
  return children_[v.index()];
}

double TreeTopology::edge_weight(NodeId v) const {
  check(v);
  return weight_[v.index()];
}

bool TreeTopology::is_leaf(NodeId v) const { return children(v).empty(); }

std::size_t TreeTopology::level(NodeId v) const {
  check(v);
  return level_[v.index()];
}

std::int64_t TreeTopology::label(NodeId v) const {
  check(v);
  return labels_[v.index()];
}

std::string TreeTopology::describe(NodeId v) const { return "node " + std::to_string(label(v)); }

TreeSpec TreeTopology::to_spec() const {
  TreeSpec spec;
  spec.node_count = node_count();
  spec.root = root_;
  spec.labels = labels_;
  for (NodeId v : preorder_) {
    for (NodeId c : children_[v.index()]) spec.edges.push_back({v, c, weight_[c.index()]});
  }
  return spec;
}

std::vector<NodeId> path_from_root(const TreeTopology& tree, NodeId v) {
  std::vector<NodeId> path{v};
  for (auto p = tree.parent(v); p; p = tree.parent(*p)) path.push_back(*p);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<LeafPath> leaf_paths(const TreeTopology& tree) {
  std::vector<LeafPath> out;
  out.reserve(tree.leaves().size());
  for (NodeId leaf : tree.leaves()) out.push_back({leaf, path_from_root(tree, leaf)});
  return out;
}

double path_weight(const TreeTopology& tree, NodeId u, NodeId v) {
  double w = 1.0;
  NodeId cur = u;
  while (cur != v) {
    const auto p = tree.parent(cur);
    if (!p) {
      throw Error(ErrorCode::NotOnPath,
                  tree.describe(u) + " is not a successor of " + tree.describe(v));
    }
    w *= tree.edge_weight(cur);
    cur = *p;
  }
  return w;
}

std::map<NodeId, double> leaf_weights(const TreeTopology& tree) {
  std::map<NodeId, double> out;
  for (NodeId leaf : tree.leaves()) out.emplace(leaf, path_weight(tree, leaf, tree.root()));
  return out;
}

std::vector<double> cumulative_weights(const TreeTopology& tree) {
  std::vector<double> cum(tree.node_count(), 0.0);
  const auto order = tree.preorder();
  // Children follow their parent in preorder, so a reverse sweep is bottom-up.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    if (tree.is_leaf(v)) {
      cum[v.index()] = path_weight(tree, v, tree.root());
      continue;
    }
    double sum = 0.0;
    for (NodeId c : tree.children(v)) sum += cum[c.index()];
    cum[v.index()] = sum;
  }
  return cum;
}

double node_cumulative_weight(const TreeTopology& tree, NodeId v) {
  double sum = 0.0;
  for (const auto& [leaf, w] : leaf_weights(tree)) {
    for (NodeId cur : path_from_root(tree, leaf)) {
      if (cur == v) {
        sum += w;
        break;
      }
    }
  }
  return sum;
}

}  // namespace treekz
