#pragma once

// The distributed Kaczmarz sweep: relaxed row updates disperse from the root
// to the leaves, then leaf estimates pool back to the root through the
// convex edge weights.

#include <optional>
#include <vector>

#include "treekz/system.hpp"

namespace treekz {

/// Per-node vectors indexed by NodeId::index().
using NodeVectors = std::vector<Vector>;

enum class TraceLevel { none, root_only, all_nodes };

struct SolverConfig {
  double omega = 1.0;
  int max_iterations = 10000;
  /// Stop once |x(n+1) - x(n)| <= tolerance * max(1, |x(n)|).
  double tolerance = 1e-10;
  /// Starting vector; zero when absent.
  std::optional<Vector> initial;
  TraceLevel trace_level = TraceLevel::none;

  /// Throws InvalidArgument on omega <= 0, max_iterations < 1 or tolerance < 0.
  void validate() const;
};

struct IterationRecord {
  Vector x_in;
  Vector x_out;
  double change = 0.0;
  /// Filled for TraceLevel::all_nodes only.
  NodeVectors node_x;
  NodeVectors node_y;
};

struct IterationTrace {
  TraceLevel level = TraceLevel::none;
  std::vector<IterationRecord> iterations;
};

struct SolveResult {
  Vector solution;
  int iterations_used = 0;
  bool converged = false;
  double final_change = 0.0;
  std::optional<IterationTrace> trace;
};

/// Hook for modifying the messages exchanged during a sweep. on_dispersion
/// sees the estimate node v sends to its children; on_pooling sees the
/// estimate non-root node v sends to its parent.
class MessageHook {
 public:
  virtual ~MessageHook() = default;
  virtual void on_dispersion(NodeId v, Vector& message) = 0;
  virtual void on_pooling(NodeId v, Vector& message) = 0;
};

/// Estimate held by every node after the dispersion stage.
NodeVectors disperse(const TreeSystem& system, double omega, const Vector& x_root);

struct PoolResult {
  Vector root;
  /// Pooled estimate y_v at every node; equals the input at leaves.
  NodeVectors y;
};

/// leaf_estimates is indexed by node; entries for non-leaves are ignored.
/// Throws MissingLeafEstimate if a leaf entry is empty.
PoolResult pool(const TreeTopology& tree, const NodeVectors& leaf_estimates);

struct SweepResult {
  Vector next;
  NodeVectors x;
  NodeVectors y;
};

/// One dispersion + pooling pass, optionally routing messages through hook.
SweepResult sweep(const TreeSystem& system, double omega, const Vector& x, MessageHook* hook = nullptr);

/// x(n+1) from x(n).
Vector iterate(const TreeSystem& system, double omega, const Vector& x);

SolveResult solve(const TreeSystem& system, const SolverConfig& config, MessageHook* hook = nullptr);

struct NodeLimit {
  Vector x;
  Vector y;
};

/// Per-node estimates of the last traced iteration. Throws NoTrace unless the
/// trace was recorded at TraceLevel::all_nodes.
std::vector<NodeLimit> node_limits(const IterationTrace& trace);

}  // namespace treekz
