#include "treekz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace treekz {

void SolverConfig::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::InvalidArgument, "relaxation parameter must be positive");
  }
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
}

namespace {

Vector apply_node(const TreeSystem& system, NodeId v, double omega, Vector x) {
  for (const auto& eq : system.equations(v)) x = kaczmarz_update(eq, x, omega);
  return x;
}

// Children see the parent's message; the message differs from the parent's
// own estimate only when a hook perturbs it.
void disperse_into(const TreeSystem& system, double omega, const Vector& x_root, MessageHook* hook,
                   NodeVectors& x) {
  const auto& tree = system.tree();
  x.assign(tree.node_count(), Vector());
  NodeVectors message(tree.node_count());
  for (NodeId v : tree.preorder()) {
    const auto p = tree.parent(v);
    const Vector& input = p ? message[p->index()] : x_root;
    x[v.index()] = apply_node(system, v, omega, input);
    if (!tree.is_leaf(v)) {
      message[v.index()] = x[v.index()];
      if (hook) hook->on_dispersion(v, message[v.index()]);
    }
  }
}

PoolResult pool_impl(const TreeTopology& tree, const NodeVectors& leaf_estimates, MessageHook* hook) {
  if (leaf_estimates.size() != tree.node_count()) {
    throw Error(ErrorCode::MissingLeafEstimate, "estimate table does not cover every node");
  }
  PoolResult out;
  out.y.assign(tree.node_count(), Vector());
  NodeVectors message(tree.node_count());
  const auto order = tree.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    Vector& y = out.y[v.index()];
    if (tree.is_leaf(v)) {
      y = leaf_estimates[v.index()];
      if (y.size() == 0) throw Error(ErrorCode::MissingLeafEstimate, "no estimate for " + tree.describe(v));
    } else {
      // Ascending child order keeps the floating-point sum reproducible.
      for (NodeId c : tree.children(v)) {
        const Vector& m = message[c.index()];
        if (y.size() == 0) {
          y = tree.edge_weight(c) * m;
        } else {
          require_dimension(y.size(), m.size(), "pool");
          y += tree.edge_weight(c) * m;
        }
      }
    }
    if (v != tree.root()) {
      message[v.index()] = y;
      if (hook) hook->on_pooling(v, message[v.index()]);
    }
  }
  out.root = out.y[tree.root().index()];
  return out;
}

double relative_scale(const Vector& x) { return std::max(1.0, x.norm()); }

}  // namespace

NodeVectors disperse(const TreeSystem& system, double omega, const Vector& x_root) {
  require_dimension(system.dimension(), x_root.size(), "disperse");
  NodeVectors x;
  disperse_into(system, omega, x_root, nullptr, x);
  return x;
}

PoolResult pool(const TreeTopology& tree, const NodeVectors& leaf_estimates) {
  return pool_impl(tree, leaf_estimates, nullptr);
}

SweepResult sweep(const TreeSystem& system, double omega, const Vector& x, MessageHook* hook) {
  require_dimension(system.dimension(), x.size(), "sweep");
  SweepResult out;
  disperse_into(system, omega, x, hook, out.x);
  auto pooled = pool_impl(system.tree(), out.x, hook);
  out.next = std::move(pooled.root);
  out.y = std::move(pooled.y);
  return out;
}

Vector iterate(const TreeSystem& system, double omega, const Vector& x) {
  return sweep(system, omega, x).next;
}

SolveResult solve(const TreeSystem& system, const SolverConfig& config, MessageHook* hook) {
  config.validate();
  SolveResult result;
  Vector x = config.initial.value_or(Vector::Zero(system.dimension()));
  require_dimension(system.dimension(), x.size(), "solve initial vector");
  if (config.trace_level != TraceLevel::none) result.trace = IterationTrace{config.trace_level, {}};

  for (int n = 0; n < config.max_iterations; ++n) {
    auto step = sweep(system, config.omega, x, hook);
    const double change = (step.next - x).norm();
    const bool done = change <= config.tolerance * relative_scale(step.next);
    if (result.trace) {
      IterationRecord rec{x, step.next, change, {}, {}};
      if (config.trace_level == TraceLevel::all_nodes) {
        rec.node_x = std::move(step.x);
        rec.node_y = std::move(step.y);
      }
      result.trace->iterations.push_back(std::move(rec));
    }
    x = std::move(step.next);
    result.iterations_used = n + 1;
    result.final_change = change;
    if (!std::isfinite(change)) break;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.solution = std::move(x);
  return result;
}

std::vector<NodeLimit> node_limits(const IterationTrace& trace) {
  if (trace.level != TraceLevel::all_nodes || trace.iterations.empty()) {
    throw Error(ErrorCode::NoTrace, "per-node limits need a non-empty all_nodes trace");
  }
  const auto& last = trace.iterations.back();
  std::vector<NodeLimit> out;
  out.reserve(last.node_x.size());
  for (std::size_t v = 0; v < last.node_x.size(); ++v) out.push_back({last.node_x[v], last.node_y[v]});
  return out;
}

}  // namespace treekz
