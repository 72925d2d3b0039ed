#pragma once

// Additive message errors during dispersion and pooling, and the resulting
// stability bound  limsup |x(omega) - x_e(n)| <= 2 K M / (1 - rho).

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "treekz/solver.hpp"

namespace treekz {

enum class NoiseDistribution { uniform_ball, fixed_vector, per_node_table };
enum class NoiseStages { dispersion, pooling, both };

struct NodeNoise {
  /// Added to the message node v sends to its children. Empty = none.
  Vector dispersion;
  /// Added to the message node v sends to its parent. Empty = none.
  Vector pooling;
};

struct ErrorModel {
  double magnitude_bound = 0.0;
  NoiseDistribution distribution = NoiseDistribution::uniform_ball;
  NoiseStages stages = NoiseStages::both;
  std::uint64_t seed = 0;
  /// Used by fixed_vector: the same error on every message.
  Vector fixed;
  /// Used by per_node_table: the same per-node errors every iteration.
  std::map<NodeId, NodeNoise> table;

  /// Throws InvalidArgument if a supplied error exceeds magnitude_bound or
  /// has the wrong dimension.
  void validate(Eigen::Index dimension) const;
};

struct StabilityReport {
  /// |x(omega) - x_e(n)| for n = 0 .. iterations_used.
  std::vector<double> errors;
  /// |x_e(n) - x(n)|: distance to the error-free run from the same start.
  std::vector<double> deviations;
  /// Max of errors over the final quarter of the iterations.
  double limsup = 0.0;
  /// Same statistic for the error-free run; the finite-run floor.
  double clean_limsup = 0.0;
  /// 2 x tree depth
  std::size_t K = 0;
  double rho = 0.0;
  /// 2 K M / (1 - rho) when applicable.
  std::optional<double> bound;
  /// Full column rank and rho < 1: the bound is certified.
  bool applicable = false;
  /// limsup <= bound + clean_limsup
  bool holds = false;
  /// x(omega), when rho < 1.
  std::optional<Vector> reference;
};

std::pair<SolveResult, StabilityReport> solve_with_errors(const TreeSystem& system, const SolverConfig& config,
                                                          const ErrorModel& errors);

/// K * max(all bounds) with K = 2 x depth: the worst-case deviation caused by
/// one iteration's worth of errors.
double single_iteration_error_bound(const TreeTopology& tree, const std::vector<double>& dispersion_bounds,
                                    const std::vector<double>& pooling_bounds);

/// MessageHook that injects errors drawn according to an ErrorModel.
class ErrorInjector : public MessageHook {
 public:
  ErrorInjector(const ErrorModel& model, Eigen::Index dimension);
  void on_dispersion(NodeId v, Vector& message) override;
  void on_pooling(NodeId v, Vector& message) override;

 private:
  Vector draw(NodeId v, bool dispersion);

  const ErrorModel& model_;
  Eigen::Index dimension_;
  std::mt19937_64 rng_;
};

}  // namespace treekz
