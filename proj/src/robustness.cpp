#include "treekz/robustness.hpp"

#include <algorithm>
#include <cmath>

#include "treekz/sor.hpp"

namespace treekz {

void ErrorModel::validate(Eigen::Index dimension) const {
  if (!(magnitude_bound >= 0.0) || !std::isfinite(magnitude_bound)) {
    throw Error(ErrorCode::InvalidArgument, "error magnitude bound must be finite and >= 0");
  }
  const double slack = 1.0 + 1e-12;
  auto check = [&](const Vector& e, const char* what) {
    if (e.size() == 0) return;
    require_dimension(dimension, e.size(), what);
    if (e.norm() > magnitude_bound * slack) {
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " exceeds the magnitude bound");
    }
  };
  if (distribution == NoiseDistribution::fixed_vector) check(fixed, "fixed error vector");
  if (distribution == NoiseDistribution::per_node_table) {
    for (const auto& [v, noise] : table) {
      check(noise.dispersion, "dispersion error");
      check(noise.pooling, "pooling error");
    }
  }
}

ErrorInjector::ErrorInjector(const ErrorModel& model, Eigen::Index dimension)
    : model_(model), dimension_(dimension), rng_(model.seed) {}

Vector ErrorInjector::draw(NodeId v, bool dispersion) {
  switch (model_.distribution) {
    case NoiseDistribution::uniform_ball: {
      std::normal_distribution<double> gauss;
      std::uniform_real_distribution<double> unit;
      Vector dir(dimension_);
      for (Eigen::Index i = 0; i < dimension_; ++i) dir[i] = gauss(rng_);
      const double n = dir.norm();
      const double radius = model_.magnitude_bound * std::pow(unit(rng_), 1.0 / static_cast<double>(dimension_));
      return n > 0.0 ? Vector(dir * (radius / n)) : Vector(Vector::Zero(dimension_));
    }
    case NoiseDistribution::fixed_vector:
      return model_.fixed.size() ? model_.fixed : Vector(Vector::Zero(dimension_));
    case NoiseDistribution::per_node_table: {
      const auto it = model_.table.find(v);
      if (it == model_.table.end()) return Vector::Zero(dimension_);
      const Vector& e = dispersion ? it->second.dispersion : it->second.pooling;
      return e.size() ? e : Vector(Vector::Zero(dimension_));
    }
  }
  return Vector::Zero(dimension_);
}

void ErrorInjector::on_dispersion(NodeId v, Vector& message) {
  if (model_.stages == NoiseStages::pooling) return;
  message += draw(v, true);
}

void ErrorInjector::on_pooling(NodeId v, Vector& message) {
  if (model_.stages == NoiseStages::dispersion) return;
  message += draw(v, false);
}

double single_iteration_error_bound(const TreeTopology& tree, const std::vector<double>& dispersion_bounds,
                                    const std::vector<double>& pooling_bounds) {
  double worst = 0.0;
  for (const auto* bounds : {&dispersion_bounds, &pooling_bounds}) {
    for (double b : *bounds) {
      if (!(b >= 0.0)) throw Error(ErrorCode::InvalidArgument, "error bounds must be >= 0");
      worst = std::max(worst, b);
    }
  }
  return 2.0 * static_cast<double>(tree.depth()) * worst;
}

namespace {

double tail_max(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const std::size_t n = values.size() - 1;
  const std::size_t tail = std::max<std::size_t>(1, (n + 3) / 4);
  return *std::max_element(values.end() - static_cast<std::ptrdiff_t>(tail), values.end());
}

std::vector<Vector> root_iterates(const SolveResult& result) {
  std::vector<Vector> out;
  const auto& its = result.trace->iterations;
  out.reserve(its.size() + 1);
  out.push_back(its.front().x_in);
  for (const auto& rec : its) out.push_back(rec.x_out);
  return out;
}

}  // namespace

std::pair<SolveResult, StabilityReport> solve_with_errors(const TreeSystem& system, const SolverConfig& config,
                                                          const ErrorModel& errors) {
  config.validate();
  errors.validate(system.dimension());

  SolverConfig run = config;
  if (run.trace_level == TraceLevel::none) run.trace_level = TraceLevel::root_only;

  SolveResult result;
  if (errors.magnitude_bound == 0.0) {
    result = solve(system, run);
  } else {
    ErrorInjector injector(errors, system.dimension());
    result = solve(system, run, &injector);
  }

  // Error-free run over the same number of iterations.
  SolverConfig clean_run = run;
  clean_run.tolerance = 0.0;
  clean_run.max_iterations = result.iterations_used;
  clean_run.trace_level = TraceLevel::root_only;
  const auto noisy = root_iterates(result);
  auto clean = root_iterates(solve(system, clean_run));
  while (clean.size() < noisy.size()) clean.push_back(clean.back());

  StabilityReport report;
  report.K = 2 * system.tree().depth();
  report.deviations.reserve(noisy.size());
  for (std::size_t n = 0; n < noisy.size(); ++n) report.deviations.push_back((noisy[n] - clean[n]).norm());

  const Matrix a = system.matrix();
  const auto ops = build_sor(system, config.omega);
  report.rho = ops.rho_hat;
  report.applicable = numerical_rank(a) == a.cols() && report.rho < 1.0;

  if (report.rho < 1.0) {
    report.reference = fixed_point(ops);
    std::vector<double> clean_errors;
    for (std::size_t n = 0; n < noisy.size(); ++n) {
      report.errors.push_back((*report.reference - noisy[n]).norm());
      clean_errors.push_back((*report.reference - clean[n]).norm());
    }
    report.limsup = tail_max(report.errors);
    report.clean_limsup = tail_max(clean_errors);
  }
  if (report.applicable) {
    report.bound = 2.0 * static_cast<double>(report.K) * errors.magnitude_bound / (1.0 - report.rho);
    report.holds = report.limsup <= *report.bound + report.clean_limsup;
  }

  if (config.trace_level == TraceLevel::none) result.trace.reset();
  return {std::move(result), std::move(report)};
}

}  // namespace treekz
