#pragma once

#include <stdexcept>

#include "ssf/trajectory.hpp"
#include "ssf/types.hpp"

namespace ssf::param {

enum class BoundaryMode { pinned_hinged, free_whole_line_window };

/// Position-space flow state. The curve is kept (approximately) arclength
/// parametrized; periodic resampling inside evolve() fixes the tangential
/// gauge. Both boundary modes pin the endpoints and enforce zero endpoint
/// curvature; the window tag marks trajectories whose tails are flat enough
/// for the whole-line diagnostics.
struct ParamState {
  Curve curve;
  double lambda = 1.0;
  double time = 0.0;
  BoundaryMode boundary = BoundaryMode::pinned_hinged;
};

/// Raised when the node spacing collapses (self-touching grid).
struct DegenerateGrid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nodewise flow velocity -2 g'''' + (lambda^2 - 3|g''|^2) g'' - 3 (|g''|^2)' g'
/// (derivatives in arclength), one-sided stencils near the ends.
PointsX<double> velocity(const Curve& curve, double lambda);

/// One IMEX step: the stiff -2 d^4/ds^4 term implicit (two decoupled banded
/// solves), the nonlinear remainder explicit, endpoint rows pinned and the
/// zero-curvature condition imposed through antisymmetric ghost values.
ParamState step(const ParamState& state, double dt);

Trajectory evolve(ParamState state, const FlowConfig& config);

/// Max interior gap between the measured curvature increment of two
/// consecutive saved states and the curvature evolution law evaluated on the
/// earlier state. States must share the resample epoch and node count.
double curvature_evolution_residual(const Trajectory& traj, std::size_t index);

/// Max nodewise gap between the measured line-element increment and
/// kappa F |dx(gamma)|, same preconditions.
double metric_evolution_residual(const Trajectory& traj, std::size_t index);

}  // namespace ssf::param
