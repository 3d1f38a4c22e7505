#pragma once

#include <stdexcept>
#include <utility>

#include "ssf/trajectory.hpp"
#include "ssf/types.hpp"

namespace ssf::graph {

/// Normal-graph flow state: the moving curve is base + offset * n0 with n0
/// the quarter-turn rotation of the base tangent. Valid while the chart
/// condition 1 - k0 * offset > 0 holds at every node.
struct GraphState {
  Curve base;                 // arclength-parametrized reference curve
  GridField offset;           // d on the base parameter grid
  GridField base_curvature;   // k0
  double time = 0.0;
  double lambda = 1.0;
};

struct GraphStepReport {
  double dt_used;
  int newton_like_sweeps;     // always 1: frozen-coefficient IMEX, no iteration
  double max_offset_change;
  double energy_after;
};

/// The chart broke down (1 - k0 d reached zero); the caller re-bases.
struct ChartFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Build a graph state with zero offset over the given base curve.
GraphState make_state(const Curve& base, double lambda);

void validate(const GraphState& state);

/// Nodewise |gamma_d| = sqrt((1 - k0 d)^2 + (dx d)^2).
GridField metric(const GraphState& state);

/// Full right-hand side of the offset equation, including the 1/(1 - k0 d)
/// factor.
GridField rhs(const GraphState& state);

/// One IMEX step: the frozen-coefficient stiff part -(2/|gamma_d|^4) dx^4 is
/// implicit (one pentadiagonal solve), the remainder explicit; boundary rows
/// hold the four hinged conditions. When the base carries nonzero endpoint
/// curvature, the zero-curvature condition on the moving curve makes the
/// offset's second-derivative condition inhomogeneous; the ghost values
/// carry that term.
std::pair<GraphState, GraphStepReport> step(const GraphState& state, double dt);

/// March to t_final or stationarity; re-bases on chart failure or when
/// max |k0 d| > 0.5 (reconstruct, resample by arclength, reset d = 0).
Trajectory evolve(GraphState state, const FlowConfig& config);

/// The moving curve base + offset * n0 as a Curve on the base parameter.
Curve reconstruct(const GraphState& state);

}  // namespace ssf::graph
