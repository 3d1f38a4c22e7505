#pragma once

#include <stdexcept>
#include <vector>

#include "ssf/types.hpp"

namespace ssf {

struct FlowConfig {
  double dt = 1e-4;
  double t_final = 1.0;
  double stationarity_tol = 1e-7;   // on the velocity sup norm
  int resample_every = 10;          // arclength gauge fixing cadence (steps)
  Eigen::Index nodes = 0;           // resample the initial curve to this count (0 = keep)
  int rebase_budget = 40;           // graph mode: re-basing attempts before giving up
  int save_every = 0;               // state save cadence in steps (0 = ~200 saves per run)
};

inline void validate(const FlowConfig& c) {
  if (!(c.dt > 0) || !(c.t_final > 0) || !(c.stationarity_tol > 0))
    throw std::invalid_argument("FlowConfig: dt, t_final, stationarity_tol must be positive");
  if (c.resample_every < 1 || c.rebase_budget < 1 || c.save_every < 0)
    throw std::invalid_argument("FlowConfig: bad cadence fields");
  if (c.nodes != 0 && c.nodes < 5) throw std::invalid_argument("FlowConfig: nodes must be 0 or >= 5");
}

enum class FlowStatus { reached_t_final, stationary, degenerate, rebase_budget_exhausted };

struct DiagnosticsRow {
  double t;
  double energy;
  double length;
  double bending;     // int kappa^2 ds = ||kappa||_2^2
  double index;
  double sup_kappa;
  double sup_rhs;     // sup norm of the motion law right-hand side
  double speed_l2;    // ||dt(gamma)||_{L^2(ds)}
};

struct SavedState {
  double t;
  Curve curve;
  int resample_epoch;  // bumped at every reparametrization / re-basing event
};

struct Trajectory {
  std::vector<SavedState> states;        // time-ordered
  std::vector<DiagnosticsRow> diagnostics;
  FlowStatus status = FlowStatus::reached_t_final;
  double lambda = 0.0;
  bool window_mode = false;              // evolved from a whole-line window

  // frozen at t = 0, inputs to the curvature-bound check
  double initial_bending = 0.0;
  double initial_length = 0.0;
  double endpoint_distance = 0.0;

  bool stationary() const { return status == FlowStatus::stationary; }
};

}  // namespace ssf
