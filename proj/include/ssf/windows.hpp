#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssf/trajectory.hpp"
#include "ssf/types.hpp"

namespace ssf::windows {

/// Whole-line initial datum gamma0 = (phi0, psi0) with unit speed, flat
/// horizontal tails, and a power-law (or faster) bound on psi0.
struct WholeLineDatum {
  std::function<double(double)> phi0;
  std::function<double(double)> psi0;
  double alpha = 1.0;   // tail exponent, > 1/2
  double rho = 0.1;     // smallness constant of the tail conditions
  double M = 0.0;       // least radius where all tail conditions hold
  std::string name;

  static WholeLineDatum line();
  /// psi0 = a sech(b x), phi0 by arclength-completing quadrature (needs a b < 2).
  static WholeLineDatum bump(double a, double b);
  /// psi0 = a (1 + x^2)^(-alpha/2): the canonical power-law tail.
  static WholeLineDatum power_tail(double a, double alpha);
  /// Closed-form single loop with total turning 2 pi:
  /// phi0 = x - (2 sqrt2/lam) tanh(lam x/sqrt2), psi0 = (2 sqrt2/lam) sech(lam x/sqrt2).
  static WholeLineDatum loop(double lam);
  /// Dense table `x,phi0,psi0` with cubic interpolation; tails extended by
  /// the fitted asymptote (x + shift, c |x|^-alpha).
  static WholeLineDatum from_csv(const std::string& path, double alpha);
  /// "line", "bump", "bump:a,b", "ptail", "ptail:a,alpha", "loop",
  /// "loop:lam", or a CSV path.
  static WholeLineDatum builtin(const std::string& spec);
};

void validate(const WholeLineDatum& datum);

struct WindowSpec {
  double r;
  Eigen::Index nodes;
  double taper_width = 1.0;  // the cutoff transition always spans [r-1, r]
};

struct LadderReport {
  std::vector<double> radii;
  double compact_half_width = 0.0;          // N
  std::vector<double> sup_gaps;             // consecutive-pair gaps on |x1| <= N
  std::vector<std::vector<double>> kappa_l2;  // per window, ||kappa_r(t)||_2 history
  std::vector<double> up_bounds;            // per window energy-derived bound on ||kappa||_2^2
  std::vector<Trajectory> trajectories;     // per window, same order as radii
};

/// Smooth cut-off: 1 on [0, r-1], 0 on [r, inf), exp-transition in between
/// (all derivatives vanish at both junctions).
double cutoff(double r, double x);

/// Sampled window curve (phi0, eta_r psi0) on [-r, r].
Curve build_window(const WholeLineDatum& datum, const WindowSpec& spec);

/// Evolve every window to the same horizon and compare consecutive evolved
/// curves on the compact strip |x1| <= N. Window runs execute concurrently.
LadderReport run_ladder(const WholeLineDatum& datum, const std::vector<double>& radii, double N,
                        double lambda, const FlowConfig& config);

/// (sup |gamma . e|, sup |dx gamma . e|) over the outer third of the window
/// at the saved state nearest the requested time, e = (0,1).
std::pair<double, double> tail_profile(const Trajectory& traj, double t);

}  // namespace ssf::windows
