#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssf/trajectory.hpp"
#include "ssf/types.hpp"

namespace ssf::harness {

inline constexpr std::uint64_t kDefaultSeed = 20120924ull;

struct CheckReport {
  std::string name;
  bool passed = false;        // measured <= bound
  double measured = 0.0;
  double bound = 0.0;
  std::string context;
  std::uint64_t seed = 0;
  bool conclusive = true;     // false: hypothesis unverifiable, counts as pass
};

/// Finite sine series sum a_k sin(k pi x / L) on [0, L]: satisfies the
/// even-derivative boundary vanishing hypothesis exactly.
GridField sine_series(double L, Eigen::Index nodes, const std::vector<double>& coeffs);

/// Both interpolation inequalities for derivative orders p < q < r <= 4,
/// discrete derivatives and norms, 1.05 discretization slack on the right.
std::array<CheckReport, 2> check_interpolation(const GridField& u, int p, int q, int r);

/// Worst-step margin of ||kappa||_2^2 <= ||k0||_2^2 + lambda^2 (L0 - R).
CheckReport check_energy_bound(const Trajectory& traj, double R);

/// Drift of the total turning over the trajectory; inconclusive when the
/// tails are not flat enough for the boundary flux to be negligible.
CheckReport check_index_invariance(const Trajectory& traj);

/// One-sided endpoint estimates of the second and fourth arclength
/// derivatives of kappa against 1e-2 of the interior sup.
CheckReport check_boundary_parity(const Trajectory& traj);

/// Per-step relative energy increase against the 1e-8 dissipation slack.
CheckReport check_dissipation(const Trajectory& traj);

struct BenchmarkCase {
  std::string name;
  std::function<Curve()> build;
  double lambda = 1.0;
  FlowConfig config;
  std::string expected;  // "line" | "borderline" | "bounded-only"
  bool window_mode = false;
};

/// Named initial-curve builder shared with the CLI: "line", "chord:R",
/// "perturbed_line[:eps[,mode]]", "arc[:R,height]", "loop[:lam[,xmax]]".
Curve builtin_curve(const std::string& spec, Eigen::Index nodes);

std::vector<BenchmarkCase> default_registry(const std::string& suite);  // "quick" | "full"

struct BenchmarkOutcome {
  std::string name;
  std::string expected;
  std::string classified;
  Trajectory trajectory;
  std::vector<CheckReport> checks;
};

/// Execute the cases concurrently, run every applicable check, classify the
/// final states. Deterministic given the seed.
std::vector<BenchmarkOutcome> run_benchmarks(const std::vector<BenchmarkCase>& cases,
                                             std::uint64_t seed);

/// The randomized interpolation-inequality sweep: `trials` sine series, all
/// (p, q, r) with r <= 3, aggregated into one report.
CheckReport interpolation_sweep(int trials, std::uint64_t seed);

}  // namespace ssf::harness
