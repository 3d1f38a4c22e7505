#include "ssf/flow_graph.hpp"

#include <cmath>

#include "ssf/banded.hpp"
#include "ssf/finite_diff.hpp"
#include "ssf/flow_param.hpp"
#include "ssf/geometry.hpp"

namespace ssf::graph {

namespace {

double grid_spacing(const GridField& g) { return g.spacing; }

/// Offset derivatives with the hinged ghost convention. The ghost second
/// derivative at each end is -k0 (1 + 2 d'^2), which reduces the zero
/// curvature of the moving curve; for bases with k0 = 0 at the ends this is
/// the plain antisymmetric extension.
struct OffsetDerivs {
  Eigen::VectorXd d1, d2, d3;
  double ghost_left, ghost_right;  // d(-1), d(n)
};

OffsetDerivs offset_derivs(const GridField& d, const GridField& k0) {
  const Eigen::Index n = d.size();
  const double h = grid_spacing(d);
  // one-sided slope estimates for the inhomogeneous ghost term
  const double dl = (-3 * d.values(0) + 4 * d.values(1) - d.values(2)) / (2 * h);
  const double dr = (3 * d.values(n - 1) - 4 * d.values(n - 2) + d.values(n - 3)) / (2 * h);
  const double kl = k0.values(0), kr = k0.values(n - 1);
  const double ddl = -kl * (1 + 2 * dl * dl);  // d''(0)
  const double ddr = -kr * (1 + 2 * dr * dr);  // d''(L)

  OffsetDerivs out;
  out.ghost_left = 2 * d.values(0) - d.values(1) + h * h * ddl;
  out.ghost_right = 2 * d.values(n - 1) - d.values(n - 2) + h * h * ddr;

  Eigen::VectorXd ext(n + 2);
  ext.segment(1, n) = d.values;
  ext(0) = out.ghost_left;
  ext(n + 1) = out.ghost_right;

  out.d1.resize(n);
  out.d2.resize(n);
  out.d3.resize(n);
  const double h2 = h * h, h3 = h2 * h;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index e = i + 1;
    out.d1(i) = (ext(e + 1) - ext(e - 1)) / (2 * h);
    out.d2(i) = (ext(e + 1) - 2 * ext(e) + ext(e - 1)) / h2;
  }
  // third derivative: central 5-point needs two ghosts; use the ghost pair
  // plus skewed stencils at the first interior nodes
  out.d3 = fd::derivative_uniform<double>(d.values, h, 3);
  for (Eigen::Index i = 2; i < n - 2; ++i) {
    out.d3(i) = (d.values(i + 2) - 2 * d.values(i + 1) + 2 * d.values(i - 1) -
                 d.values(i - 2)) / (2 * h3);
  }
  return out;
}

struct Assembled {
  GridField rhs_full;       // dt(d)
  Eigen::VectorXd metric4;  // |gamma_d|^4 per node, reused by the stepper
};

Assembled assemble_rhs(const GraphState& s) {
  const Eigen::Index n = s.offset.size();
  const double h = grid_spacing(s.offset);
  const Eigen::VectorXd& d = s.offset.values;
  const Eigen::VectorXd& k0 = s.base_curvature.values;
  const double lambda2 = s.lambda * s.lambda;

  const OffsetDerivs od = offset_derivs(s.offset, s.base_curvature);
  const Eigen::VectorXd k0p = fd::derivative_uniform<double>(k0, h, 1);
  const Eigen::VectorXd k0pp = fd::derivative_uniform<double>(k0, h, 2);

  Eigen::VectorXd nu1(n), nu2(n), nu3(n), nu4(n), m2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double chart = 1.0 - k0(i) * d(i);
    if (chart <= 0.0) throw ChartFailure("flow_graph: chart condition 1 - k0 d violated");
    nu1(i) = k0p(i) * d(i) + k0(i) * od.d1(i);
    nu2(i) = od.d1(i) * od.d2(i) + nu1(i) * (k0(i) * d(i) - 1.0);
    nu3(i) = od.d1(i) * (k0p(i) * d(i) + 2.0 * k0(i) * od.d1(i)) +
             chart * (od.d2(i) + k0(i) - k0(i) * k0(i) * d(i));
    const double nu1p = k0pp(i) * d(i) + 2.0 * k0p(i) * od.d1(i) + k0(i) * od.d2(i);
    nu4(i) = od.d1(i) * od.d3(i) + od.d2(i) * od.d2(i) + nu1(i) * nu1(i) +
             nu1p * (k0(i) * d(i) - 1.0);
    m2(i) = chart * chart + od.d1(i) * od.d1(i);
  }

  const Eigen::VectorXd nu3p = fd::derivative_uniform<double>(nu3, h, 1);
  const Eigen::VectorXd nu3pp = fd::derivative_uniform<double>(nu3, h, 2);

  Assembled out;
  out.rhs_full.origin = s.offset.origin;
  out.rhs_full.spacing = s.offset.spacing;
  out.rhs_full.values.resize(n);
  out.metric4.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m4 = m2(i) * m2(i);
    const double m6 = m4 * m2(i);
    const double m8 = m4 * m4;
    out.metric4(i) = m4;
    const double chart = 1.0 - k0(i) * d(i);
    const double braces = -2.0 / m4 * nu3pp(i) + 14.0 / m6 * nu2(i) * nu3p(i) +
                          6.0 / m6 * nu3(i) * nu4(i) - 36.0 / m8 * nu2(i) * nu2(i) * nu3(i) -
                          nu3(i) * nu3(i) * nu3(i) / m8 + lambda2 * nu3(i) / m2(i);
    out.rhs_full.values(i) = braces / chart;
  }
  return out;
}

}  // namespace

GraphState make_state(const Curve& base, double lambda) {
  geometry::validate(base);
  if (!(lambda > 0)) throw std::invalid_argument("flow_graph: lambda must be positive");
  GraphState s;
  s.base = base;
  s.base_curvature = geometry::curvature(base);
  s.offset.origin = base.param(0);
  s.offset.spacing = (base.param(base.size() - 1) - base.param(0)) / double(base.size() - 1);
  s.offset.values = Eigen::VectorXd::Zero(base.size());
  s.lambda = lambda;
  return s;
}

void validate(const GraphState& s) {
  geometry::validate(s.base);
  ssf::validate(s.offset);
  ssf::validate(s.base_curvature);
  if (s.offset.size() != s.base.size() || s.base_curvature.size() != s.base.size())
    throw std::invalid_argument("GraphState: offset/base node count mismatch");
  if (!(s.lambda > 0)) throw std::invalid_argument("GraphState: lambda must be positive");
  if (s.offset.values(0) != 0.0 || s.offset.values(s.offset.size() - 1) != 0.0)
    throw std::invalid_argument("GraphState: endpoint offsets must vanish");
  for (Eigen::Index i = 0; i < s.offset.size(); ++i)
    if (1.0 - s.base_curvature.values(i) * s.offset.values(i) <= 0.0)
      throw std::invalid_argument("GraphState: chart condition violated");
}

GridField metric(const GraphState& s) {
  validate(s);
  const OffsetDerivs od = offset_derivs(s.offset, s.base_curvature);
  GridField out = s.offset;
  for (Eigen::Index i = 0; i < s.offset.size(); ++i) {
    const double chart = 1.0 - s.base_curvature.values(i) * s.offset.values(i);
    if (chart <= 0.0) throw ChartFailure("flow_graph: chart condition 1 - k0 d violated");
    out.values(i) = std::sqrt(chart * chart + od.d1(i) * od.d1(i));
  }
  return out;
}

GridField rhs(const GraphState& s) {
  validate(s);
  return assemble_rhs(s).rhs_full;
}

std::pair<GraphState, GraphStepReport> step(const GraphState& s, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("graph::step: dt must be positive");
  const Eigen::Index n = s.offset.size();
  const double h = grid_spacing(s.offset);
  const double h4 = h * h * h * h;

  const Assembled a = assemble_rhs(s);

  // explicit remainder: full rhs plus the stiff part it gets split from
  const OffsetDerivs od = offset_derivs(s.offset, s.base_curvature);
  // fourth difference with the single ghost on each side (rows 1 and n-2)
  Eigen::VectorXd d4 = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 1; i < n - 1; ++i) {
    const double fm2 = (i == 1) ? od.ghost_left : s.offset.values(i - 2);
    const double fp2 = (i == n - 2) ? od.ghost_right : s.offset.values(i + 2);
    d4(i) = (fm2 - 4 * s.offset.values(i - 1) + 6 * s.offset.values(i) -
             4 * s.offset.values(i + 1) + fp2) / h4;
  }

  Eigen::VectorXd rhs_vec(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phi = a.rhs_full.values(i) + 2.0 / a.metric4(i) * d4(i);
    rhs_vec(i) = s.offset.values(i) + dt * phi;
  }
  rhs_vec(0) = 0.0;
  rhs_vec(n - 1) = 0.0;

  BandedMatrix<double> M(n, 2, 2);
  M(0, 0) = 1.0;
  M(n - 1, n - 1) = 1.0;
  // hinged ghost folded into the rows next to the boundary; the
  // inhomogeneous part of the ghost (nonzero base endpoint curvature) is a
  // known value and lands on the right-hand side
  {
    const double cl = 2.0 * dt / a.metric4(1) / h4;
    M(1, 0) = -2.0 * cl;
    M(1, 1) = 1.0 + 5.0 * cl;
    M(1, 2) = -4.0 * cl;
    M(1, 3) = cl;
    const double ghost_inhom_l = od.ghost_left - (2.0 * s.offset.values(0) - s.offset.values(1));
    rhs_vec(1) -= cl * ghost_inhom_l;
    const double cr = 2.0 * dt / a.metric4(n - 2) / h4;
    M(n - 2, n - 1) = -2.0 * cr;
    M(n - 2, n - 2) = 1.0 + 5.0 * cr;
    M(n - 2, n - 3) = -4.0 * cr;
    M(n - 2, n - 4) = cr;
    const double ghost_inhom_r =
        od.ghost_right - (2.0 * s.offset.values(n - 1) - s.offset.values(n - 2));
    rhs_vec(n - 2) -= cr * ghost_inhom_r;
  }
  for (Eigen::Index i = 2; i < n - 2; ++i) {
    const double c = 2.0 * dt / a.metric4(i) / h4;
    M(i, i - 2) = c;
    M(i, i - 1) = -4.0 * c;
    M(i, i) = 1.0 + 6.0 * c;
    M(i, i + 1) = -4.0 * c;
    M(i, i + 2) = c;
  }

  GraphState out = s;
  out.offset.values = BandedLU<double>(M).solve(rhs_vec);
  out.offset.values(0) = 0.0;
  out.offset.values(n - 1) = 0.0;
  out.time = s.time + dt;
  for (Eigen::Index i = 0; i < n; ++i)
    if (1.0 - out.base_curvature.values(i) * out.offset.values(i) <= 0.0)
      throw ChartFailure("flow_graph: chart broke during step");

  GraphStepReport rep;
  rep.dt_used = dt;
  rep.newton_like_sweeps = 1;
  rep.max_offset_change = (out.offset.values - s.offset.values).cwiseAbs().maxCoeff();
  rep.energy_after = geometry::measure(reconstruct(out), s.lambda).total;
  return {out, rep};
}

Curve reconstruct(const GraphState& s) {
  const Eigen::Index n = s.base.size();
  const double h = grid_spacing(s.offset);
  Curve c;
  c.points.resize(n, 2);
  c.param = s.base.param;
  // unit normal n0 from the quarter turn of the central-difference tangent
  Eigen::VectorXd tx = fd::derivative_uniform<double>(s.base.points.col(0), h, 1);
  Eigen::VectorXd ty = fd::derivative_uniform<double>(s.base.points.col(1), h, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = std::hypot(tx(i), ty(i));
    const double nx = -ty(i) / norm, ny = tx(i) / norm;
    c.points(i, 0) = s.base.points(i, 0) + s.offset.values(i) * nx;
    c.points(i, 1) = s.base.points(i, 1) + s.offset.values(i) * ny;
  }
  c.is_arclength = false;
  return c;
}

Trajectory evolve(GraphState state, const FlowConfig& config) {
  ssf::validate(config);
  validate(state);

  if (config.nodes > 0 && config.nodes != state.base.size())
    state = make_state(geometry::resample_arclength(reconstruct(state), config.nodes), state.lambda);

  Trajectory traj;
  traj.lambda = state.lambda;
  const Curve initial = reconstruct(state);
  const auto m0 = geometry::measure(initial, state.lambda);
  traj.initial_bending = m0.bending;
  traj.initial_length = m0.length;
  traj.endpoint_distance = geometry::endpoint_distance(initial);

  const long total_steps = std::lround(std::ceil(config.t_final / config.dt - 1e-12));
  const long save_every = config.save_every > 0
                              ? config.save_every
                              : std::max<long>(1, (total_steps + 199) / 200);
  int epoch = 0;
  int rebase_count = 0;

  auto diag_row = [&](const GraphState& s) {
    const Curve c = reconstruct(s);
    const auto m = geometry::measure(c, s.lambda);
    const GridField r = assemble_rhs(s).rhs_full;
    DiagnosticsRow row;
    row.t = s.time;
    row.energy = m.total;
    row.length = m.length;
    row.bending = m.bending;
    row.index = m.index;
    row.sup_kappa = m.sup_kappa;
    Eigen::VectorXd interior = r.values.segment(1, r.size() - 2);
    row.sup_rhs = interior.cwiseAbs().maxCoeff();
    const GridField met = metric(s);
    Eigen::VectorXd sq = r.values.array().square() * met.values.array();
    Eigen::VectorXd x(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) x(i) = r.coord(i);
    row.speed_l2 = std::sqrt(geometry::trapezoid<double>(sq, x));
    return row;
  };
  auto push_state = [&](const GraphState& s) {
    traj.states.push_back({s.time, reconstruct(s), epoch});
  };

  auto rebase = [&](GraphState& s) {
    const Curve cur = geometry::resample_arclength(reconstruct(s), s.base.size());
    const double t = s.time, lam = s.lambda;
    s = make_state(cur, lam);
    s.time = t;
    ++epoch;
    ++rebase_count;
  };

  push_state(state);
  traj.diagnostics.push_back(diag_row(state));
  if (traj.diagnostics.back().sup_rhs < config.stationarity_tol) {
    traj.status = FlowStatus::stationary;
    return traj;
  }

  for (long k = 1; k <= total_steps; ++k) {
    try {
      auto [next, rep] = step(state, config.dt);
      (void)rep;
      state = next;
      const double worst =
          (state.base_curvature.values.array() * state.offset.values.array()).abs().maxCoeff();
      if (worst > 0.5) {
        if (rebase_count >= config.rebase_budget) {
          traj.status = FlowStatus::rebase_budget_exhausted;
          break;
        }
        rebase(state);
      }
    } catch (const ChartFailure&) {
      if (rebase_count >= config.rebase_budget) {
        traj.status = FlowStatus::rebase_budget_exhausted;
        break;
      }
      rebase(state);
    }
    traj.diagnostics.push_back(diag_row(state));
    const bool is_stationary = traj.diagnostics.back().sup_rhs < config.stationarity_tol;
    if (k % save_every == 0 || k == total_steps || is_stationary) push_state(state);
    if (is_stationary) {
      traj.status = FlowStatus::stationary;
      break;
    }
  }
  if (!traj.states.empty() && traj.states.back().t < state.time - 1e-15) push_state(state);
  return traj;
}

}  // namespace ssf::graph
