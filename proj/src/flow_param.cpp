#include "ssf/flow_param.hpp"

#include <cmath>

#include "ssf/banded.hpp"
#include "ssf/finite_diff.hpp"
#include "ssf/geometry.hpp"

namespace ssf::param {

namespace {

double uniform_spacing(const Curve& c) {
  const Eigen::Index n = c.size();
  const double h = (c.param(n - 1) - c.param(0)) / double(n - 1);
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(c.param(i) - (c.param(0) + i * h)) > 1e-9 * std::max(1.0, std::abs(c.param(n - 1))))
      throw std::invalid_argument("flow_param: parameter grid must be uniform");
  return h;
}

struct Derivs {
  PointsX<double> d1, d2, d3, d4;
};

/// Central derivatives with antisymmetric (hinged) ghost points: the
/// extension about each endpoint kills the even position derivatives there,
/// which is the discrete form of the pinned-hinged boundary data.
Derivs hinged_derivs(const PointsX<double>& pts, double h) {
  const Eigen::Index n = pts.rows();
  PointsX<double> ext(n + 4, 2);
  ext.middleRows(2, n) = pts;
  ext.row(1) = 2.0 * pts.row(0) - pts.row(1);
  ext.row(0) = 2.0 * pts.row(0) - pts.row(2);
  ext.row(n + 2) = 2.0 * pts.row(n - 1) - pts.row(n - 2);
  ext.row(n + 3) = 2.0 * pts.row(n - 1) - pts.row(n - 3);

  Derivs d;
  d.d1.resize(n, 2);
  d.d2.resize(n, 2);
  d.d3.resize(n, 2);
  d.d4.resize(n, 2);
  const double h2 = h * h, h3 = h2 * h, h4 = h2 * h2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index e = i + 2;
    d.d1.row(i) = (ext.row(e + 1) - ext.row(e - 1)) / (2 * h);
    d.d2.row(i) = (ext.row(e + 1) - 2 * ext.row(e) + ext.row(e - 1)) / h2;
    d.d3.row(i) =
        (ext.row(e + 2) - 2 * ext.row(e + 1) + 2 * ext.row(e - 1) - ext.row(e - 2)) / (2 * h3);
    d.d4.row(i) = (ext.row(e + 2) - 4 * ext.row(e + 1) + 6 * ext.row(e) - 4 * ext.row(e - 1) +
                   ext.row(e - 2)) / h4;
  }
  return d;
}

/// Nonlinear remainder (lambda^2 - 3|g''|^2) g'' - 6 (g''.g''') g'.
PointsX<double> remainder_term(const Derivs& d, double lambda) {
  const Eigen::Index n = d.d1.rows();
  PointsX<double> N(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double curv2 = d.d2.row(i).squaredNorm();
    const double mixed = d.d2.row(i).dot(d.d3.row(i));
    N.row(i) = (lambda * lambda - 3.0 * curv2) * d.d2.row(i) - 6.0 * mixed * d.d1.row(i);
  }
  return N;
}

/// Velocity in the Frenet form (-2 kappa_ss - kappa^3 + lambda^2 kappa) n.
/// Algebraically identical to the position form but far better conditioned:
/// it avoids the h^-4 roundoff amplification of a direct fourth difference
/// and carries much smaller truncation constants. Interior stencils are
/// fourth order; this is the stationarity diagnostic, so it is held to a
/// tighter tolerance than the solver itself.
PointsX<double> velocity_frenet(const Curve& c, double lambda, double h, bool pinned) {
  const Eigen::Index n = c.size();
  PointsX<double> normal(n, 2);
  const Eigen::VectorXd kappa = geometry::curvature_hinged<double>(c.points, h, 4, &normal);
  const Eigen::VectorXd kss = fd::derivative_uniform<double>(kappa, h, 2, 4);
  PointsX<double> v(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = kappa(i);
    v.row(i) = (-2.0 * kss(i) - k * k * k + lambda * lambda * k) * normal.row(i);
  }
  if (pinned) {
    v.row(0).setZero();
    v.row(n - 1).setZero();
  }
  return v;
}

}  // namespace

PointsX<double> velocity(const Curve& curve, double lambda) {
  geometry::validate(curve);
  const double h = uniform_spacing(curve);
  return velocity_frenet(curve, lambda, h, /*hinged=*/false);
}

ParamState step(const ParamState& state, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("param::step: dt must be positive");
  const Curve& c = state.curve;
  const Eigen::Index n = c.size();
  if (n < 5) throw std::invalid_argument("param::step: curve too short");
  const double h = uniform_spacing(c);
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if ((c.points.row(i + 1) - c.points.row(i)).norm() < 0.1 * h)
      throw DegenerateGrid("param::step: node spacing collapsed");

  const Derivs d = hinged_derivs(c.points, h);
  PointsX<double> rhs = c.points + dt * remainder_term(d, state.lambda);
  rhs.row(0) = c.points.row(0);
  rhs.row(n - 1) = c.points.row(n - 1);

  const double cf = 2.0 * dt / (h * h * h * h);
  BandedMatrix<double> M(n, 2, 2);
  M(0, 0) = 1.0;
  M(n - 1, n - 1) = 1.0;
  // hinged ghost folded into the rows next to the boundary
  M(1, 0) = -2.0 * cf;
  M(1, 1) = 1.0 + 5.0 * cf;
  M(1, 2) = -4.0 * cf;
  M(1, 3) = cf;
  M(n - 2, n - 1) = -2.0 * cf;
  M(n - 2, n - 2) = 1.0 + 5.0 * cf;
  M(n - 2, n - 3) = -4.0 * cf;
  M(n - 2, n - 4) = cf;
  for (Eigen::Index i = 2; i < n - 2; ++i) {
    M(i, i - 2) = cf;
    M(i, i - 1) = -4.0 * cf;
    M(i, i) = 1.0 + 6.0 * cf;
    M(i, i + 1) = -4.0 * cf;
    M(i, i + 2) = cf;
  }

  ParamState out = state;
  out.curve.points = BandedLU<double>(M).solve(rhs);
  out.curve.points.row(0) = c.points.row(0);          // snap solver roundoff
  out.curve.points.row(n - 1) = c.points.row(n - 1);
  out.curve.is_arclength = false;
  out.time = state.time + dt;

  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if ((out.curve.points.row(i + 1) - out.curve.points.row(i)).norm() < 0.1 * h)
      throw DegenerateGrid("param::step: node spacing collapsed");
  return out;
}

namespace {

DiagnosticsRow diagnostics_row(const ParamState& s, double h) {
  const auto m = geometry::measure(s.curve, s.lambda);
  const PointsX<double> v = velocity_frenet(s.curve, s.lambda, h, /*hinged=*/true);
  DiagnosticsRow row;
  row.t = s.time;
  row.energy = m.total;
  row.length = m.length;
  row.bending = m.bending;
  row.index = m.index;
  row.sup_kappa = m.sup_kappa;
  row.sup_rhs = v.rowwise().norm().maxCoeff();
  Eigen::VectorXd sq = v.rowwise().squaredNorm();
  row.speed_l2 = std::sqrt(geometry::trapezoid<double>(sq, s.curve.param));
  return row;
}

}  // namespace

Trajectory evolve(ParamState state, const FlowConfig& config) {
  ssf::validate(config);
  geometry::validate(state.curve);
  if (!(state.lambda > 0)) throw std::invalid_argument("param::evolve: lambda must be positive");

  const Eigen::Index n = config.nodes > 0 ? config.nodes : state.curve.size();
  state.curve = geometry::resample_arclength(state.curve, n);

  Trajectory traj;
  traj.lambda = state.lambda;
  traj.window_mode = (state.boundary == BoundaryMode::free_whole_line_window);
  const auto m0 = geometry::measure(state.curve, state.lambda);
  traj.initial_bending = m0.bending;
  traj.initial_length = m0.length;
  traj.endpoint_distance = geometry::endpoint_distance(state.curve);

  const long total_steps = std::lround(std::ceil(config.t_final / config.dt - 1e-12));
  const long save_every = config.save_every > 0
                              ? config.save_every
                              : std::max<long>(1, (total_steps + 199) / 200);
  int epoch = 0;
  const double h = uniform_spacing(state.curve);

  auto push_state = [&](const ParamState& s) {
    traj.states.push_back({s.time, s.curve, epoch});
  };
  push_state(state);
  traj.diagnostics.push_back(diagnostics_row(state, h));
  if (traj.diagnostics.back().sup_rhs < config.stationarity_tol) {
    traj.status = FlowStatus::stationary;
    return traj;
  }

  for (long k = 1; k <= total_steps; ++k) {
    try {
      state = step(state, config.dt);
    } catch (const DegenerateGrid&) {
      traj.status = FlowStatus::degenerate;
      break;
    }
    if (k % config.resample_every == 0 && k < total_steps) {
      state.curve = geometry::resample_arclength(state.curve, state.curve.size());
      ++epoch;
    }
    traj.diagnostics.push_back(diagnostics_row(state, h));
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

namespace {

Eigen::VectorXd odd_extension_derivative(const Eigen::VectorXd& k, double h, int order) {
  const Eigen::Index n = k.size();
  Eigen::VectorXd ext(n + 4);
  ext.segment(2, n) = k;
  ext(1) = 2 * k(0) - k(1);
  ext(0) = 2 * k(0) - k(2);
  ext(n + 2) = 2 * k(n - 1) - k(n - 2);
  ext(n + 3) = 2 * k(n - 1) - k(n - 3);
  Eigen::VectorXd out(n);
  const double h2 = h * h, h4 = h2 * h2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index e = i + 2;
    switch (order) {
      case 1: out(i) = (ext(e + 1) - ext(e - 1)) / (2 * h); break;
      case 2: out(i) = (ext(e + 1) - 2 * ext(e) + ext(e - 1)) / h2; break;
      case 4:
        out(i) = (ext(e + 2) - 4 * ext(e + 1) + 6 * ext(e) - 4 * ext(e - 1) + ext(e - 2)) / h4;
        break;
      default: throw std::logic_error("odd_extension_derivative: unsupported order");
    }
  }
  return out;
}

void check_matched(const Trajectory& traj, std::size_t index) {
  if (index + 1 >= traj.states.size())
    throw std::invalid_argument("evolution residual: need two consecutive saved states");
  const auto& A = traj.states[index];
  const auto& B = traj.states[index + 1];
  if (A.curve.size() != B.curve.size())
    throw std::invalid_argument("evolution residual: unmatched node counts");
  if (A.resample_epoch != B.resample_epoch)
    throw std::invalid_argument("evolution residual: states straddle a resampling event");
}

}  // namespace

double curvature_evolution_residual(const Trajectory& traj, std::size_t index) {
  check_matched(traj, index);
  const auto& A = traj.states[index];
  const auto& B = traj.states[index + 1];
  const double dtv = B.t - A.t;
  const double lambda = traj.lambda;
  const double h = (A.curve.param(A.curve.size() - 1) - A.curve.param(0)) / double(A.curve.size() - 1);
  const Eigen::VectorXd k0 = geometry::curvature_hinged<double>(A.curve.points, h, 2);
  const Eigen::VectorXd k1 = geometry::curvature_hinged<double>(B.curve.points, h, 2);

  const Eigen::VectorXd ks = odd_extension_derivative(k0, h, 1);
  const Eigen::VectorXd kss = odd_extension_derivative(k0, h, 2);
  const Eigen::VectorXd kssss = odd_extension_derivative(k0, h, 4);
  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < k0.size(); ++i) {
    const double k = k0(i);
    const double rhs = -2 * kssss(i) - 5 * k * k * kss(i) + lambda * lambda * kss(i) -
                       6 * k * ks(i) * ks(i) - std::pow(k, 5.0) + lambda * lambda * k * k * k;
    worst = std::max(worst, std::abs((k1(i) - k0(i)) / dtv - rhs));
  }
  return worst;
}

double metric_evolution_residual(const Trajectory& traj, std::size_t index) {
  check_matched(traj, index);
  const auto& A = traj.states[index];
  const auto& B = traj.states[index + 1];
  const double dtv = B.t - A.t;
  const double lambda = traj.lambda;

  const double h = (A.curve.param(A.curve.size() - 1) - A.curve.param(0)) / double(A.curve.size() - 1);
  Eigen::VectorXd m0, m1;
  const Eigen::VectorXd k0 = geometry::curvature_hinged<double>(A.curve.points, h, 2, nullptr, &m0);
  geometry::curvature_hinged<double>(B.curve.points, h, 2, nullptr, &m1);
  const Eigen::VectorXd kss = odd_extension_derivative(k0, h, 2);

  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < k0.size(); ++i) {
    const double F = 2 * kss(i) + std::pow(k0(i), 3.0) - lambda * lambda * k0(i);
    worst = std::max(worst, std::abs((m1(i) - m0(i)) / dtv - k0(i) * F * m0(i)));
  }
  return worst;
}

}  // namespace ssf::param
