#include "ssf/windows.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <memory>
#include <sstream>

#include "ssf/finite_diff.hpp"
#include "ssf/flow_param.hpp"
#include "ssf/geometry.hpp"
#include "ssf/interp.hpp"

namespace ssf::windows {

namespace {

const double kSqrt2 = 1.4142135623730951;

double smooth_step(double t) {
  // C^inf step: 0 at t <= 0, 1 at t >= 1
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

/// Least radius at which the three tail inequalities hold out to the probe
/// horizon, scanned on a half-unit grid.
double chart_radius(const std::function<double(double)>& phi0,
                    const std::function<double(double)>& psi0, double rho) {
  auto deriv = [](const std::function<double(double)>& f, double x) {
    const double h = 1e-4;
    return (f(x + h) - f(x - h)) / (2 * h);
  };
  auto tails_ok_from = [&](double r) {
    for (double x = r; x <= 4 * r + 40.0; x += 0.25) {
      for (double s : {x, -x}) {
        if (std::abs(psi0(s)) >= rho) return false;
        if (std::abs(deriv(psi0, s)) >= rho) return false;
        if (std::abs(std::abs(deriv(phi0, s)) - 1.0) >= rho) return false;
      }
    }
    return true;
  };
  for (double r = 0.5; r <= 200.0; r += 0.5)
    if (tails_ok_from(r)) return r;
  throw std::invalid_argument("WholeLineDatum: tail conditions never satisfied (no valid M)");
}

void finalize(WholeLineDatum& d) { d.M = chart_radius(d.phi0, d.psi0, d.rho); }

}  // namespace

WholeLineDatum WholeLineDatum::line() {
  WholeLineDatum d;
  d.phi0 = [](double x) { return x; };
  d.psi0 = [](double) { return 0.0; };
  d.alpha = 1.0;
  d.name = "line";
  finalize(d);
  return d;
}

namespace {

/// phi0(x) = x - int_0^x (1 - sqrt(1 - psi0'^2)): completes a given vertical
/// profile to a unit-speed curve. The correction integral is tabulated once
/// and evaluated as a C^1 cubic Hermite (exact slopes, so the black-box
/// finite-difference speed check stays clean across knots).
std::function<double(double)> complete_to_unit_speed(
    const std::function<double(double)>& dpsi, double X) {
  const int n = 120001;
  const double h = 2 * X / (n - 1);
  auto defect = [&dpsi](double x) {
    const double dp = dpsi(x);
    if (std::abs(dp) >= 1.0)
      throw std::invalid_argument("datum: |psi0'| must stay below 1 for unit speed");
    return 1.0 - std::sqrt(1.0 - dp * dp);
  };
  auto vals = std::make_shared<std::vector<double>>(n);
  auto slopes = std::make_shared<std::vector<double>>(n);
  const int mid = (n - 1) / 2;
  // Simpson per cell keeps the cumulative integral at the slope accuracy
  auto cell = [&](double x0, double x1) {
    return (x1 - x0) / 6.0 * (defect(x0) + 4.0 * defect(0.5 * (x0 + x1)) + defect(x1));
  };
  (*vals)[mid] = 0.0;  // phi0(0) = 0 exactly
  for (int i = mid + 1; i < n; ++i) (*vals)[i] = (*vals)[i - 1] + cell(-X + (i - 1) * h, -X + i * h);
  for (int i = mid - 1; i >= 0; --i) (*vals)[i] = (*vals)[i + 1] - cell(-X + i * h, -X + (i + 1) * h);
  for (int i = 0; i < n; ++i) (*slopes)[i] = defect(-X + i * h);

  return [vals, slopes, X, h, n](double x) {
    if (x >= X) return x - vals->back();
    if (x <= -X) return x - vals->front();
    const int k = std::min<int>(n - 2, static_cast<int>((x + X) / h));
    const double t = (x - (-X + k * h)) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double corr = (2 * t3 - 3 * t2 + 1) * (*vals)[k] + (t3 - 2 * t2 + t) * h * (*slopes)[k] +
                        (-2 * t3 + 3 * t2) * (*vals)[k + 1] + (t3 - t2) * h * (*slopes)[k + 1];
    return x - corr;
  };
}

}  // namespace

WholeLineDatum WholeLineDatum::bump(double a, double b) {
  if (!(b > 0) || !(std::abs(a) * b < 2.0))
    throw std::invalid_argument("bump datum: need |a| b < 2 for unit speed");
  WholeLineDatum d;
  d.phi0 = complete_to_unit_speed(
      [a, b](double x) { return -a * b * std::tanh(b * x) / std::cosh(b * x); },
      std::max(60.0 / b, 40.0));
  d.psi0 = [a, b](double x) { return a / std::cosh(b * x); };
  d.alpha = 1.0;
  d.name = "bump";
  finalize(d);
  return d;
}

WholeLineDatum WholeLineDatum::power_tail(double a, double alpha) {
  if (!(alpha > 0.5)) throw std::invalid_argument("ptail datum: need alpha > 1/2");
  if (!(std::abs(a) * alpha < 0.9))
    throw std::invalid_argument("ptail datum: need |a| alpha < 0.9 for unit speed");
  // psi0 = a (1 + x^2)^(-alpha/2)
  auto dpsi = [a, alpha](double x) {
    return -a * alpha * x * std::pow(1.0 + x * x, -alpha / 2.0 - 1.0);
  };
  WholeLineDatum d;
  d.phi0 = complete_to_unit_speed(dpsi, 400.0);
  d.psi0 = [a, alpha](double x) { return a * std::pow(1.0 + x * x, -alpha / 2.0); };
  d.alpha = alpha;
  d.name = "ptail";
  finalize(d);
  return d;
}

WholeLineDatum WholeLineDatum::loop(double lam) {
  if (!(lam > 0)) throw std::invalid_argument("loop datum: lambda must be positive");
  WholeLineDatum d;
  d.phi0 = [lam](double x) { return x - (2.0 * kSqrt2 / lam) * std::tanh(lam * x / kSqrt2); };
  d.psi0 = [lam](double x) { return (2.0 * kSqrt2 / lam) / std::cosh(lam * x / kSqrt2); };
  d.alpha = 1.0;
  d.name = "loop";
  finalize(d);
  return d;
}

WholeLineDatum WholeLineDatum::from_csv(const std::string& path, double alpha) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("datum csv: cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::vector<double> xs, phis, psis;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    double v[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ss, tok, ',')) throw std::invalid_argument("datum csv: bad row");
      v[k] = std::stod(tok);
    }
    xs.push_back(v[0]);
    phis.push_back(v[1]);
    psis.push_back(v[2]);
  }
  const std::size_t n = xs.size();
  if (n < 8) throw std::invalid_argument("datum csv: too few rows");
  Eigen::VectorXd x(n);
  Eigen::MatrixXd y(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    x(i) = xs[i];
    y(i, 0) = phis[i];
    y(i, 1) = psis[i];
  }
  auto table = std::make_shared<interp::Cubic<double>>(x, y);
  const double lo = xs.front(), hi = xs.back();

  // asymptote c |x|^-alpha anchored at each table edge (continuous handoff)
  const double c_left = psis.front() * std::pow(std::abs(lo), alpha);
  const double c_right = psis.back() * std::pow(std::abs(hi), alpha);

  WholeLineDatum d;
  d.phi0 = [table, lo, hi](double x_) {
    if (x_ < lo) return table->eval(lo)(0) + (x_ - lo);
    if (x_ > hi) return table->eval(hi)(0) + (x_ - hi);
    return table->eval(x_)(0);
  };
  d.psi0 = [table, lo, hi, c_left, c_right, alpha](double x_) {
    if (x_ < lo) return c_left * std::pow(std::abs(x_), -alpha);
    if (x_ > hi) return c_right * std::pow(std::abs(x_), -alpha);
    return table->eval(x_)(1);
  };
  d.alpha = alpha;
  d.name = "csv:" + path;
  finalize(d);
  return d;
}

WholeLineDatum WholeLineDatum::builtin(const std::string& spec) {
  auto split_args = [](const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
  };
  if (spec == "line") return line();
  if (spec == "bump") return bump(0.3, 1.0);
  if (spec.rfind("bump:", 0) == 0) {
    const auto a = split_args(spec.substr(5));
    if (a.size() != 2) throw std::invalid_argument("bump datum: expected bump:a,b");
    return bump(a[0], a[1]);
  }
  if (spec == "ptail") return power_tail(0.3, 1.0);
  if (spec.rfind("ptail:", 0) == 0) {
    const auto a = split_args(spec.substr(6));
    if (a.size() != 2) throw std::invalid_argument("ptail datum: expected ptail:a,alpha");
    return power_tail(a[0], a[1]);
  }
  if (spec == "loop") return loop(1.0);
  if (spec.rfind("loop:", 0) == 0) return loop(std::stod(spec.substr(5)));
  if (spec.find(".csv") != std::string::npos) return from_csv(spec, 1.0);
  throw std::invalid_argument("unknown datum: " + spec);
}

void validate(const WholeLineDatum& datum) {
  if (!datum.phi0 || !datum.psi0) throw std::invalid_argument("datum: missing components");
  if (!(datum.alpha > 0.5)) throw std::invalid_argument("datum: tail exponent must exceed 1/2");
  if (!(datum.rho > 0) || !(datum.rho < 1)) throw std::invalid_argument("datum: rho in (0,1)");
  if (!(datum.M > 0)) throw std::invalid_argument("datum: chart constant M not set");
  auto deriv = [](const std::function<double(double)>& f, double x) {
    const double h = 1e-4;
    return (f(x + h) - f(x - h)) / (2 * h);
  };
  // unit speed on a dense sample
  for (double x = -2 * datum.M - 10.0; x <= 2 * datum.M + 10.0; x += 0.05) {
    const double sp = std::hypot(deriv(datum.phi0, x), deriv(datum.psi0, x));
    if (std::abs(sp - 1.0) > 1e-6)
      throw std::invalid_argument("datum: |gamma0'| deviates from 1 beyond 1e-6");
  }
  // tail smallness at |x| in {M, 2M, 4M}
  for (double mult : {1.0, 2.0, 4.0}) {
    for (double s : {mult * datum.M, -mult * datum.M}) {
      if (std::abs(datum.psi0(s)) >= datum.rho ||
          std::abs(deriv(datum.psi0, s)) >= datum.rho ||
          std::abs(std::abs(deriv(datum.phi0, s)) - 1.0) >= datum.rho)
        throw std::invalid_argument("datum: tail condition fails at |x| = " + std::to_string(s));
    }
  }
  // power-law domination: fit c on [M, 2M], then |psi0| must stay under
  // 2 c |x|^-alpha out to 8M (a slower tail blows through the factor of 2)
  double c_fit = 0.0;
  for (double x = datum.M; x <= 2 * datum.M; x += 0.1)
    c_fit = std::max({c_fit, std::abs(datum.psi0(x)) * std::pow(x, datum.alpha),
                      std::abs(datum.psi0(-x)) * std::pow(x, datum.alpha)});
  for (double x = 2 * datum.M; x <= 8 * datum.M; x += 0.25) {
    const double bound = 2.0 * (c_fit + 1e-12) * std::pow(x, -datum.alpha) + 1e-12;
    if (std::abs(datum.psi0(x)) > bound || std::abs(datum.psi0(-x)) > bound)
      throw std::invalid_argument("datum: psi0 tail not dominated by the fitted asymptote");
  }
}

double cutoff(double r, double x) {
  if (!(r > 1)) throw std::invalid_argument("cutoff: r must exceed 1");
  return smooth_step(r - std::abs(x));
}

Curve build_window(const WholeLineDatum& datum, const WindowSpec& spec) {
  validate(datum);
  if (!(spec.r > datum.M + 1.0))
    throw std::invalid_argument("build_window: need r > M + 1");
  if (spec.nodes < 9) throw std::invalid_argument("build_window: too few nodes");
  if (spec.taper_width != 1.0)
    throw std::invalid_argument("build_window: taper width is fixed to 1");
  const Eigen::Index n = spec.nodes;
  Curve c;
  c.points.resize(n, 2);
  c.param.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = -spec.r + 2.0 * spec.r * double(i) / double(n - 1);
    c.param(i) = x;
    c.points(i, 0) = datum.phi0(x);
    c.points(i, 1) = cutoff(spec.r, x) * datum.psi0(x);
  }
  c.points(0, 1) = 0.0;      // eta vanishes at the ends exactly
  c.points(n - 1, 1) = 0.0;
  c.is_arclength = false;
  return c;
}

namespace {

double restricted_gap(const Curve& A, const Curve& B, double N) {
  double worst = 0.0;
  auto one_side = [&](const Curve& P, const Curve& Q) {
    for (Eigen::Index i = 0; i < P.size(); ++i) {
      if (std::abs(P.points(i, 0)) > N) continue;
      const Vector2<double> p = P.points.row(i).transpose();
      double best = std::numeric_limits<double>::max();
      for (Eigen::Index j = 0; j + 1 < Q.size(); ++j)
        best = std::min(best, geometry::point_segment_distance<double>(
                                  p, Q.points.row(j).transpose(), Q.points.row(j + 1).transpose()));
      worst = std::max(worst, best);
    }
  };
  one_side(A, B);
  one_side(B, A);
  return worst;
}

}  // namespace

LadderReport run_ladder(const WholeLineDatum& datum, const std::vector<double>& radii, double N,
                        double lambda, const FlowConfig& config) {
  validate(datum);
  ssf::validate(config);
  if (radii.size() < 2) throw std::invalid_argument("run_ladder: need at least two radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > datum.M + 1.0)) throw std::invalid_argument("run_ladder: radius too small");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw std::invalid_argument("run_ladder: radii must increase");
  }
  if (!(N < radii.front() - 1.0))
    throw std::invalid_argument("run_ladder: need N < min(radii) - 1");
  if (config.nodes < 9) throw std::invalid_argument("run_ladder: config.nodes required");

  // shared spacing across the ladder so the windows discretize the common
  // region with aligned stencils
  const double h = 2.0 * radii.back() / double(config.nodes - 1);

  LadderReport rep;
  rep.radii = radii;
  rep.compact_half_width = N;

  std::vector<std::future<Trajectory>> jobs;
  for (double r : radii) {
    jobs.push_back(std::async(std::launch::async, [&, r]() {
      WindowSpec spec{r, 2 * static_cast<Eigen::Index>(std::llround(r / h)) + 1, 1.0};
      const Curve window = build_window(datum, spec);
      const auto m0 = geometry::measure(window, lambda);
      (void)m0;
      param::ParamState s{window, lambda, 0.0, param::BoundaryMode::free_whole_line_window};
      FlowConfig cfg = config;
      cfg.nodes = spec.nodes;
      return param::evolve(s, cfg);
    }));
  }
  for (auto& j : jobs) rep.trajectories.push_back(j.get());

  for (std::size_t k = 0; k < radii.size(); ++k) {
    const auto& traj = rep.trajectories[k];
    std::vector<double> hist;
    hist.reserve(traj.diagnostics.size());
    for (const auto& row : traj.diagnostics) hist.push_back(std::sqrt(row.bending));
    rep.kappa_l2.push_back(std::move(hist));
    // energy-derived bound on ||kappa||_2^2 for this window
    const double width = datum.phi0(radii[k]) - datum.phi0(-radii[k]);
    rep.up_bounds.push_back(traj.initial_bending +
                            lambda * lambda * (traj.initial_length - width));
  }
  for (std::size_t k = 0; k + 1 < radii.size(); ++k)
    rep.sup_gaps.push_back(restricted_gap(rep.trajectories[k].states.back().curve,
                                          rep.trajectories[k + 1].states.back().curve, N));
  return rep;
}

std::pair<double, double> tail_profile(const Trajectory& traj, double t) {
  if (traj.states.empty()) throw std::invalid_argument("tail_profile: empty trajectory");
  if (traj.states.back().t + 1e-12 < t)
    throw std::invalid_argument("tail_profile: no saved state at or beyond the requested time");
  std::size_t best = 0;
  for (std::size_t i = 1; i < traj.states.size(); ++i)
    if (std::abs(traj.states[i].t - t) < std::abs(traj.states[best].t - t)) best = i;
  const Curve& c = traj.states[best].curve;
  const Eigen::Index n = c.size();
  const double lo = c.param(0), hi = c.param(n - 1);
  const double center = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const Eigen::VectorXd dy = fd::derivative_nonuniform<double>(c.points.col(1), c.param, 1);
  double sup_y = 0.0, sup_dy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(c.param(i) - center) < (2.0 / 3.0) * half) continue;
    sup_y = std::max(sup_y, std::abs(c.points(i, 1)));
    sup_dy = std::max(sup_dy, std::abs(dy(i)));
  }
  return {sup_y, sup_dy};
}

}  // namespace ssf::windows
