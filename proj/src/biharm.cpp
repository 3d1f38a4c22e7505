#include "ssf/biharm.hpp"

#include <cmath>
#include <stdexcept>

#include "ssf/banded.hpp"
#include "ssf/finite_diff.hpp"
#include "ssf/geometry.hpp"

namespace ssf::biharm {

void validate(const BvpProblem& p) {
  ssf::validate(p.rhs);
  if (!(p.length > 0)) throw std::invalid_argument("BvpProblem: length must be positive");
  if (p.mu < 0) throw std::invalid_argument("BvpProblem: mu must be nonnegative");
  const double span = p.rhs.spacing * double(p.rhs.size() - 1);
  if (std::abs(span - p.length) > 1e-10 * std::max(1.0, p.length))
    throw std::invalid_argument("BvpProblem: rhs grid does not span the domain");
}

GreenTable GreenTable::make(double mu, double length) {
  if (!(mu > 0)) throw std::invalid_argument("GreenTable: requires mu > 0 (mu_star degenerates)");
  if (!(length > 0)) throw std::invalid_argument("GreenTable: length must be positive");
  GreenTable t;
  t.mu_star = std::pow(mu, 0.25) / std::sqrt(2.0);
  t.length = length;
  const double u = t.mu_star * length;
  t.k0 = (std::cosh(2 * u) - std::cos(2 * u)) / 2.0;
  t.k1 = (std::exp(2 * u) - std::cos(2 * u)) / 2.0;
  t.k2 = -std::sin(2 * u) / 2.0;
  return t;
}

double green_kernel(const GreenTable& t, double x, double xi) {
  const double L = t.length, a = t.mu_star;
  if (!(a > 0)) throw std::invalid_argument("green_kernel: mu_star must be positive");
  if (x < -1e-12 || xi < -1e-12 || x > L * (1 + 1e-12) || xi > L * (1 + 1e-12))
    throw std::invalid_argument("green_kernel: arguments outside [0, L]");
  const double lo = std::min(x, xi), hi = std::max(x, xi);
  const double u = a * L;
  const double e2u = std::exp(-2 * u);
  const double c2u = std::cos(2 * u), s2u = std::sin(2 * u);
  const double D = 1.0 + e2u * e2u - 2.0 * c2u * e2u;
  const double cl = std::cos(a * lo), sl = std::sin(a * lo);
  const double ch = std::cos(a * hi), sh = std::sin(a * hi);
  const double m1 = cl - sl, m3 = cl + sl;
  const double p2 = ch * (e2u - c2u) - sh * s2u;
  const double p4 = -sh * (e2u - c2u) - ch * s2u;
  const double q2 = ch * (1.0 - c2u * e2u) - sh * s2u * e2u;
  const double q4 = sh * (1.0 - c2u * e2u) + ch * s2u * e2u;
  const double T = std::exp(a * (lo + hi) - 2 * u) * (m1 * p2 + m3 * p4)
                 + std::exp(a * (lo - hi)) * (m1 * q2 + m3 * q4)
                 - std::exp(a * (hi - lo) - 2 * u) * (m3 * p2 + m1 * p4)
                 - std::exp(-a * (lo + hi)) * (m3 * q2 + m1 * q4);
  return T / (D * 8.0 * a * a * a);
}

GridField solve_bvp_direct(const BvpProblem& p) {
  validate(p);
  const Eigen::Index n = p.rhs.size();
  if (n < 9) throw std::invalid_argument("solve_bvp_direct: need at least 7 interior nodes");
  const double h = p.rhs.spacing;
  const double h4 = h * h * h * h;

  BandedMatrix<double> A(n, 2, 2);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  A(0, 0) = 1.0;
  A(n - 1, n - 1) = 1.0;
  for (Eigen::Index i = 1; i < n - 1; ++i) {
    const bool left_edge = (i == 1), right_edge = (i == n - 2);
    // ghost reflection phi(-1) = -phi(1) folds into the diagonal
    A(i, i) = (left_edge || right_edge ? 5.0 : 6.0) + p.mu * h4;
    A(i, i - 1) = -4.0;
    A(i, i + 1) = -4.0;
    if (i >= 2) A(i, i - 2) = 1.0;
    if (i + 2 <= n - 1) A(i, i + 2) = 1.0;
    b(i) = h4 * p.rhs.values(i);
  }
  BandedLU<double> lu(A);
  GridField out = p.rhs;
  out.values = lu.solve(b);
  return out;
}

GridField solve_bvp_green(const BvpProblem& p) {
  validate(p);
  const GreenTable table = GreenTable::make(p.mu, p.length);
  const Eigen::Index n = p.rhs.size();
  const double h = p.rhs.spacing;
  GridField out = p.rhs;
  out.values.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      acc += w * green_kernel(table, p.rhs.coord(i), p.rhs.coord(j)) * p.rhs.values(j);
    }
    out.values(i) = acc * h;
  }
  return out;
}

namespace {

double grid_norm(const Eigen::VectorXd& f, double h, NormP norm) {
  const Eigen::Index n = f.size();
  switch (norm) {
    case NormP::sup:
      return f.cwiseAbs().maxCoeff();
    case NormP::one: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        acc += ((i == 0 || i == n - 1) ? 0.5 : 1.0) * std::abs(f(i));
      return acc * h;
    }
    case NormP::two: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        acc += ((i == 0 || i == n - 1) ? 0.5 : 1.0) * f(i) * f(i);
      return std::sqrt(acc * h);
    }
  }
  throw std::logic_error("grid_norm: unreachable");
}

}  // namespace

double apriori_ratio(const BvpProblem& p, NormP norm) {
  const GridField phi = solve_bvp_direct(p);
  const double h = p.rhs.spacing;
  const double fnorm = grid_norm(p.rhs.values, h, norm);
  if (fnorm == 0.0) throw std::invalid_argument("apriori_ratio: zero right-hand side");

  // discrete phi'''' with the hinged ghost reflection at the ends
  const Eigen::Index n = phi.size();
  Eigen::VectorXd ext(n + 4);
  ext.segment(2, n) = phi.values;
  ext(1) = -phi.values(1);
  ext(0) = -phi.values(2);
  ext(n + 2) = -phi.values(n - 2);
  ext(n + 3) = -phi.values(n - 3);
  Eigen::VectorXd d4(n);
  const double h4 = h * h * h * h;
  for (Eigen::Index i = 0; i < n; ++i)
    d4(i) = (ext(i) - 4 * ext(i + 1) + 6 * ext(i + 2) - 4 * ext(i + 3) + ext(i + 4)) / h4;
  return (grid_norm(phi.values, h, norm) + grid_norm(d4, h, norm)) / fnorm;
}

}  // namespace ssf::biharm
