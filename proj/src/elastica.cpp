#include "ssf/elastica.hpp"

#include <cmath>
#include <stdexcept>

#include "ssf/finite_diff.hpp"
#include "ssf/geometry.hpp"

namespace ssf::elastica {

namespace {

const double kSqrt2 = 1.4142135623730951;

double closed_form(double s, double lambda, double s0, int sign) {
  return sign * kSqrt2 * lambda / std::cosh(lambda * (s - s0) / kSqrt2);
}

}  // namespace

double el_residual(const GridField& kappa, double lambda) {
  ssf::validate(kappa);
  const Eigen::Index n = kappa.size();
  const double h2 = kappa.spacing * kappa.spacing;
  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double k = kappa.values(i);
    const double kpp = (kappa.values(i - 1) - 2 * k + kappa.values(i + 1)) / h2;
    worst = std::max(worst, std::abs(2 * kpp + k * k * k - lambda * lambda * k));
  }
  return worst;
}

GridField integrate_form(double lambda, int sign, double h, double s_max) {
  if (!(lambda > 0) || !(h > 0) || !(s_max > h))
    throw std::invalid_argument("integrate_form: bad parameters");
  if (sign != 1 && sign != -1) throw std::invalid_argument("integrate_form: sign must be +-1");

  const Eigen::Index half = static_cast<Eigen::Index>(std::llround(s_max / h));
  Eigen::VectorXd ks(half + 1);
  ks(0) = kSqrt2 * lambda;

  auto rhs_w = [lambda](double w) { return lambda * lambda - 0.5 * w * w; };
  auto rhs_k = [lambda](double k) {
    const double f = lambda * lambda * k * k / 2.0 - k * k * k * k / 4.0;
    return f > 0.0 ? -std::sqrt(f) : 0.0;
  };
  double w = 0.0, k = ks(0);
  bool rotated = true;
  for (Eigen::Index i = 1; i <= half; ++i) {
    if (rotated) {
      const double k1 = rhs_w(w), k2 = rhs_w(w + 0.5 * h * k1), k3 = rhs_w(w + 0.5 * h * k2),
                   k4 = rhs_w(w + h * k3);
      w += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      const double arg = 2.0 * lambda * lambda - w * w;
      k = arg > 0.0 ? std::sqrt(arg) : 0.0;
      if (k <= lambda) rotated = false;
    } else {
      const double k1 = rhs_k(k), k2 = rhs_k(k + 0.5 * h * k1), k3 = rhs_k(k + 0.5 * h * k2),
                   k4 = rhs_k(k + h * k3);
      k += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    ks(i) = k;
  }

  GridField out;
  out.spacing = h;
  out.origin = -double(half) * h;
  out.values.resize(2 * half + 1);
  for (Eigen::Index i = 0; i <= half; ++i) {
    out.values(half + i) = sign * ks(i);
    out.values(half - i) = sign * ks(i);  // even mirror about the peak
  }
  return out;
}

GridField borderline_profile(double lambda, double s0, int sign, const GridSpec& grid) {
  if (!(lambda > 0)) throw std::invalid_argument("borderline_profile: lambda must be positive");
  if (sign != 1 && sign != -1) throw std::invalid_argument("borderline_profile: sign must be +-1");
  if (grid.count < 5 || !(grid.spacing > 0))
    throw std::invalid_argument("borderline_profile: bad grid");
  GridField out;
  out.origin = grid.origin;
  out.spacing = grid.spacing;
  out.values.resize(grid.count);
  for (Eigen::Index i = 0; i < grid.count; ++i)
    out.values(i) = closed_form(out.coord(i), lambda, s0, sign);
  return out;
}

ElasticaProfile classify(const Curve& curve, double lambda, double tol) {
  geometry::validate(curve);
  if (!(tol > 0)) throw std::invalid_argument("classify: tol must be positive");
  Curve c = curve;
  if (!c.is_arclength) c = geometry::resample_arclength(c, c.size());
  const GridField kappa = geometry::curvature(c);
  const Eigen::Index n = kappa.size();

  ElasticaProfile out;
  const double sup = kappa.values.cwiseAbs().maxCoeff();
  if (sup < tol) {
    out.kind = CurveClass::line;
    out.lambda = lambda;
    return out;
  }

  const double range = kappa.values.maxCoeff() - kappa.values.minCoeff();
  if (range < 0.01 * sup) {
    out.kind = CurveClass::non_stationary;
    out.note = "constant curvature: circle branch has infinite total squared curvature, excluded";
    return out;
  }

  Eigen::Index ipk = 0;
  kappa.values.cwiseAbs().maxCoeff(&ipk);
  double s0 = kappa.coord(ipk);
  double peak = std::abs(kappa.values(ipk));
  if (ipk > 0 && ipk + 1 < n) {
    // sub-node peak by parabolic fit
    const double km = std::abs(kappa.values(ipk - 1)), k0 = std::abs(kappa.values(ipk)),
                 kp = std::abs(kappa.values(ipk + 1));
    const double denom = km - 2 * k0 + kp;
    if (denom < 0) {
      const double delta = 0.5 * (km - kp) / denom;
      s0 += delta * kappa.spacing;
      peak = k0 - 0.25 * (km - kp) * delta;
    }
  }
  const int sign = kappa.values(ipk) >= 0 ? +1 : -1;
  const double lambda_eff = peak / kSqrt2;

  out.lambda = lambda_eff;
  out.s0 = s0;
  out.sign = sign;

  // shape gap against the fitted closed form, L2 in arclength
  Eigen::VectorXd model(n), diff(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    model(i) = closed_form(kappa.coord(i), lambda_eff, s0, sign);
    diff(i) = kappa.values(i) - model(i);
  }
  const double gap = std::sqrt(diff.squaredNorm() / model.squaredNorm());
  const double residual = el_residual(kappa, lambda_eff);
  const double residual_bound = 10.0 * tol * std::max(1.0, lambda_eff * lambda_eff * lambda_eff);

  if (gap < 10.0 * tol && residual < residual_bound &&
      std::abs(lambda_eff - lambda) < 0.05 * lambda) {
    out.kind = CurveClass::borderline;
  } else {
    out.kind = CurveClass::non_stationary;
    out.note = "no borderline fit: gap=" + std::to_string(gap) +
               " residual=" + std::to_string(residual) +
               " lambda_eff=" + std::to_string(lambda_eff);
  }
  return out;
}

}  // namespace ssf::elastica
