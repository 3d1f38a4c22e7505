#pragma once

#include <string>

#include "ssf/types.hpp"

namespace ssf::elastica {

enum class CurveClass { line, borderline, non_stationary };

/// Classification record for a stationary limit. For the borderline kind the
/// peak curvature is sign * sqrt(2) * lambda at s = s0 by construction.
struct ElasticaProfile {
  CurveClass kind = CurveClass::non_stationary;
  double lambda = 0.0;
  double s0 = 0.0;
  int sign = +1;
  std::string note;
};

/// Max interior-node residual of 2 k'' + k^3 - lambda^2 k (central differences).
double el_residual(const GridField& kappa, double lambda);

/// Phase-plane integration of the stationary curvature equation on the zero
/// level of its first integral: dk/ds = -sign(s) * sqrt(lambda^2 k^2/2 - k^4/4),
/// k(0) = sign * sqrt(2) lambda, mirrored evenly to s < 0. Returns samples on
/// [-s_max, s_max] with spacing h.
///
/// The peak is a degenerate point of the square-root field, so the march
/// starts in the rotated variable w = sqrt(2 lambda^2 - k^2), which satisfies
/// the smooth equation w' = lambda^2 - w^2/2, and switches to the direct
/// k-equation once k drops below lambda; both phases are plain RK4.
GridField integrate_form(double lambda, int sign, double h, double s_max);

/// Closed-form borderline curvature sign * sqrt(2) lambda sech(lambda(s-s0)/sqrt 2).
GridField borderline_profile(double lambda, double s0, int sign, const GridSpec& grid);

/// Label a curve as a line, a borderline elastica (with fitted peak location,
/// sign and lambda), or neither. Constant-curvature inputs are reported
/// non-stationary with a note: the circle branch has infinite total squared
/// curvature in the proper-curve limit and is excluded.
ElasticaProfile classify(const Curve& curve, double lambda, double tol);

}  // namespace ssf::elastica
