#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ssf {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using PointsX = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

/// Quarter-turn rotation (0,-1;1,0): fixes the sign convention of the
/// normal and hence of the signed curvature everywhere in this library.
template <typename Scalar>
Vector2<Scalar> quarter_turn(const Vector2<Scalar>& v) {
  return Vector2<Scalar>(-v.y(), v.x());
}

/// Tolerance on the discrete unit-speed check backing Curve::is_arclength.
inline constexpr double kArclengthTol = 1e-6;

/// Ordered planar point sequence with parameter metadata.
template <typename Scalar>
struct CurveT {
  PointsX<Scalar> points;
  VectorX<Scalar> param;        // strictly increasing, same length as points
  bool is_arclength = false;    // |d(gamma)/d(param)| ~ 1 everywhere

  Eigen::Index size() const { return points.rows(); }
  Scalar domain_length() const { return param(size() - 1) - param(0); }
  Vector2<Scalar> point(Eigen::Index i) const { return points.row(i).transpose(); }
};

/// Scalar samples on a uniform 1-D grid.
template <typename Scalar>
struct GridFieldT {
  VectorX<Scalar> values;
  Scalar spacing = Scalar(1);
  Scalar origin = Scalar(0);

  Eigen::Index size() const { return values.size(); }
  Scalar coord(Eigen::Index i) const { return origin + spacing * Scalar(i); }
  Scalar span() const { return spacing * Scalar(size() - 1); }
};

template <typename Scalar>
struct EnergyReportT {
  Scalar length;    // L(gamma)
  Scalar bending;   // int kappa^2 ds
  Scalar total;     // lambda^2 * length + bending
  Scalar lambda;
};

using Curve = CurveT<double>;
using GridField = GridFieldT<double>;
using EnergyReport = EnergyReportT<double>;

template <typename Scalar>
void validate(const GridFieldT<Scalar>& g) {
  if (g.size() < 5) throw std::invalid_argument("GridField: need at least 5 values");
  if (!(g.spacing > Scalar(0))) throw std::invalid_argument("GridField: spacing must be positive");
  if (!g.values.allFinite()) throw std::invalid_argument("GridField: non-finite values");
}

/// Uniform grid descriptor, used where a field is requested on a caller-chosen grid.
template <typename Scalar>
struct GridSpecT {
  Scalar origin;
  Scalar spacing;
  Eigen::Index count;
};

using GridSpec = GridSpecT<double>;

}  // namespace ssf
