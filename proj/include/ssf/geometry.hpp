#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "ssf/finite_diff.hpp"
#include "ssf/interp.hpp"
#include "ssf/types.hpp"

namespace ssf::geometry {

template <typename Scalar>
Scalar trapezoid(const VectorX<Scalar>& f, const VectorX<Scalar>& x) {
  Scalar acc = Scalar(0);
  for (Eigen::Index i = 0; i + 1 < f.size(); ++i)
    acc += Scalar(0.5) * (f(i) + f(i + 1)) * (x(i + 1) - x(i));
  return acc;
}

/// Nodewise parameter speed |d(gamma)/d(param)|.
template <typename Scalar>
VectorX<Scalar> speed(const CurveT<Scalar>& c) {
  const VectorX<Scalar> dx = fd::derivative_nonuniform<Scalar>(c.points.col(0), c.param, 1);
  const VectorX<Scalar> dy = fd::derivative_nonuniform<Scalar>(c.points.col(1), c.param, 1);
  return (dx.array().square() + dy.array().square()).sqrt();
}

/// Per-segment arclength measured on the local cubic interpolant
/// (4-point Gauss quadrature of |P'|). This is the discrete speed measure
/// backing the is_arclength flag: chord ratios alone cannot reach the
/// 1e-6 tolerance on curved data.
template <typename Scalar>
VectorX<Scalar> segment_arclengths(const CurveT<Scalar>& c) {
  static const Scalar gx[4] = {Scalar(-0.8611363115940526), Scalar(-0.3399810435848563),
                               Scalar(0.3399810435848563), Scalar(0.8611363115940526)};
  static const Scalar gw[4] = {Scalar(0.3478548451374538), Scalar(0.6521451548625461),
                               Scalar(0.6521451548625461), Scalar(0.3478548451374538)};
  interp::Cubic<Scalar> curve(c.param, c.points);
  const Eigen::Index n = c.size();
  VectorX<Scalar> seg(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const Scalar a = c.param(i), b = c.param(i + 1);
    const Scalar mid = (a + b) / 2, half = (b - a) / 2;
    Scalar acc = Scalar(0);
    for (int q = 0; q < 4; ++q) acc += gw[q] * curve.derivative(mid + half * gx[q]).norm();
    seg(i) = acc * half;
  }
  return seg;
}

template <typename Scalar>
void validate(const CurveT<Scalar>& c) {
  const Eigen::Index n = c.size();
  if (n < 5) throw std::invalid_argument("Curve: need at least 5 points");
  if (c.param.size() != n) throw std::invalid_argument("Curve: param/points length mismatch");
  if (!c.points.allFinite() || !c.param.allFinite())
    throw std::invalid_argument("Curve: non-finite data");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(c.param(i) > c.param(i - 1)))
      throw std::invalid_argument("Curve: param not strictly increasing");
    if ((c.points.row(i) - c.points.row(i - 1)).norm() == Scalar(0))
      throw std::invalid_argument("Curve: repeated consecutive points");
  }
  if (c.is_arclength) {
    const VectorX<Scalar> seg = segment_arclengths(c);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const Scalar ratio = seg(i) / (c.param(i + 1) - c.param(i));
      if (std::abs(ratio - Scalar(1)) > Scalar(kArclengthTol))
        throw std::invalid_argument("Curve: is_arclength set but speed deviates from 1");
    }
  }
}

/// Signed curvature kappa = (d2 . R d1)/|d1|^3 with R the quarter turn,
/// derivatives taken in the curve parameter.
template <typename Scalar>
GridFieldT<Scalar> curvature(const CurveT<Scalar>& c) {
  validate(c);
  const VectorX<Scalar> d1x = fd::derivative_nonuniform<Scalar>(c.points.col(0), c.param, 1);
  const VectorX<Scalar> d1y = fd::derivative_nonuniform<Scalar>(c.points.col(1), c.param, 1);
  const VectorX<Scalar> d2x = fd::derivative_nonuniform<Scalar>(c.points.col(0), c.param, 2);
  const VectorX<Scalar> d2y = fd::derivative_nonuniform<Scalar>(c.points.col(1), c.param, 2);
  GridFieldT<Scalar> out;
  out.values.resize(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const Scalar cross = d1x(i) * d2y(i) - d1y(i) * d2x(i);
    const Scalar sp = std::sqrt(d1x(i) * d1x(i) + d1y(i) * d1y(i));
    out.values(i) = cross / (sp * sp * sp);
  }
  out.origin = c.param(0);
  out.spacing = (c.param(c.size() - 1) - c.param(0)) / Scalar(c.size() - 1);
  return out;
}

template <typename Scalar>
EnergyReportT<Scalar> energy(const CurveT<Scalar>& c, Scalar lambda) {
  validate(c);
  if (!(lambda > Scalar(0))) throw std::invalid_argument("energy: lambda must be positive");
  const VectorX<Scalar> sp = speed(c);
  const VectorX<Scalar> k = curvature(c).values;
  EnergyReportT<Scalar> rep;
  rep.length = trapezoid<Scalar>(sp, c.param);
  rep.bending = trapezoid<Scalar>((k.array().square() * sp.array()).matrix(), c.param);
  rep.lambda = lambda;
  rep.total = lambda * lambda * rep.length + rep.bending;
  return rep;
}

/// Total turning i(gamma) = int kappa ds.
template <typename Scalar>
Scalar index(const CurveT<Scalar>& c) {
  validate(c);
  const VectorX<Scalar> sp = speed(c);
  const VectorX<Scalar> k = curvature(c).values;
  return trapezoid<Scalar>((k.array() * sp.array()).matrix(), c.param);
}

/// Reconstruct the arclength curve with prescribed curvature: theta' = kappa,
/// position by RK4 (4 substeps per grid interval, curvature interpolated
/// with the local cubic).
template <typename Scalar>
CurveT<Scalar> build_from_curvature(const GridFieldT<Scalar>& kappa,
                                    const Vector2<Scalar>& start, Scalar start_angle) {
  ssf::validate(kappa);
  const Eigen::Index n = kappa.size();
  VectorX<Scalar> sgrid(n);
  for (Eigen::Index i = 0; i < n; ++i) sgrid(i) = kappa.coord(i);
  interp::Cubic<Scalar> kfun(sgrid, kappa.values);

  CurveT<Scalar> c;
  c.points.resize(n, 2);
  c.param = sgrid;
  c.is_arclength = true;
  Scalar x = start.x(), y = start.y(), th = start_angle;
  c.points(0, 0) = x;
  c.points(0, 1) = y;
  const int nsub = 4;
  const Scalar h = kappa.spacing / Scalar(nsub);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    Scalar s = sgrid(i);
    for (int k = 0; k < nsub; ++k) {
      // RK4 on (x, y, theta)' = (cos theta, sin theta, kappa(s))
      const Scalar k1x = std::cos(th), k1y = std::sin(th), k1t = kfun.eval(s)(0);
      const Scalar k2x = std::cos(th + h / 2 * k1t), k2y = std::sin(th + h / 2 * k1t),
                   k2t = kfun.eval(s + h / 2)(0);
      const Scalar k3x = std::cos(th + h / 2 * k2t), k3y = std::sin(th + h / 2 * k2t),
                   k3t = kfun.eval(s + h / 2)(0);
      const Scalar k4x = std::cos(th + h * k3t), k4y = std::sin(th + h * k3t),
                   k4t = kfun.eval(s + h)(0);
      x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
      y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
      th += h / 6 * (k1t + 2 * k2t + 2 * k3t + k4t);
      s += h;
    }
    c.points(i + 1, 0) = x;
    c.points(i + 1, 1) = y;
  }
  return c;
}

namespace detail {

/// Invert the cumulative arclength of a cubic interpolant: returns the
/// parameter t with sigma(t) = target, bracketed in [ta, tb].
template <typename Scalar>
Scalar invert_arclength(const interp::Cubic<Scalar>& curve, Scalar ta, Scalar tb,
                        Scalar sigma_a, Scalar target) {
  static const Scalar gx[4] = {Scalar(-0.8611363115940526), Scalar(-0.3399810435848563),
                               Scalar(0.3399810435848563), Scalar(0.8611363115940526)};
  static const Scalar gw[4] = {Scalar(0.3478548451374538), Scalar(0.6521451548625461),
                               Scalar(0.6521451548625461), Scalar(0.3478548451374538)};
  auto arc_to = [&](Scalar t) {
    const Scalar mid = (ta + t) / 2, half = (t - ta) / 2;
    Scalar acc = Scalar(0);
    for (int q = 0; q < 4; ++q) acc += gw[q] * curve.derivative(mid + half * gx[q]).norm();
    return sigma_a + acc * half;
  };
  Scalar lo = ta, hi = tb;
  Scalar t = ta + (tb - ta) * Scalar(0.5);
  for (int it = 0; it < 60; ++it) {
    const Scalar g = arc_to(t) - target;
    if (g > Scalar(0)) hi = t; else lo = t;
    const Scalar dg = curve.derivative(t).norm();
    Scalar tn = t - g / dg;
    if (!(tn > lo && tn < hi)) tn = (lo + hi) / 2;
    if (std::abs(tn - t) < Scalar(1e-15) * (std::abs(tb) + Scalar(1))) return tn;
    t = tn;
  }
  return t;
}

}  // namespace detail

/// Reparametrize by arclength: n points equally spaced in arclength along the
/// local cubic through the input points, endpoints preserved exactly. The
/// pass is repeated (at most three times) until the measured segment lengths
/// are uniform well inside the is_arclength tolerance.
template <typename Scalar>
CurveT<Scalar> resample_arclength(const CurveT<Scalar>& input, Eigen::Index n) {
  validate(input);
  if (n < 5) throw std::invalid_argument("resample_arclength: need n >= 5");

  CurveT<Scalar> cur = input;
  cur.is_arclength = false;
  // iterate well below the flag tolerance: leftover nonuniformity shows up
  // as parametrization noise in the first flow steps after a resample
  const Scalar tol = Scalar(5e-10);
  Scalar worst = std::numeric_limits<Scalar>::max();
  for (int pass = 0; pass < 6 && worst > tol; ++pass) {
    const VectorX<Scalar> seg = segment_arclengths(cur);
    VectorX<Scalar> sigma(cur.size());
    sigma(0) = Scalar(0);
    for (Eigen::Index i = 0; i + 1 < cur.size(); ++i) sigma(i + 1) = sigma(i) + seg(i);
    const Scalar total = sigma(cur.size() - 1);
    interp::Cubic<Scalar> curve(cur.param, cur.points);

    CurveT<Scalar> next;
    next.points.resize(n, 2);
    next.param.resize(n);
    next.points.row(0) = input.points.row(0);
    next.points.row(n - 1) = input.points.row(input.size() - 1);
    Eigen::Index seg_idx = 0;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      const Scalar target = total * Scalar(i) / Scalar(n - 1);
      while (seg_idx + 2 < cur.size() && sigma(seg_idx + 1) < target) ++seg_idx;
      const Scalar t = detail::invert_arclength(curve, cur.param(seg_idx), cur.param(seg_idx + 1),
                                                sigma(seg_idx), target);
      next.points.row(i) = curve.eval(t);
    }
    for (Eigen::Index i = 0; i < n; ++i) next.param(i) = total * Scalar(i) / Scalar(n - 1);
    cur = next;

    const VectorX<Scalar> check = segment_arclengths(cur);
    const Scalar hstep = cur.param(1) - cur.param(0);
    worst = Scalar(0);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
      worst = std::max(worst, std::abs(check(i) / hstep - Scalar(1)));
  }
  if (worst > Scalar(kArclengthTol))
    throw std::runtime_error("resample_arclength: failed to reach uniform speed (degenerate input?)");
  cur.is_arclength = true;
  return cur;
}

template <typename Scalar>
Scalar endpoint_distance(const CurveT<Scalar>& c) {
  return (c.points.row(c.size() - 1) - c.points.row(0)).norm();
}

/// Curvature of uniformly sampled points measured through the antisymmetric
/// (pinned-hinged) endpoint extension, one central stencil per node. The
/// truncation error is then a smooth field, so higher differences of the
/// result stay clean; accuracy 2 or 4 selects the interior stencil order.
template <typename Scalar>
VectorX<Scalar> curvature_hinged(const PointsX<Scalar>& pts, Scalar h, int accuracy = 2,
                                 PointsX<Scalar>* normal_out = nullptr,
                                 VectorX<Scalar>* speed_out = nullptr) {
  const Eigen::Index n = pts.rows();
  PointsX<Scalar> ext(n + 4, 2);
  ext.middleRows(2, n) = pts;
  ext.row(1) = 2 * pts.row(0) - pts.row(1);
  ext.row(0) = 2 * pts.row(0) - pts.row(2);
  ext.row(n + 2) = 2 * pts.row(n - 1) - pts.row(n - 2);
  ext.row(n + 3) = 2 * pts.row(n - 1) - pts.row(n - 3);

  VectorX<Scalar> kappa(n);
  if (normal_out) normal_out->resize(n, 2);
  if (speed_out) speed_out->resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index e = i + 2;
    Eigen::Matrix<Scalar, 1, 2> d1, d2;
    if (accuracy == 4) {
      d1 = (ext.row(e - 2) - 8 * ext.row(e - 1) + 8 * ext.row(e + 1) - ext.row(e + 2)) / (12 * h);
      d2 = (-ext.row(e - 2) + 16 * ext.row(e - 1) - 30 * ext.row(e) + 16 * ext.row(e + 1) -
            ext.row(e + 2)) / (12 * h * h);
    } else {
      d1 = (ext.row(e + 1) - ext.row(e - 1)) / (2 * h);
      d2 = (ext.row(e + 1) - 2 * ext.row(e) + ext.row(e - 1)) / (h * h);
    }
    const Scalar sp = d1.norm();
    kappa(i) = (d1(0) * d2(1) - d1(1) * d2(0)) / (sp * sp * sp);
    if (normal_out) normal_out->row(i) = Eigen::Matrix<Scalar, 1, 2>(-d1(1), d1(0)) / sp;
    if (speed_out) (*speed_out)(i) = sp;
  }
  return kappa;
}

template <typename Scalar>
struct MeasurementsT {
  Scalar length, bending, total, index, sup_kappa;
};

using Measurements = MeasurementsT<double>;

/// One-pass length/bending/index/sup|kappa| for flow diagnostics. Skips the
/// contract checks of the individual operations (callers own valid states).
template <typename Scalar>
MeasurementsT<Scalar> measure(const CurveT<Scalar>& c, Scalar lambda) {
  const VectorX<Scalar> d1x = fd::derivative_nonuniform<Scalar>(c.points.col(0), c.param, 1);
  const VectorX<Scalar> d1y = fd::derivative_nonuniform<Scalar>(c.points.col(1), c.param, 1);
  const VectorX<Scalar> d2x = fd::derivative_nonuniform<Scalar>(c.points.col(0), c.param, 2);
  const VectorX<Scalar> d2y = fd::derivative_nonuniform<Scalar>(c.points.col(1), c.param, 2);
  MeasurementsT<Scalar> m{Scalar(0), Scalar(0), Scalar(0), Scalar(0), Scalar(0)};
  const Eigen::Index n = c.size();
  VectorX<Scalar> sp(n), k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sp(i) = std::sqrt(d1x(i) * d1x(i) + d1y(i) * d1y(i));
    k(i) = (d1x(i) * d2y(i) - d1y(i) * d2x(i)) / (sp(i) * sp(i) * sp(i));
    m.sup_kappa = std::max(m.sup_kappa, std::abs(k(i)));
  }
  m.length = trapezoid<Scalar>(sp, c.param);
  m.bending = trapezoid<Scalar>((k.array().square() * sp.array()).matrix(), c.param);
  m.index = trapezoid<Scalar>((k.array() * sp.array()).matrix(), c.param);
  m.total = lambda * lambda * m.length + m.bending;
  return m;
}

template <typename Scalar>
Scalar point_segment_distance(const Vector2<Scalar>& p, const Vector2<Scalar>& a,
                              const Vector2<Scalar>& b) {
  const Vector2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == Scalar(0)) return (p - a).norm();
  const Scalar t = std::clamp((p - a).dot(ab) / len2, Scalar(0), Scalar(1));
  return (p - (a + t * ab)).norm();
}

/// Largest distance from a point of A to the polyline B.
template <typename Scalar>
Scalar directed_gap(const PointsX<Scalar>& A, const PointsX<Scalar>& B) {
  Scalar worst = Scalar(0);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const Vector2<Scalar> p = A.row(i).transpose();
    Scalar best = std::numeric_limits<Scalar>::max();
    for (Eigen::Index j = 0; j + 1 < B.rows(); ++j) {
      best = std::min(best, point_segment_distance<Scalar>(p, B.row(j).transpose(),
                                                           B.row(j + 1).transpose()));
      if (best == Scalar(0)) break;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

template <typename Scalar>
Scalar hausdorff(const PointsX<Scalar>& A, const PointsX<Scalar>& B) {
  return std::max(directed_gap(A, B), directed_gap(B, A));
}

}  // namespace ssf::geometry
