#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <vector>

#include "ssf/types.hpp"

namespace ssf::fd {

/// Stencil weights for the m-th derivative at 0 from nodes at the given
/// offsets: exact on polynomials of degree < offsets.size().
template <typename Scalar>
VectorX<Scalar> weights(int m, const VectorX<Scalar>& offsets) {
  const Eigen::Index p = offsets.size();
  if (m < 0 || m >= p) throw std::invalid_argument("fd::weights: need more nodes than derivative order");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> V(p, p);
  Scalar fact = Scalar(1);
  for (Eigen::Index k = 0; k < p; ++k) {
    if (k > 0) fact *= Scalar(k);
    for (Eigen::Index j = 0; j < p; ++j)
      V(k, j) = (k == 0) ? Scalar(1) : Scalar(std::pow(offsets(j), Scalar(k))) / fact;
  }
  VectorX<Scalar> rhs = VectorX<Scalar>::Zero(p);
  rhs(m) = Scalar(1);
  return V.fullPivLu().solve(rhs);
}

namespace detail {

// Exact second-order stencils on uniform grids (rational weights, no solver
// noise): one row per distance from the left edge, last row = central.
struct Stencil {
  int first;                   // offset of the first weight relative to the node
  std::vector<double> w;
};

inline const std::vector<Stencil>& stencils(int m) {
  static const std::vector<Stencil> s1 = {
      {0, {-1.5, 2.0, -0.5}},
      {-1, {-0.5, 0.0, 0.5}},
  };
  static const std::vector<Stencil> s2 = {
      {0, {2.0, -5.0, 4.0, -1.0}},
      {-1, {1.0, -2.0, 1.0}},
  };
  static const std::vector<Stencil> s3 = {
      {0, {-2.5, 9.0, -12.0, 7.0, -1.5}},
      {-1, {-1.5, 5.0, -6.0, 3.0, -0.5}},
      {-2, {-0.5, 1.0, 0.0, -1.0, 0.5}},
  };
  static const std::vector<Stencil> s4 = {
      {0, {3.0, -14.0, 26.0, -24.0, 11.0, -2.0}},
      {-1, {2.0, -9.0, 16.0, -14.0, 6.0, -1.0}},
      {-2, {1.0, -4.0, 6.0, -4.0, 1.0}},
  };
  switch (m) {
    case 1: return s1;
    case 2: return s2;
    case 3: return s3;
    case 4: return s4;
  }
  throw std::invalid_argument("fd: derivative order must be 1..4");
}

}  // namespace detail

/// m-th derivative (m in 1..4) of uniformly spaced samples: central stencils
/// in the interior, skewed/one-sided second-order stencils near the ends.
/// accuracy = 4 (m = 1, 2 only) switches the interior to five-point
/// fourth-order stencils; the edge rows stay second order.
template <typename Scalar>
VectorX<Scalar> derivative_uniform(const VectorX<Scalar>& f, Scalar h, int m, int accuracy = 2) {
  if (accuracy == 4) {
    if (m > 2) throw std::invalid_argument("fd::derivative_uniform: accuracy 4 needs m <= 2");
    const Eigen::Index n = f.size();
    if (n < 5) throw std::invalid_argument("fd::derivative_uniform: too few samples");
    VectorX<Scalar> out = derivative_uniform(f, h, m, 2);
    const Scalar hm = (m == 1) ? h : h * h;
    for (Eigen::Index i = 2; i < n - 2; ++i) {
      if (m == 1)
        out(i) = (f(i - 2) - 8 * f(i - 1) + 8 * f(i + 1) - f(i + 2)) / (12 * hm);
      else
        out(i) = (-f(i - 2) + 16 * f(i - 1) - 30 * f(i) + 16 * f(i + 1) - f(i + 2)) / (12 * hm);
    }
    return out;
  }
  if (accuracy != 2) throw std::invalid_argument("fd::derivative_uniform: accuracy 2 or 4");
  const auto& rows = detail::stencils(m);
  const Eigen::Index n = f.size();
  const Eigen::Index margin = static_cast<Eigen::Index>(rows.size()) - 1;
  if (n < static_cast<Eigen::Index>(rows.front().w.size()))
    throw std::invalid_argument("fd::derivative_uniform: too few samples");
  const Scalar hm = std::pow(h, Scalar(m));
  const double flip = (m % 2 == 0) ? 1.0 : -1.0;

  VectorX<Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index from_left = i;
    const Eigen::Index from_right = n - 1 - i;
    Scalar acc = Scalar(0);
    if (from_left >= margin && from_right >= margin) {
      const auto& st = rows.back();
      for (std::size_t j = 0; j < st.w.size(); ++j)
        acc += Scalar(st.w[j]) * f(i + st.first + static_cast<Eigen::Index>(j));
    } else if (from_left < margin) {
      const auto& st = rows[static_cast<std::size_t>(from_left)];
      for (std::size_t j = 0; j < st.w.size(); ++j)
        acc += Scalar(st.w[j]) * f(i + st.first + static_cast<Eigen::Index>(j));
    } else {
      // mirror of the left-edge stencil
      const auto& st = rows[static_cast<std::size_t>(from_right)];
      for (std::size_t j = 0; j < st.w.size(); ++j)
        acc += Scalar(flip * st.w[j]) * f(i - st.first - static_cast<Eigen::Index>(j));
    }
    out(i) = acc / hm;
  }
  return out;
}

/// First or second derivative on a strictly increasing (possibly nonuniform)
/// grid: 3-point stencils exact for quadratics.
template <typename Scalar>
VectorX<Scalar> derivative_nonuniform(const VectorX<Scalar>& f, const VectorX<Scalar>& x, int m) {
  const Eigen::Index n = f.size();
  if (m < 1 || m > 2) throw std::invalid_argument("fd::derivative_nonuniform: order 1 or 2 only");
  if (x.size() != n || n < 3) throw std::invalid_argument("fd::derivative_nonuniform: bad sizes");
  VectorX<Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index c = std::min(std::max<Eigen::Index>(i, 1), n - 2);
    const Scalar a = x(c - 1) - x(i), b = x(c) - x(i), d = x(c + 1) - x(i);
    // differentiated quadratic Lagrange basis evaluated at offset 0
    Scalar wa, wb, wd;
    if (m == 1) {
      wa = (-b - d) / ((a - b) * (a - d));
      wb = (-a - d) / ((b - a) * (b - d));
      wd = (-a - b) / ((d - a) * (d - b));
    } else {
      wa = Scalar(2) / ((a - b) * (a - d));
      wb = Scalar(2) / ((b - a) * (b - d));
      wd = Scalar(2) / ((d - a) * (d - b));
    }
    out(i) = wa * f(c - 1) + wb * f(c) + wd * f(c + 1);
  }
  return out;
}

}  // namespace ssf::fd
