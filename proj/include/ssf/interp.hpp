#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

#include "ssf/types.hpp"

namespace ssf::interp {

/// Local cubic (4-point Lagrange) interpolation of column data over strictly
/// increasing knots. Queries outside the knot range extrapolate with the
/// nearest edge cubic.
template <typename Scalar>
class Cubic {
 public:
  Cubic(VectorX<Scalar> knots, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values)
      : t_(std::move(knots)), y_(std::move(values)) {
    const Eigen::Index n = t_.size();
    if (n < 4 || y_.rows() != n) throw std::invalid_argument("interp::Cubic: need >= 4 knots");
    for (Eigen::Index i = 1; i < n; ++i)
      if (!(t_(i) > t_(i - 1))) throw std::invalid_argument("interp::Cubic: knots not increasing");
  }

  Eigen::Index window(Scalar tq) const {
    const Eigen::Index n = t_.size();
    const Scalar* begin = t_.data();
    Eigen::Index seg = static_cast<Eigen::Index>(std::upper_bound(begin, begin + n, tq) - begin) - 1;
    seg = std::clamp<Eigen::Index>(seg, 0, n - 2);
    return std::clamp<Eigen::Index>(seg - 1, 0, n - 4);  // first index of the 4-point window
  }

  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> eval(Scalar tq) const {
    const Eigen::Index f = window(tq);
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> acc =
        Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(1, y_.cols());
    for (int j = 0; j < 4; ++j) {
      Scalar basis = Scalar(1);
      for (int k = 0; k < 4; ++k)
        if (k != j) basis *= (tq - t_(f + k)) / (t_(f + j) - t_(f + k));
      acc += basis * y_.row(f + j);
    }
    return acc;
  }

  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> derivative(Scalar tq) const {
    const Eigen::Index f = window(tq);
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> acc =
        Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(1, y_.cols());
    for (int j = 0; j < 4; ++j) {
      Scalar dbasis = Scalar(0);
      for (int l = 0; l < 4; ++l) {
        if (l == j) continue;
        Scalar term = Scalar(1) / (t_(f + j) - t_(f + l));
        for (int k = 0; k < 4; ++k)
          if (k != j && k != l) term *= (tq - t_(f + k)) / (t_(f + j) - t_(f + k));
        dbasis += term;
      }
      acc += dbasis * y_.row(f + j);
    }
    return acc;
  }

  const VectorX<Scalar>& knots() const { return t_; }

 private:
  VectorX<Scalar> t_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> y_;
};

}  // namespace ssf::interp
