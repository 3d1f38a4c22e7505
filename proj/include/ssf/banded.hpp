#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "ssf/types.hpp"

namespace ssf {

/// Banded square matrix with `lower` sub- and `upper` superdiagonals,
/// LAPACK-style band storage (extra `lower` rows of headroom for the
/// pivoting fill of the LU factorization).
template <typename Scalar>
class BandedMatrix {
 public:
  BandedMatrix(Eigen::Index n, Eigen::Index lower, Eigen::Index upper)
      : n_(n), kl_(lower), ku_(upper),
        storage_(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(2 * lower + upper + 1, n)) {
    if (n < 1 || lower < 0 || upper < 0) throw std::invalid_argument("BandedMatrix: bad shape");
  }

  Eigen::Index rows() const { return n_; }
  Eigen::Index lower() const { return kl_; }
  Eigen::Index upper() const { return ku_; }

  bool in_band(Eigen::Index i, Eigen::Index j) const {
    return i >= 0 && j >= 0 && i < n_ && j < n_ && j - i <= ku_ && i - j <= kl_;
  }

  Scalar& operator()(Eigen::Index i, Eigen::Index j) {
    if (!in_band(i, j)) throw std::out_of_range("BandedMatrix: outside band");
    return storage_(kl_ + ku_ + i - j, j);
  }

  Scalar coeff(Eigen::Index i, Eigen::Index j) const {
    return in_band(i, j) ? storage_(kl_ + ku_ + i - j, j) : Scalar(0);
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> D =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_, n_);
    for (Eigen::Index j = 0; j < n_; ++j)
      for (Eigen::Index i = std::max<Eigen::Index>(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i)
        D(i, j) = coeff(i, j);
    return D;
  }

  // Raw band access used by the factorization (row index into the padded storage).
  Scalar& band(Eigen::Index r, Eigen::Index j) { return storage_(r, j); }
  Scalar band(Eigen::Index r, Eigen::Index j) const { return storage_(r, j); }

 private:
  Eigen::Index n_, kl_, ku_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> storage_;
};

/// LU factorization with partial (row) pivoting of a banded matrix.
template <typename Scalar>
class BandedLU {
 public:
  explicit BandedLU(BandedMatrix<Scalar> A)
      : A_(std::move(A)), piv_(static_cast<std::size_t>(A_.rows())) {
    factorize();
  }

  /// Solve A x = b for one or more right-hand sides (columns of b).
  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>
  solve(const Eigen::MatrixBase<Derived>& b) const {
    const Eigen::Index n = A_.rows();
    const Eigen::Index kl = A_.lower(), ku = A_.upper();
    if (b.rows() != n) throw std::invalid_argument("BandedLU::solve: size mismatch");
    Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> x = b;
    // forward substitution with the recorded row swaps
    for (Eigen::Index j = 0; j < n - 1; ++j) {
      const Eigen::Index p = piv_[static_cast<std::size_t>(j)];
      if (p != j) x.row(j).swap(x.row(p));
      const Eigen::Index last = std::min(n - 1, j + kl);
      for (Eigen::Index i = j + 1; i <= last; ++i)
        x.row(i) -= A_.band(kl + ku + i - j, j) * x.row(j);
    }
    // back substitution on U (bandwidth ku + kl after pivoting)
    const Eigen::Index kb = ku + kl;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      const Eigen::Index last = std::min(n - 1, i + kb);
      for (Eigen::Index j = i + 1; j <= last; ++j)
        x.row(i) -= A_.band(kl + ku + i - j, j) * x.row(j);
      const Scalar d = A_.band(kl + ku, i);
      if (d == Scalar(0)) throw std::runtime_error("BandedLU: singular matrix");
      x.row(i) /= d;
    }
    return x;
  }

 private:
  void factorize() {
    const Eigen::Index n = A_.rows();
    const Eigen::Index kl = A_.lower(), ku = A_.upper();
    const Eigen::Index kb = ku + kl;  // fill-extended upper bandwidth
    for (Eigen::Index j = 0; j < n; ++j) {
      // pivot search in column j, rows j..j+kl
      const Eigen::Index last = std::min(n - 1, j + kl);
      Eigen::Index p = j;
      Scalar best = std::abs(A_.band(kl + ku, j));
      for (Eigen::Index i = j + 1; i <= last; ++i) {
        const Scalar v = std::abs(A_.band(kl + ku + i - j, j));
        if (v > best) { best = v; p = i; }
      }
      piv_[static_cast<std::size_t>(j)] = p;
      if (best == Scalar(0)) throw std::runtime_error("BandedLU: singular matrix");
      if (p != j) {
        // swap rows j and p across the stored band columns j..min(n-1, j+kb)
        const Eigen::Index cend = std::min(n - 1, j + kb);
        for (Eigen::Index c = j; c <= cend; ++c) {
          const Eigen::Index rj = kl + ku + j - c;
          const Eigen::Index rp = kl + ku + p - c;
          std::swap(A_.band(rj, c), A_.band(rp, c));
        }
      }
      const Scalar d = A_.band(kl + ku, j);
      for (Eigen::Index i = j + 1; i <= last; ++i) {
        const Scalar m = A_.band(kl + ku + i - j, j) / d;
        A_.band(kl + ku + i - j, j) = m;
        const Eigen::Index cend = std::min(n - 1, j + kb);
        for (Eigen::Index c = j + 1; c <= cend; ++c)
          A_.band(kl + ku + i - c, c) -= m * A_.band(kl + ku + j - c, c);
      }
    }
  }

  BandedMatrix<Scalar> A_;
  std::vector<Eigen::Index> piv_;
};

}  // namespace ssf
