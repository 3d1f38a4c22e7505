#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "ssf/geometry.hpp"

using ssf::Curve;
using ssf::GridField;
namespace geo = ssf::geometry;

namespace {

const double kPi = 3.14159265358979323846;

Curve circle_arc(double radius, double angle0, double angle1, int n) {
  Curve c;
  c.points.resize(n, 2);
  c.param.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = angle0 + (angle1 - angle0) * i / (n - 1);
    c.points(i, 0) = radius * std::cos(t);
    c.points(i, 1) = radius * std::sin(t);
    c.param(i) = t;
  }
  return c;
}

Curve graph_curve(const std::function<double(double)>& psi, double a, double b, int n) {
  Curve c;
  c.points.resize(n, 2);
  c.param.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = a + (b - a) * i / (n - 1);
    c.points(i, 0) = x;
    c.points(i, 1) = psi(x);
    c.param(i) = x;
  }
  return c;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 0) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double left = (m - a) / 6.0 * (fa + 4 * f(lm) + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * f(rm) + fb);
  if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, tol / 2, depth + 1) +
         adaptive_simpson(f, m, b, tol / 2, depth + 1);
}

// Test-local Frenet integrator (fine fixed-step RK4 on the closed-form
// curvature), independent of geometry::build_from_curvature.
Curve frenet_reference(const std::function<double(double)>& kappa, double s0, double s1, int n,
                       double theta0) {
  Curve c;
  c.points.resize(n, 2);
  c.param.resize(n);
  double x = 0.0, y = 0.0, th = theta0;
  const int sub = 20;
  const double h = (s1 - s0) / (n - 1) / sub;
  c.points(0, 0) = x;
  c.points(0, 1) = y;
  c.param(0) = s0;
  for (int i = 1; i < n; ++i) {
    for (int k = 0; k < sub; ++k) {
      const double s = s0 + ((i - 1) * sub + k) * h;
      const double k1t = kappa(s);
      const double k2t = kappa(s + h / 2);
      const double k4t = kappa(s + h);
      const double k1x = std::cos(th), k1y = std::sin(th);
      const double k2x = std::cos(th + h / 2 * k1t), k2y = std::sin(th + h / 2 * k1t);
      const double k3x = std::cos(th + h / 2 * k2t), k3y = std::sin(th + h / 2 * k2t);
      const double k4x = std::cos(th + h * k2t), k4y = std::sin(th + h * k2t);
      x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
      y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
      th += h / 6 * (k1t + 4 * k2t + k4t);
    }
    c.points(i, 0) = x;
    c.points(i, 1) = y;
    c.param(i) = s0 + (s1 - s0) * i / (n - 1);
  }
  c.is_arclength = true;
  return c;
}

double borderline_kappa(double s, double lambda) {
  const double w = lambda * s / std::sqrt(2.0);
  return std::sqrt(2.0) * lambda / std::cosh(w);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("resample: clustered straight segment becomes uniform") {
  Curve c;
  const int n = 11;
  c.points.resize(n, 2);
  c.param.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = std::pow(double(i) / (n - 1), 3.0);  // clustered near 0
    c.points(i, 0) = x;
    c.points(i, 1) = 0.0;
    c.param(i) = x == 0.0 && i > 0 ? 1e-9 * i : x;
  }
  c.param(0) = 0.0;
  for (int i = 1; i < n; ++i) c.param(i) = std::max(c.param(i), c.param(i - 1) + 1e-12);
  const Curve r = geo::resample_arclength(c, n);
  CHECK(r.is_arclength);
  CHECK(r.points(0, 0) == 0.0);
  CHECK(r.points(n - 1, 0) == 1.0);
  for (int i = 0; i < n; ++i) {
    CHECK(r.points(i, 0) == doctest::Approx(double(i) / (n - 1)).epsilon(1e-9));
    CHECK(std::abs(r.points(i, 1)) < 1e-12);
  }
}

TEST_CASE("resample: quarter circle, uniform spacing and length") {
  const Curve c = circle_arc(1.0, 0.0, kPi / 2, 101);
  const Curve r = geo::resample_arclength(c, 101);
  CHECK(r.is_arclength);
  // spacing constant to 1e-6 (chord lengths all equal)
  double chord0 = (r.points.row(1) - r.points.row(0)).norm();
  for (int i = 1; i + 1 < r.size(); ++i) {
    const double ch = (r.points.row(i + 1) - r.points.row(i)).norm();
    CHECK(std::abs(ch / chord0 - 1.0) < 1e-6);
  }
  CHECK(r.domain_length() == doctest::Approx(kPi / 2).epsilon(1e-4 / (kPi / 2)));
  CHECK(geo::energy(r, 1.0).length == doctest::Approx(kPi / 2).epsilon(1e-4));
}

TEST_CASE("resample: sech graph matches adaptive quadrature arclength oracle") {
  auto psi = [](double x) { return 0.3 / std::cosh(x); };
  auto dpsi = [](double x) { return -0.3 * std::tanh(x) / std::cosh(x); };
  const Curve c = graph_curve(psi, -10.0, 10.0, 401);
  const Curve r = geo::resample_arclength(c, 401);
  const double oracle =
      adaptive_simpson([&](double x) { return std::sqrt(1.0 + dpsi(x) * dpsi(x)); }, -10, 10, 1e-12);
  CHECK(std::abs(r.domain_length() - oracle) / oracle < 1e-5);
}

TEST_CASE("resample: rejects degenerate input") {
  Curve c;
  c.points.resize(5, 2);
  c.param.resize(5);
  c.points << 0, 0, 1, 0, 1, 0, 2, 0, 3, 0;
  c.param << 0, 1, 2, 3, 4;
  CHECK_THROWS_AS(geo::resample_arclength(c, 11), std::invalid_argument);
}

TEST_CASE("curvature: straight segment is zero") {
  const Curve c = graph_curve([](double) { return 0.0; }, 0.0, 1.0, 21);
  const GridField k = geo::curvature(c);
  CHECK(k.values.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("curvature: ccw circular arc radius 2") {
  const Curve c = circle_arc(2.0, 0.1, 2.0, 201);
  const GridField k = geo::curvature(c);
  for (int i = 0; i < k.size(); ++i) CHECK(k.values(i) == doctest::Approx(0.5).epsilon(2e-4));
}

TEST_CASE("curvature: recovers borderline profile from reference curve, O(h^2)") {
  auto kap = [](double s) { return borderline_kappa(s, 1.0); };
  double err_prev = 0.0;
  for (int level = 0; level < 2; ++level) {
    const int n = level == 0 ? 401 : 801;
    const Curve c = frenet_reference(kap, -8.0, 8.0, n, 0.0);
    const GridField k = geo::curvature(c);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      err = std::max(err, std::abs(k.values(i) - kap(c.param(i))));
    if (level == 1) {
      const double order = std::log2(err_prev / err);
      CHECK(order > 1.7);
      CHECK(order < 2.4);
    }
    err_prev = err;
  }
}

TEST_CASE("energy: straight segment length 3, lambda 2") {
  const Curve c = graph_curve([](double) { return 1.0; }, 0.0, 3.0, 13);
  const auto rep = geo::energy(c, 2.0);
  CHECK(rep.length == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(rep.bending) < 1e-12);
  CHECK(rep.total == doctest::Approx(12.0).epsilon(1e-11));
  CHECK(rep.total == rep.lambda * rep.lambda * rep.length + rep.bending);
}

TEST_CASE("energy: full unit circle") {
  const Curve c = circle_arc(1.0, 0.0, 2 * kPi, 1001);
  const auto rep = geo::energy(c, 1.0);
  CHECK(std::abs(rep.length - 2 * kPi) < 1e-4);
  CHECK(std::abs(rep.bending - 2 * kPi) < 1e-3);
  CHECK(rep.total == doctest::Approx(4 * kPi).epsilon(1e-4));
}

TEST_CASE("energy: borderline elastica bending = 4 sqrt(2)") {
  auto kap = [](double s) { return borderline_kappa(s, 1.0); };
  const Curve c = frenet_reference(kap, -40.0, 40.0, 8001, 0.0);
  const auto rep = geo::energy(c, 1.0);
  const double oracle = adaptive_simpson(
      [&](double s) { return kap(s) * kap(s); }, -40.0, 40.0, 1e-12);
  CHECK(std::abs(oracle - 4 * std::sqrt(2.0)) < 1e-9);  // quadrature vs closed form
  CHECK(std::abs(rep.bending - 4 * std::sqrt(2.0)) < 1e-3);
}

TEST_CASE("index: line, circle, borderline") {
  const Curve line = graph_curve([](double) { return 0.2; }, 0.0, 2.0, 15);
  CHECK(std::abs(geo::index(line)) < 1e-12);

  const Curve circ = circle_arc(1.0, 0.0, 2 * kPi, 1001);
  CHECK(std::abs(geo::index(circ) - 2 * kPi) < 1e-3);

  auto kap = [](double s) { return borderline_kappa(s, 1.0); };
  const Curve bl = frenet_reference(kap, -40.0, 40.0, 4001, 0.0);
  const double oracle = adaptive_simpson(kap, -40.0, 40.0, 1e-12);
  CHECK(std::abs(oracle - 2 * kPi) < 1e-9);
  CHECK(std::abs(geo::index(bl) - 2 * kPi) < 1e-2);
}

TEST_CASE("build_from_curvature: zero curvature gives axis segment") {
  GridField k;
  k.values = Eigen::VectorXd::Zero(11);
  k.spacing = 0.1;
  k.origin = 0.0;
  const Curve c = geo::build_from_curvature(k, Eigen::Vector2d(0, 0), 0.0);
  for (int i = 0; i < 11; ++i) {
    CHECK(c.points(i, 0) == doctest::Approx(0.1 * i).epsilon(1e-13));
    CHECK(std::abs(c.points(i, 1)) < 1e-14);
  }
}

TEST_CASE("build_from_curvature: unit circle closes") {
  GridField k;
  const int n = 629;
  k.values = Eigen::VectorXd::Ones(n);
  k.spacing = 2 * kPi / (n - 1);
  k.origin = 0.0;
  const Curve c = geo::build_from_curvature(k, Eigen::Vector2d(1, 0), kPi / 2);
  CHECK((c.points.row(n - 1) - c.points.row(0)).norm() < 1e-6);
}

TEST_CASE("build_from_curvature: borderline loop with flat tails") {
  const double lam = 1.0;
  const int n = 1601;
  GridField k;
  k.values.resize(n);
  k.spacing = 80.0 / (n - 1);
  k.origin = -40.0;
  for (int i = 0; i < n; ++i) k.values(i) = borderline_kappa(k.coord(i), lam);
  const double theta0 = 2.0 * std::atan(std::sinh(-40.0 / std::sqrt(2.0)));  // ~ -pi
  const Curve c = geo::build_from_curvature(k, Eigen::Vector2d(0, 0), theta0 + kPi);

  // tangent angles approach 0 mod 2pi at both ends
  auto tangent_angle = [&](int i0, int i1) {
    const Eigen::Vector2d t = (c.points.row(i1) - c.points.row(i0)).transpose().normalized();
    return std::atan2(t.y(), t.x());
  };
  CHECK(std::abs(tangent_angle(0, 1)) < 1e-2);
  CHECK(std::abs(tangent_angle(n - 2, n - 1)) < 1e-2);
  CHECK(std::abs(geo::index(c) - 2 * kPi) < 1e-2);
}

TEST_CASE("invariance under rigid motion") {
  auto kap = [](double s) { return borderline_kappa(s, 1.0); };
  const Curve c = frenet_reference(kap, -5.0, 5.0, 501, 0.3);
  Curve moved = c;
  const double ang = 0.7;
  Eigen::Matrix2d R;
  R << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  moved.points = (c.points * R.transpose()).rowwise() + Eigen::RowVector2d(5.0, -3.0);

  const auto e0 = geo::energy(c, 1.3), e1 = geo::energy(moved, 1.3);
  CHECK(std::abs(e1.total - e0.total) < 1e-10 * std::abs(e0.total));
  CHECK(std::abs(geo::index(moved) - geo::index(c)) < 1e-10 * (1 + std::abs(geo::index(c))));
  const Eigen::VectorXd k0 = geo::curvature(c).values, k1 = geo::curvature(moved).values;
  CHECK((k1 - k0).cwiseAbs().maxCoeff() < 1e-10 * k0.cwiseAbs().maxCoeff());
}

TEST_CASE("orientation reversal negates curvature and index, keeps energy") {
  auto kap = [](double s) { return borderline_kappa(s, 1.0); };
  const Curve c = frenet_reference(kap, -5.0, 5.0, 401, 0.1);
  Curve rev;
  const int n = c.size();
  rev.points.resize(n, 2);
  rev.param.resize(n);
  for (int i = 0; i < n; ++i) {
    rev.points.row(i) = c.points.row(n - 1 - i);
    rev.param(i) = c.param(n - 1) - c.param(n - 1 - i);
  }
  rev.is_arclength = c.is_arclength;
  CHECK(geo::index(rev) == doctest::Approx(-geo::index(c)).epsilon(1e-10));
  CHECK(geo::energy(rev, 1.0).total == doctest::Approx(geo::energy(c, 1.0).total).epsilon(1e-10));
  const Eigen::VectorXd kf = geo::curvature(c).values, kr = geo::curvature(rev).values;
  for (int i = 0; i < n; ++i) CHECK(kr(i) == doctest::Approx(-kf(n - 1 - i)).epsilon(1e-9));
}

TEST_CASE("curvature converges at order 2 over a refinement ladder") {
  auto exact_kappa = [](double t) {
    const double a = 1.0, b = 0.6;
    const double denom = std::pow(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t), 1.5);
    return a * b / denom;
  };
  std::vector<double> errs;
  for (int n : {51, 101, 201, 401}) {
    Curve c;
    c.points.resize(n, 2);
    c.param.resize(n);
    for (int i = 0; i < n; ++i) {
      const double t = 0.2 + (kPi - 0.4) * i / (n - 1);
      c.points(i, 0) = std::cos(t);
      c.points(i, 1) = 0.6 * std::sin(t);
      c.param(i) = t;
    }
    const GridField k = geo::curvature(c);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      err = std::max(err, std::abs(k.values(i) - exact_kappa(c.param(i))));
    errs.push_back(err);
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    const double order = std::log2(errs[i] / errs[i + 1]);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
  }
}

TEST_CASE("round trip build_from_curvature . curvature is O(h^2)") {
  auto kap = [](double s) { return borderline_kappa(s, 1.0); };
  double err_prev = 0.0;
  for (int level = 0; level < 2; ++level) {
    const int n = level == 0 ? 201 : 401;
    const Curve ref = frenet_reference(kap, -6.0, 6.0, n, 0.0);
    const GridField k = geo::curvature(ref);
    Curve rebuilt = geo::build_from_curvature(k, ref.point(0), 0.0);
    // align start tangent: reference starts with angle theta(-6) ~ 0 by construction
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      err = std::max(err, (rebuilt.points.row(i) - ref.points.row(i)).norm());
    if (level == 1) CHECK(err_prev / err > 2.5);
    err_prev = err;
  }
}

TEST_CASE("hausdorff helpers") {
  Eigen::MatrixX2d A(3, 2), B(2, 2);
  A << 0, 0, 1, 0.1, 2, 0;
  B << 0, 0, 2, 0;
  CHECK(geo::directed_gap(A, B) == doctest::Approx(0.1));
  CHECK(geo::directed_gap(B, A) < 0.1);
  CHECK(geo::hausdorff(A, B) == doctest::Approx(0.1));
}

}  // TEST_SUITE
