#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ssf/biharm.hpp"

using ssf::GridField;
namespace bh = ssf::biharm;

namespace {

const double kPi = 3.14159265358979323846;

GridField sampled(double L, int n, const std::function<double(double)>& f) {
  GridField g;
  g.values.resize(n);
  g.origin = 0.0;
  g.spacing = L / (n - 1);
  for (int i = 0; i < n; ++i) g.values(i) = f(g.coord(i));
  return g;
}

std::function<double(double)> three_sines(double L, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
  return [=](double x) {
    return a1 * std::sin(kPi * x / L) + a2 * std::sin(2 * kPi * x / L) +
           a3 * std::sin(3 * kPi * x / L);
  };
}

}  // namespace

TEST_SUITE("biharm") {

TEST_CASE("green kernel vanishes on the boundary") {
  const auto t = bh::GreenTable::make(16.0, 1.0);
  double scale = 0.0;
  for (double x : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double xi : {0.2, 0.5, 0.8}) scale = std::max(scale, std::abs(bh::green_kernel(t, x, xi)));
  for (double xi : {0.05, 0.3, 0.55, 0.8, 0.95}) {
    CHECK(std::abs(bh::green_kernel(t, 0.0, xi)) < 1e-10 * scale);
    CHECK(std::abs(bh::green_kernel(t, 1.0, xi)) < 1e-10 * scale);
  }
}

TEST_CASE("green kernel symmetry on a 20x20 grid") {
  for (double mu : {3.0, 40.0}) {
    const auto t = bh::GreenTable::make(mu, 2.0);
    double scale = 0.0, gap = 0.0;
    for (int i = 1; i < 20; ++i)
      for (int j = 1; j < 20; ++j) {
        const double x = 2.0 * i / 20, xi = 2.0 * j / 20;
        const double a = bh::green_kernel(t, x, xi), b = bh::green_kernel(t, xi, x);
        scale = std::max(scale, std::abs(a));
        gap = std::max(gap, std::abs(a - b));
      }
    CHECK(gap < 1e-8 * scale);
  }
}

TEST_CASE("green quadrature against the sin(pi x) eigenfunction, mu = 16") {
  const double mu = 16.0;
  const int n = 401;
  const GridField f = sampled(1.0, n, [](double x) { return std::sin(kPi * x); });
  bh::BvpProblem p{mu, 1.0, f};
  const GridField phi = bh::solve_bvp_green(p);
  const double denom = kPi * kPi * kPi * kPi + mu;
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    err = std::max(err, std::abs(phi.values(i) - std::sin(kPi * phi.coord(i)) / denom));
  CHECK(err < 1e-6);
}

TEST_CASE("degenerate mu is rejected on the green path only") {
  CHECK_THROWS_AS(bh::GreenTable::make(0.0, 1.0), std::invalid_argument);
  const GridField f = sampled(1.0, 41, [](double x) { return std::sin(2 * kPi * x); });
  CHECK_NOTHROW(bh::solve_bvp_direct(bh::BvpProblem{0.0, 1.0, f}));
}

TEST_CASE("direct solve: zero rhs gives zero") {
  const GridField f = sampled(1.0, 41, [](double) { return 0.0; });
  const GridField phi = bh::solve_bvp_direct(bh::BvpProblem{7.0, 1.0, f});
  CHECK(phi.values.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("direct solve: sin(2 pi x) eigenfunction at mu = 0") {
  const int n = 201;
  const GridField f = sampled(1.0, n, [](double x) { return std::sin(2 * kPi * x); });
  const GridField phi = bh::solve_bvp_direct(bh::BvpProblem{0.0, 1.0, f});
  const double denom = std::pow(2 * kPi, 4.0);
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    err = std::max(err, std::abs(phi.values(i) - std::sin(2 * kPi * phi.coord(i)) / denom));
  CHECK(err < 1e-3 / denom * 10);  // O(h^2) of the unit-amplitude mode, scaled
}

TEST_CASE("green and direct solutions agree at second order") {
  std::mt19937_64 rng(20120924);
  const auto f = three_sines(1.0, rng);
  std::vector<double> gaps;
  for (int n : {51, 101, 201, 401}) {
    const GridField fg = sampled(1.0, n, f);
    bh::BvpProblem p{5.0, 1.0, fg};
    const GridField a = bh::solve_bvp_direct(p);
    const GridField b = bh::solve_bvp_green(p);
    gaps.push_back((a.values - b.values).cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    const double order = std::log2(gaps[i] / gaps[i + 1]);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
  }
}

TEST_CASE("residual: discrete operator applied to solution reproduces f") {
  std::mt19937_64 rng(123);
  const auto f = three_sines(1.0, rng);
  double prev = 0.0;
  for (int n : {101, 201}) {
    const GridField fg = sampled(1.0, n, f);
    bh::BvpProblem p{5.0, 1.0, fg};
    const GridField phi = bh::solve_bvp_direct(p);
    const double h = fg.spacing, h4 = h * h * h * h;
    double err = 0.0;
    for (int i = 2; i < n - 2; ++i) {
      const double d4 = (phi.values(i - 2) - 4 * phi.values(i - 1) + 6 * phi.values(i) -
                         4 * phi.values(i + 1) + phi.values(i + 2)) / h4;
      err = std::max(err, std::abs(d4 + p.mu * phi.values(i) - fg.values(i)));
    }
    CHECK(err < 1e-8);  // solver enforces the discrete equation exactly
    prev = err;
    (void)prev;
  }
}

TEST_CASE("monotone damping: ||phi||_2 decreases in mu") {
  std::mt19937_64 rng(7);
  const auto f = three_sines(1.0, rng);
  const GridField fg = sampled(1.0, 201, f);
  double prev = -1.0;
  for (double mu : {0.0, 1.0, 10.0, 100.0}) {
    const GridField phi = bh::solve_bvp_direct(bh::BvpProblem{mu, 1.0, fg});
    const double norm = phi.values.norm();
    if (prev >= 0.0) CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("apriori ratio: eigenfunction value and scaling invariance") {
  const int n = 401;
  const GridField f = sampled(1.0, n, [](double x) { return std::sin(kPi * x); });
  bh::BvpProblem p{0.0, 1.0, f};
  const double r = bh::apriori_ratio(p, bh::NormP::two);
  CHECK(r == doctest::Approx(1.0 / std::pow(kPi, 4.0) + 1.0).epsilon(1e-3));

  bh::BvpProblem p2 = p;
  p2.rhs.values *= 2.0;
  CHECK(std::abs(bh::apriori_ratio(p2, bh::NormP::two) - r) < 1e-10);
}

TEST_CASE("apriori ratio bounded over random sweeps") {
  std::mt19937_64 rng(20120924);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = three_sines(1.0, rng);
    const GridField fg = sampled(1.0, 201, f);
    if (fg.values.cwiseAbs().maxCoeff() < 1e-3) continue;
    for (double mu : {1.0, 10.0, 100.0}) {
      const double r = bh::apriori_ratio(bh::BvpProblem{mu, 1.0, fg}, bh::NormP::two);
      CHECK(r < 2.0);
    }
  }
}

TEST_CASE("apriori ratio rejects zero rhs") {
  const GridField f = sampled(1.0, 41, [](double) { return 0.0; });
  CHECK_THROWS_AS(bh::apriori_ratio(bh::BvpProblem{1.0, 1.0, f}, bh::NormP::two),
                  std::invalid_argument);
}

TEST_CASE("kernel stays finite and consistent at large mu* L") {
  // mu* L = 60
  const double a = 60.0;
  const double mu = std::pow(a * std::sqrt(2.0), 4.0);
  const auto t = bh::GreenTable::make(mu, 1.0);
  CHECK(t.mu_star == doctest::Approx(60.0));
  for (double x : {0.0, 0.25, 0.5, 0.99})
    for (double xi : {0.1, 0.5, 0.9}) CHECK(std::isfinite(bh::green_kernel(t, x, xi)));
  CHECK(std::abs(bh::green_kernel(t, 0.0, 0.4)) < 1e-30);

  const int n = 801;
  const GridField f = sampled(1.0, n, [](double x) { return std::sin(kPi * x); });
  bh::BvpProblem p{mu, 1.0, f};
  const GridField d = bh::solve_bvp_direct(p);
  const GridField g = bh::solve_bvp_green(p);
  const double scale = d.values.cwiseAbs().maxCoeff();
  CHECK((d.values - g.values).cwiseAbs().maxCoeff() < 1e-2 * scale);
}

}  // TEST_SUITE
