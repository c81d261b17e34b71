#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

#include "gasp/hitting.hpp"
#include "gasp/kernel.hpp"

using namespace gasp;

namespace {

constexpr double kPi = std::numbers::pi;

double cauchy(double x, double L) { return L / (kPi * (x * x + L * L)); }

double phi_oracle(double nu, double r) {
  if (r == 0.0) return 1.0;
  return std::pow(2.0, 1 - nu) * std::pow(r, nu) * boost::math::cyl_bessel_k(nu, r) / boost::math::tgamma(nu);
}

}  // namespace

TEST_CASE("level pair validation") {
  CHECK_THROWS_AS(LevelPair(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(LevelPair(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(LevelPair(1.0, 2.0), DomainError);
  CHECK(LevelPair(3.0, 1.0).gap() == 2.0);
}

TEST_CASE("hitting_ft is the quotient of transforms") {
  const LevelPair lv(2.0, 0.5);
  for (double a : {0.0, 2.0, 3.7}) {
    const ModelParams p(a, 1);
    const double nu = p.nu();
    double prev = 1.0;
    for (double s : {0.0, 0.1, 1.0, 3.0, 10.0}) {
      const double g = hitting_ft(p, lv, s);
      CHECK(g == doctest::Approx(phi_oracle(nu, 2.0 * s) / phi_oracle(nu, 0.5 * s)).scale(0).epsilon(1e-10));
      CHECK(g <= prev);
      CHECK(g > 0.0);
      prev = g;
    }
  }
  // nu = 3/2: phi(r) = (1 + r) e^{-r}.
  const ModelParams p2(2, 1);
  CHECK(hitting_ft(p2, LevelPair(2, 1), 1.0) == doctest::Approx(1.5 / std::exp(1.0)).scale(0).epsilon(1e-13));
  // Deep in the tail, where both transforms underflow separately.
  CHECK(hitting_ft(p2, LevelPair(2, 1), 300.0) == doctest::Approx(601.0 / 301.0 * std::exp(-300.0)).scale(0).epsilon(1e-12));
}

TEST_CASE("alpha = 0 hitting density is the Poisson kernel of the gap") {
  const LevelPair lv(2.0, 1.0);
  for (double x : {0.0, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(hitting_kernel(ModelParams(0, 1), lv, x) == doctest::Approx(cauchy(x, 1.0)).scale(0).epsilon(1e-8));
    CHECK(hitting_kernel(ModelParams(0, 2), lv, x) ==
          doctest::Approx(poisson_kernel_raw(ModelParams(0, 2), x * x, 1.0)).scale(0).epsilon(1e-8));
  }
}

TEST_CASE("profile agrees with adaptive inversion") {
  const ModelParams p(3, 1);
  const LevelPair lv(2, 1);
  const HittingProfile prof(p, lv, 20.0);
  CHECK(prof.node_count() > 100);
  for (double r : {0.0, 0.4, 2.0, 7.5, 20.0})
    CHECK(prof.density(r) == doctest::Approx(hitting_kernel(p, lv, r)).scale(0).epsilon(1e-8));
  CHECK_THROWS(prof.density(21.0));
  CHECK(prof.cdf_1d(0.0) == doctest::Approx(0.5).scale(0).epsilon(1e-14));
  boost::math::quadrature::gauss_kronrod<double, 31> gk;
  for (double x : {0.5, 3.0, 12.0}) {
    const double ref = 0.5 + gk.integrate([&](double t) { return prof.density(t); }, 0.0, x, 15, 1e-14);
    CHECK(prof.cdf_1d(x) == doctest::Approx(ref).scale(0).epsilon(1e-10));
    CHECK(prof.cdf_1d(-x) == doctest::Approx(1.0 - ref).scale(0).epsilon(1e-10));
  }
}

TEST_CASE("profile in two dimensions") {
  const ModelParams p(1.5, 2);
  const LevelPair lv(2, 0.5);
  const HittingProfile prof(p, lv, 10.0);
  for (double r : {0.0, 1.0, 4.0}) CHECK(prof.density(r) == doctest::Approx(hitting_kernel(p, lv, r)).scale(0).epsilon(1e-7));
  CHECK_THROWS(prof.cdf_1d(0.0));
}

TEST_CASE("tabulated CDF") {
  const LevelPair lv(2, 1);
  const HittingCdf c0(ModelParams(0, 1), lv);
  CHECK(c0.tail() <= 1e-3);
  for (double x : {-50.0, -2.0, 0.0, 0.3, 4.0, 100.0})
    CHECK(c0(x) == doctest::Approx(0.5 + std::atan(x) / kPi).scale(0).epsilon(1e-6));
  CHECK(c0(1e9) <= 1.0);
  CHECK(c0(-1e9) >= 0.0);
  const HittingCdf c3(ModelParams(3, 1), lv);
  const HittingProfile prof(ModelParams(3, 1), lv, 10.0);
  for (double x : {-3.0, 1.0, 6.0}) CHECK(std::abs(c3(x) - prof.cdf_1d(x)) < 1e-6);
  double prev = 0.0;
  for (double x = -30; x < 30; x += 0.37) {
    CHECK(c3(x) >= prev);
    prev = c3(x);
  }
}

TEST_CASE("radial table interpolation") {
  std::vector<double> v;
  for (int j = 0; j <= 400; ++j) v.push_back(std::exp(-std::pow(j * 0.01, 2)));
  const RadialTable t(0.01, v);
  for (double r : {0.0, 0.003, 0.5555, -1.2345, 3.99}) CHECK(t(r) == doctest::Approx(std::exp(-r * r)).scale(0).epsilon(1e-8));
  CHECK_THROWS(RadialTable(0.1, {1.0, 2.0}));
}

TEST_CASE("mass and reconstruction") {
  const ModelParams p(3, 1);
  const LevelPair lv(2, 1);
  const auto m = hitting_mass(p, lv);
  CHECK(m.value == doctest::Approx(1.0).scale(0).epsilon(1e-6));
  for (double x : {0.0, 1.0, 3.0}) {
    const auto r = hitting_reconstruction(p, lv, Eigen::VectorXd::Constant(1, x));
    CHECK(r.value == doctest::Approx(poisson_kernel_raw(p, x * x, 2.0)).scale(0).epsilon(1e-6));
  }
  const ModelParams q(1.5, 2);
  const auto r2 = hitting_reconstruction(q, LevelPair(2, 0.5), Eigen::Vector2d(0.6, 0.8));
  CHECK(r2.value == doctest::Approx(poisson_kernel_raw(q, 1.0, 2.0)).scale(0).epsilon(1e-6));
  CHECK(hitting_mass(q, LevelPair(2, 0.5)).value == doctest::Approx(1.0).scale(0).epsilon(1e-4));
}

TEST_CASE("semigroup") {
  const ModelParams p(3, 1);
  CHECK(fourier_semigroup_deviation(p, 3, 2, 1, {0.0, 0.5, 1.0, 5.0, 20.0}) < 1e-12);
  CHECK_THROWS(fourier_semigroup_deviation(p, 3, 1, 2, {1.0}));
  CHECK(semigroup_check(p, 3, 2, 1, {0.05, 20.0}, 2) < 1e-3);
}
