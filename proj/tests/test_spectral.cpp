#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

#include "gasp/spectral.hpp"

using namespace gasp;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// (t^{a+1} / Gamma(a+1)) int_0^inf e^{-t(1+v)} (v(2+v))^{a/2} dv, independent of the library.
double corollary_oracle(double a, double t) {
  boost::math::quadrature::exp_sinh<double> es;
  const double I = es.integrate([&](double v) { return std::exp(-t * v) * std::pow(v * (2 + v), a / 2); });
  return std::pow(t, a + 1) * std::exp(-t) * I / boost::math::tgamma(a + 1);
}

}  // namespace

TEST_CASE("decay class spot checks") {
  CHECK_NOTHROW(RadialProfile([](double s) { return std::exp(-s); }, DecayClass::exponential(1.0)));
  CHECK_THROWS_AS(RadialProfile([](double s) { return 1.0 / (1 + s); }, DecayClass::exponential(1.0)), ValidationError);
}

TEST_CASE("hankel_transform of e^{-s}") {
  const RadialProfile f([](double s) { return std::exp(-s); }, DecayClass::exponential(1.0));
  const auto r = hankel_transform(f, 2, 1.0);
  CHECK(r.value == doctest::Approx(2 * std::numbers::pi / std::pow(2.0, 1.5)).scale(0).epsilon(1e-10));
  // n = 3: 4 pi / (1 + r^2)^2 * ... via the sine transform int e^{-s} s sin(rs) ds = 2r/(1+r^2)^2.
  for (double rr : {0.5, 2.0}) {
    const double ref = std::pow(2 * std::numbers::pi, 1.5) * std::pow(rr, -0.5) *
                       std::sqrt(2 / (std::numbers::pi * rr)) * 2 * rr / std::pow(1 + rr * rr, 2);
    CHECK(hankel_transform(f, 3, rr).value == doctest::Approx(ref).scale(0).epsilon(1e-9));
  }
}

TEST_CASE("hankel_transform of the kernel profile") {
  const ModelParams p(0, 1);
  const auto prof = kernel_profile(p, 1.0);
  const EvalAccuracy acc(1e-6, 0.0);
  CHECK(hankel_transform(prof, 1, 1.0, acc).value == doctest::Approx(std::exp(-1.0)).scale(0).epsilon(1e-6));
  CHECK(hankel_transform(prof, 1, 1e-3, acc).value == doctest::Approx(1.0).scale(0).epsilon(2e-3));
  const ModelParams q(1.0, 2);
  CHECK(hankel_transform(kernel_profile(q, 1.0), 2, 1.5, acc).value ==
        doctest::Approx(ft_closed_form(q, 1.0, 1.5)).scale(0).epsilon(1e-6));
}

TEST_CASE("ft_closed_form examples") {
  CHECK(ft_closed_form(ModelParams(0, 1), 2.0, 0.5) == doctest::Approx(std::exp(-1.0)).scale(0).epsilon(1e-13));
  for (double a : {-0.5, 0.0, 2.0, 3.7}) CHECK(ft_closed_form(ModelParams(a, 2), 1.3, 0.0) == 1.0);
  CHECK(rel(ft_closed_form(ModelParams(1, 1), 1.0, 1.0), boost::math::cyl_bessel_k(1.0, 1.0)) < 1e-10);
  for (double a : {-0.5, 1.0, 2.5})
    for (double t : {0.1, 1.0, 6.0, 20.0}) {
      const double nu = (a + 1) / 2;
      const double ref = std::pow(2.0, 1 - nu) * std::pow(t, nu) * boost::math::cyl_bessel_k(nu, t) / boost::math::tgamma(nu);
      CHECK(rel(ft_closed_form(ModelParams(a, 1), 1.0, t), ref) < 1e-10);
    }
}

TEST_CASE("ft_integral_rep examples") {
  CHECK(ft_integral_rep(ModelParams(0, 1), 1.0, 1.0).value == doctest::Approx(std::exp(-1.0)).scale(0).epsilon(1e-10));
  CHECK(rel(ft_integral_rep(ModelParams(2, 1), 1.0, 1.0).value, corollary_oracle(2.0, 1.0)) < 1e-9);
  CHECK(rel(corollary_oracle(2.0, 1.0), ft_closed_form(ModelParams(2, 1), 1.0, 1.0)) < 1e-9);
  for (double a : {-0.5, 1.0, 3.7}) {
    const ModelParams p(a, 1);
    CHECK(rel(ft_integral_rep(p, 2.0, 15.0).value, ft_closed_form(p, 2.0, 15.0)) < 1e-8);
  }
}

TEST_CASE("ft_direct examples") {
  const ModelParams p0(0, 1);
  const auto at0 = ft_direct(p0, 1.0, Eigen::VectorXd::Zero(1));
  CHECK(at0.re == doctest::Approx(1.0).scale(0).epsilon(1e-6));
  const auto e2 = ft_direct(p0, 1.0, Eigen::VectorXd::Constant(1, 2.0));
  CHECK(rel(e2.re, std::exp(-2.0)) < 1e-5);
  CHECK(std::abs(e2.im) < 1e-8);
  const ModelParams p3(3, 1);
  CHECK(rel(ft_direct(p3, 1.0, Eigen::VectorXd::Constant(1, 1.0)).re, ft_closed_form(p3, 1.0, 1.0)) < 1e-5);
  const ModelParams q(1.0, 2);
  const auto d = ft_direct(q, 0.5, Eigen::Vector2d(0.6, -0.8));
  CHECK(rel(d.re, ft_closed_form(q, 0.5, 1.0)) < 1e-5);
  CHECK(std::abs(d.im) < 1e-8);
  CHECK_THROWS(ft_direct(ModelParams(0, 3), 1.0, Eigen::VectorXd::Zero(3)));
}

TEST_CASE("transform ODE residual shrinks as h^2") {
  for (double a : {0.0, 1.0, 2.5}) {
    const ModelParams p(a, 1);
    for (double t : {0.5, 2.0, 8.0}) {
      const double r1 = std::abs(transform_ode_residual(p, t, 1e-2));
      const double r2 = std::abs(transform_ode_residual(p, t, 5e-3));
      CHECK(r1 < 1e-3);
      if (r1 > 1e-11) CHECK(r2 < 0.3 * r1);
    }
  }
}
