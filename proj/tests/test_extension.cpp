#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "gasp/extension.hpp"

using namespace gasp;

namespace {

BoundaryData tent_data(const ModelParams& p, int per_radius, double radius = 1.0) {
  return {p, {tent_term(Eigen::VectorXd::Zero(p.n()), radius, 1.0, per_radius)}};
}

HalfSpacePoint pt1(double x, double y) { return {Eigen::VectorXd::Constant(1, x), y}; }

// Classical Poisson integral of max(0, 1 - |eta|) from antiderivatives of the
// kernel and of eta times the kernel.
double cauchy_tent(double x, double y) {
  const double pi = std::numbers::pi;
  auto A = [&](double e) { return -std::atan((x - e) / y) / pi; };
  auto B = [&](double e) { return -x * std::atan((x - e) / y) / pi + y * std::log((x - e) * (x - e) + y * y) / (2 * pi); };
  return (A(1) - B(1)) - (A(0) - B(0)) + (A(0) + B(0)) - (A(-1) + B(-1));
}

}  // namespace

TEST_CASE("empty data extends to zero") {
  const ModelParams p(0.5, 2);
  CHECK(extend_point(BoundaryData{p, {}}, p, {Eigen::Vector2d(0.1, 0.2), 0.3}) == 0.0);
}

TEST_CASE("tent extension matches the classical closed form") {
  const ModelParams p(0, 1);
  const auto d = tent_data(p, 512);
  for (double x : {-1.5, 0.0, 0.3, 2.0}) {
    const double u = extend_point(d, p, pt1(x, 1.0));
    CHECK(u == doctest::Approx(cauchy_tent(x, 1.0)).scale(0).epsilon(1e-6));
  }
  GridSpec out{Eigen::VectorXd::Constant(1, -2.0), 1.0 / 512, Eigen::VectorXi::Constant(1, 2049)};
  const auto r = extend_grid(d, p, 1.0, out);
  CHECK(r.used_fast_path);
  CHECK_FALSE(r.incommensurate_fallback);
  for (Eigen::Index j = 0; j < out.size(); j += 128)
    CHECK(r.values(j) == doctest::Approx(cauchy_tent(out.point(j)(0), 1.0)).scale(0).epsilon(1e-6));
}

TEST_CASE("large-y asymptotics: u(0, y) / (mass * K(0, y)) -> 1") {
  const ModelParams p(1.0, 1);
  const auto d = tent_data(p, 64);
  const double u = extend_point(d, p, pt1(0.0, 50.0));
  CHECK(u / poisson_kernel_raw(p, 0.0, 50.0) == doctest::Approx(1.0).scale(0).epsilon(1e-3));
}

TEST_CASE("grid evaluation agrees with pointwise evaluation") {
  const ModelParams p(0.7, 2);
  const auto d = tent_data(p, 16);
  GridSpec out{Eigen::Vector2d(-1.5, -1.5), 1.0 / 16, Eigen::Vector2i(49, 49)};
  const auto fast = extend_grid(d, p, 0.5, out, 3, true);
  const auto direct = extend_grid(d, p, 0.5, out, 1, false);
  CHECK(fast.used_fast_path);
  CHECK_FALSE(direct.used_fast_path);
  CHECK((fast.values - direct.values).cwiseAbs().maxCoeff() < 1e-10);
  for (Eigen::Index j : {0L, 600L, 1200L, 2400L})
    CHECK(std::abs(direct.values(j) - extend_point(d, p, {out.point(j), 0.5})) < 1e-10);
  GridSpec one{Eigen::Vector2d(0.25, -0.125), 1.0, Eigen::Vector2i(1, 1)};
  CHECK(extend_grid(d, p, 0.5, one).values(0) == doctest::Approx(extend_point(d, p, {one.point(0), 0.5})).scale(0).epsilon(1e-12));
}

TEST_CASE("worker count does not change grid results") {
  const ModelParams p(1.5, 1);
  const auto d = tent_data(p, 32);
  GridSpec out{Eigen::VectorXd::Constant(1, -3.0), 0.1, Eigen::VectorXi::Constant(1, 61)};
  const auto a = extend_grid(d, p, 0.4, out, 1);
  const auto b = extend_grid(d, p, 0.4, out, 4);
  CHECK(a.values == b.values);
  CHECK(a.incommensurate_fallback);
}

TEST_CASE("linearity, positivity, maximum principle, mass transport") {
  const ModelParams p(0.0, 1);
  const auto f = tent_data(p, 64);
  BoundaryData g{p, {tent_term(Eigen::VectorXd::Constant(1, 0.5), 0.5, 2.0, 32)}};
  BoundaryData fg{p, {f.terms[0], g.terms[0]}};
  for (double x : {-0.7, 0.1, 0.9}) {
    const auto q = pt1(x, 0.3);
    CHECK(std::abs(extend_point(fg, p, q) - extend_point(f, p, q) - extend_point(g, p, q)) < 1e-12);
  }
  const double y = 0.2;
  GridSpec out{Eigen::VectorXd::Constant(1, -400.0), 1.0 / 64, Eigen::VectorXi::Constant(1, 800 * 64 + 1)};
  const auto r = extend_grid(f, p, y, out);
  CHECK(r.values.minCoeff() >= 0.0);
  CHECK(r.values.maxCoeff() <= 1.0);
  double mass = 0.0;
  for (Eigen::Index j = 0; j < out.size(); ++j) mass += out.trapezoid_weight(j) * r.values(j);
  // Mass outside |x| <= 400 is about 2 y / (pi 400).
  CHECK(mass == doctest::Approx(1.0).scale(0).epsilon(5e-4));
}

TEST_CASE("extension solves the weighted equation") {
  const ModelParams p(1.0, 2);
  const auto d = tent_data(p, 16);
  const Evaluator u = [&](const HalfSpacePoint& q) { return extend_point(d, p, q); };
  const HalfSpacePoint q(Eigen::Vector2d(0.3, 0.2), 0.7);
  const double r1 = std::abs(dalpha_residual(u, p, q, 2e-2));
  const double r2 = std::abs(dalpha_residual(u, p, q, 1e-2));
  CHECK(r2 < 0.35 * r1);
}

TEST_CASE("bump lower bound") {
  const ModelParams p(0, 1);
  const auto sd = sharpness_data(p, SharpnessCase::subcritical(0, 0), 2);
  const BoundaryData single{p, {sd.data.terms[1]}};
  boost::math::quadrature::gauss_kronrod<double, 61> gk;
  const double tilde_u = 2 * gk.integrate([&](double t) { return poisson_kernel_raw(p, t * t, 1.0) * (1 - t); }, 0.0, 1.0);
  CHECK(extend_point(single, p, sd.points[1]) >= std::exp(sd.bumps[1].log_height) * tilde_u * (1 - 1e-3));
}

TEST_CASE("boundary convergence") {
  const std::vector<double> ys{1.0, 0.25, 1.0 / 16, 1.0 / 64};
  const ModelParams p(0, 1);
  const auto e = boundary_convergence(tent_data(p, 256), p, ys);
  REQUIRE(e.size() == 4);
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i].error < e[i - 1].error);
  CHECK(e.back().error < e.front().error / 10);
  const auto z = boundary_convergence(BoundaryData{p, {}}, p, ys);
  for (const auto& r : z) CHECK(r.error == 0.0);
  BoundaryData deriv = tent_data(p, 16);
  deriv.terms[0].beta = MultiIndex::unit(1, 0);
  CHECK_THROWS_AS(boundary_convergence(deriv, p, ys), ValidationError);
}

TEST_CASE("derivative commutation") {
  const ModelParams p(1.0, 1);
  const auto d = tent_data(p, 256);
  const auto q = pt1(0.4, 0.5);
  const auto z = derivative_commutation_check(d, p, MultiIndex::zero(1), q, 1e-3);
  CHECK(z.first == z.second);
  const auto b1 = derivative_commutation_check(d, p, MultiIndex::unit(1, 0), q, 1e-3);
  CHECK(std::abs(b1.first - b1.second) < 1e-4);
  const auto b2 = derivative_commutation_check(d, p, MultiIndex::unit(1, 0, 2), q, 1e-3);
  CHECK(std::abs(b2.first - b2.second) < 1e-3);
  CHECK_THROWS_AS(derivative_commutation_check(d, p, MultiIndex::unit(1, 0, 3), q, 1e-3), ValidationError);
}
