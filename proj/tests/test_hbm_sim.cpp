#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gasp/hbm_sim.hpp"
#include "gasp/kernel.hpp"

using namespace gasp;

namespace {

SimConfig config(double alpha, double y0, double y_stop, long paths, std::uint64_t seed) {
  SimConfig c{ModelParams(alpha, 1), HalfSpacePoint(Eigen::VectorXd::Zero(1), y0)};
  c.y_stop = y_stop;
  c.n_paths = paths;
  c.master_seed = seed;
  return c;
}

}  // namespace

TEST_CASE("philox4x32-10 known answers") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) == A{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("ks_statistic examples") {
  const auto std_cdf = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
  CHECK(ks_statistic({0.0}, std_cdf) == doctest::Approx(0.5));
  CHECK(ks_statistic({-40.0, -39.0, -38.0}, std_cdf) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ks_statistic({1.0, 0.0}, std_cdf), ValidationError);
  CHECK_THROWS_AS(ks_statistic({}, std_cdf), ValidationError);

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  boost::math::normal_distribution<double> N01;
  const int n = 20000;
  std::vector<double> s(n);
  for (double& v : s) v = boost::math::quantile(N01, U(gen));
  std::sort(s.begin(), s.end());
  CHECK(ks_statistic(s, std_cdf) < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("configuration validation") {
  auto c = config(0, 1, 0, 10, 1);
  c.dt = 0.1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = config(0, 1, 2, 10, 1);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = config(0, 1, 0, 10, 1);
  c.y_floor = 0.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = config(0, 1, 0, 0, 1);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(config(0, 2, 0, 10, 1).stop_level() == doctest::Approx(2e-4));
}

TEST_CASE("results do not depend on the worker count") {
  auto c = config(1.0, 1.0, 0.3, 500, 99);
  const auto a = simulate_paths(c);
  c.workers = 5;
  const auto b = simulate_paths(c);
  CHECK(a.positions == b.positions);
  CHECK(a.stop_times == b.stop_times);
  c.master_seed = 100;
  CHECK(simulate_paths(c).positions != a.positions);
}

TEST_CASE("level mode stops on the level; X is a martingale") {
  auto c = config(0.5, 2.0, 1.0, 20000, 3);
  c.workers = 4;
  const auto s = simulate_paths(c);
  for (long i = 0; i < s.size(); ++i) {
    CHECK(s.stop_y[i] == doctest::Approx(1.0).scale(0).epsilon(1e-12));
    CHECK(s.stop_times[i] > 0.0);
  }
  const auto m = sample_moments(s.coordinate_column(0));
  CHECK(std::abs(m.mean) < 4 * m.mean_stderr);
}

TEST_CASE("log Y is exact at fixed time") {
  auto c = config(2.0, 1.5, 0.0, 20000, 11);
  c.dt = 1e-2;
  c.workers = 4;
  const double T = 2.0;
  auto v = simulate_log_y(c, T);
  std::sort(v.begin(), v.end());
  boost::math::normal_distribution<double> law(std::log(1.5) - c.p.mu() * T, std::sqrt(T));
  CHECK(ks_statistic(v, [&](double x) { return boost::math::cdf(law, x); }) <= 1.95 / std::sqrt(double(v.size())));
}

TEST_CASE("sample moments") {
  const auto m = sample_moments({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.variance == doctest::Approx(5.0 / 3.0));
  CHECK_THROWS_AS(sample_moments({1.0}), ValidationError);
}

TEST_CASE("law validation smoke runs") {
  auto c = config(0.0, 1.0, 0.0, 100, 5);
  const auto r = validate_boundary_law(c);
  CHECK(r.pass);
  CHECK(r.threshold >= ks_threshold(100));
  CHECK(r.floor_allowance >= 0.0);
  CHECK(r.floor_allowance < 1e-3);
  CHECK_THROWS_AS(validate_hitting_law(c), ValidationError);
}

TEST_CASE("hitting law at alpha = 0 is Cauchy") {
  auto c = config(0.0, 2.0, 1.0, 5000, 21);
  c.workers = 4;
  const auto r = validate_hitting_law(c);
  CHECK(r.pass);
  auto x = simulate_paths(c).coordinate_column(0);
  std::sort(x.begin(), x.end());
  boost::math::cauchy_distribution<double> cauchy(0.0, 1.0);
  CHECK(ks_statistic(x, [&](double t) { return boost::math::cdf(cauchy, t); }) <= ks_threshold(5000));
}
