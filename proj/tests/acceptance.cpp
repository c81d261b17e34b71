// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset, e.g. `acceptance 3 7`.

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gasp/extension.hpp"
#include "gasp/growth.hpp"
#include "gasp/hbm_sim.hpp"
#include "gasp/hitting.hpp"
#include "gasp/kernel.hpp"
#include "gasp/spectral.hpp"

using namespace gasp;

namespace {

constexpr double kPi = std::numbers::pi;

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      pass = false;
      detail << what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// --- 1 ---------------------------------------------------------------------

Verdict kernel_mass_grid() {
  Verdict v;
  double worst = 0.0;
  for (double a : {-0.5, 0.0, 1.0, 2.5, 3.7})
    for (int n : {1, 2, 3})
      for (double y : {0.1, 1.0, 10.0}) {
        const double err = std::abs(kernel_mass(ModelParams(a, n), y, EvalAccuracy(1e-10, 0.0)).value - 1.0);
        worst = std::max(worst, err);
        v.require(err <= 1e-8, "a=" + fmt(a) + " n=" + std::to_string(n) + " y=" + fmt(y) + " err=" + fmt(err));
      }
  v.detail << (v.pass ? "" : "; ") << "45 cases, max |mass-1| = " << fmt(worst);
  return v;
}

// --- 2 ---------------------------------------------------------------------

Verdict pde_residual_order() {
  Verdict v;
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double alphas[] = {-0.5, 0.0, 1.0, 2.5, 3.7};
  double lo = 10.0, hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const ModelParams p(alphas[i % 5], 1 + i % 3);
    Eigen::VectorXd x(p.n());
    for (int k = 0; k < p.n(); ++k) x(k) = 2.0 * U(gen) - 1.0;
    const HalfSpacePoint pt(x, 0.5 + 1.5 * U(gen));
    const Evaluator u = [&](const HalfSpacePoint& q) { return poisson_kernel(p, q); };
    const double r1 = std::abs(dalpha_residual(u, p, pt, 1e-2));
    const double r2 = std::abs(dalpha_residual(u, p, pt, 5e-3));
    const double r3 = std::abs(dalpha_residual(u, p, pt, 2.5e-3));
    // Fit of log r against log h over the three steps.
    const double order = std::log2(r1 / r3) / 2.0;
    lo = std::min(lo, order);
    hi = std::max(hi, order);
    v.require(order >= 1.8 && order <= 2.2, "point " + std::to_string(i) + " order " + fmt(order));
    v.require(r3 < r2 && r2 < r1, "point " + std::to_string(i) + " residual not decreasing");
  }
  v.detail << (v.pass ? "" : "; ") << "20 points, order in [" << fmt(lo) << ", " << fmt(hi) << "]";
  return v;
}

// --- 3 ---------------------------------------------------------------------

Verdict spectral_agreement() {
  Verdict v;
  double w_int = 0.0, w_dir = 0.0, w_exp = 0.0;
  for (double a : {-0.5, 0.0, 1.0, 2.0, 3.7})
    for (int n : {1, 2})
      for (double y : {0.25, 1.0, 4.0})
        for (double t : {0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 20.0}) {
          const ModelParams p(a, n);
          const double xi = t / y;
          const double closed = ft_closed_form(p, y, xi);
          const double e_int = rel(ft_integral_rep(p, y, xi).value, closed);
          Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
          dir(0) = xi * 0.6;
          if (n == 2) dir(1) = xi * 0.8;
          if (n == 1) dir(0) = xi;
          const auto d = ft_direct(p, y, dir);
          const double e_dir = rel(d.re, closed);
          w_int = std::max(w_int, e_int);
          w_dir = std::max(w_dir, e_dir);
          const std::string tag = "a=" + fmt(a) + " n=" + std::to_string(n) + " y=" + fmt(y) + " t=" + fmt(t);
          v.require(e_int <= 1e-8, tag + " integral rel " + fmt(e_int));
          v.require(e_dir <= 1e-5, tag + " direct rel " + fmt(e_dir));
          v.require(std::abs(d.im) <= 1e-8, tag + " imaginary part " + fmt(d.im));
          if (a == 0.0) {
            const double e0 = std::abs(closed - std::exp(-t));
            w_exp = std::max(w_exp, e0);
            v.require(e0 <= 1e-9, tag + " e^{-t} deviation " + fmt(e0));
          }
        }
  v.detail << (v.pass ? "" : "; ") << "max rel: integral " << fmt(w_int) << ", direct " << fmt(w_dir)
           << "; alpha=0 vs e^{-t}: " << fmt(w_exp);
  return v;
}

// --- 4 ---------------------------------------------------------------------

Verdict transform_ode() {
  Verdict v;
  double lo = 10.0, hi = 0.0;
  for (double a : {-0.5, 0.0, 1.0, 2.5, 3.7})
    for (double t : {0.5, 1.0, 2.0, 4.0, 7.0, 10.0}) {
      const ModelParams p(a, 1);
      const double r1 = std::abs(transform_ode_residual(p, t, 2e-2));
      const double r2 = std::abs(transform_ode_residual(p, t, 1e-2));
      const std::string tag = "a=" + fmt(a) + " t=" + fmt(t);
      if (a == 0.0) {
        // phi = e^{-t} solves the equation and its differences carry only the truncation of e^{-t}''.
        v.require(r2 <= 1e-4 * std::exp(-t), tag + " residual " + fmt(r2));
        continue;
      }
      const double order = std::log2(r1 / r2);
      lo = std::min(lo, order);
      hi = std::max(hi, order);
      v.require(order >= 1.8 && order <= 2.2, tag + " order " + fmt(order));
    }
  v.detail << (v.pass ? "" : "; ") << "order in [" << fmt(lo) << ", " << fmt(hi) << "] over t in [0.5, 10]";
  return v;
}

// --- 5 ---------------------------------------------------------------------

Verdict boundary_convergence_check() {
  Verdict v;
  const std::vector<double> ys{1.0, 0.25, 1.0 / 16, 1.0 / 64};
  for (auto [a, n, per_radius] : {std::tuple{0.0, 1, 512}, std::tuple{2.0, 2, 128}}) {
    const ModelParams p(a, n);
    const BoundaryData d{p, {tent_term(Eigen::VectorXd::Zero(n), 1.0, 1.0, per_radius)}};
    const auto e = boundary_convergence(d, p, ys);
    std::string series;
    for (const auto& r : e) series += (series.empty() ? "" : " ") + fmt(r.error);
    const std::string tag = "(" + fmt(a) + "," + std::to_string(n) + ")";
    for (std::size_t i = 1; i < e.size(); ++i) v.require(e[i].error < e[i - 1].error, tag + " not decreasing: " + series);
    v.require(e.back().error < e.front().error / 10, tag + " e(1/64) >= e(1)/10: " + series);
    if (v.pass) v.detail << (tag == "(0,1)" ? "" : "; ") << tag << " e = " << series;
  }
  return v;
}

// --- 6 ---------------------------------------------------------------------

Verdict derivative_commutation() {
  Verdict v;
  double worst = 0.0;
  struct Case {
    double a;
    int n;
    int per_radius;
  };
  for (const Case c : {Case{1.0, 1, 256}, Case{0.5, 2, 64}}) {
    const ModelParams p(c.a, c.n);
    const BoundaryData d{p, {tent_term(Eigen::VectorXd::Zero(c.n), 1.0, 1.0, c.per_radius)}};
    std::vector<MultiIndex> betas{MultiIndex::zero(c.n), MultiIndex::unit(c.n, 0), MultiIndex::unit(c.n, 0, 2)};
    if (c.n == 2) {
      betas.push_back(MultiIndex::unit(2, 1));
      betas.push_back(MultiIndex(Eigen::Vector2i(1, 1)));
      betas.push_back(MultiIndex::unit(2, 1, 2));
    }
    for (const auto& beta : betas)
      for (double y : {0.5, 1.0}) {
        Eigen::VectorXd x = Eigen::VectorXd::Constant(c.n, 0.3);
        x(0) = 0.4;
        const auto [fd, ext] = derivative_commutation_check(d, p, beta, {x, y}, 1e-3);
        const double diff = std::abs(fd - ext);
        worst = std::max(worst, diff);
        v.require(diff <= 1e-3, "n=" + std::to_string(c.n) + " |beta|=" + std::to_string(beta.order()) +
                                    " diff " + fmt(diff));
      }
  }
  v.detail << (v.pass ? "" : "; ") << "max |difference| = " << fmt(worst);
  return v;
}

// --- 7 ---------------------------------------------------------------------

Verdict hitting_identities() {
  Verdict v;
  const ModelParams p3(3, 1);
  double w_rec = 0.0;
  for (double x : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const auto r = hitting_reconstruction(p3, LevelPair(2, 1), Eigen::VectorXd::Constant(1, x));
    const double e = rel(r.value, poisson_kernel_raw(p3, x * x, 2.0));
    w_rec = std::max(w_rec, e);
    v.require(e <= 1e-4, "reconstruction at x=" + fmt(x) + " rel " + fmt(e));
  }
  const double sg = semigroup_check(p3, 3, 2, 1, SemigroupGrid{}, workers());
  v.require(sg <= 1e-3, "semigroup deviation " + fmt(sg));
  std::vector<double> xis;
  for (int k = 0; k <= 400; ++k) xis.push_back(0.1 * k);
  const double fsg = fourier_semigroup_deviation(p3, 3, 2, 1, xis);
  v.require(fsg <= 1e-12, "Fourier semigroup deviation " + fmt(fsg));
  double w_mass = 0.0;
  for (double a : {0.0, 1.0, 3.0}) {
    const double m = std::abs(hitting_mass(ModelParams(a, 1), LevelPair(2, 1)).value - 1.0);
    w_mass = std::max(w_mass, m);
    v.require(m <= 1e-4, "mass at a=" + fmt(a) + " off by " + fmt(m));
  }
  double w_cauchy = 0.0;
  for (double x : {0.0, 0.3, 1.0, 3.0, 10.0}) {
    const double ref = 1.0 / (kPi * (1.0 + x * x));
    const double e = rel(hitting_kernel(ModelParams(0, 1), LevelPair(2, 1), x), ref);
    w_cauchy = std::max(w_cauchy, e);
    v.require(e <= 1e-6, "Cauchy at x=" + fmt(x) + " rel " + fmt(e));
  }
  v.detail << (v.pass ? "" : "; ") << "reconstruction " << fmt(w_rec) << ", semigroup " << fmt(sg) << ", Fourier "
           << fmt(fsg) << ", mass " << fmt(w_mass) << ", Cauchy " << fmt(w_cauchy);
  return v;
}

// --- 8 ---------------------------------------------------------------------

SimConfig sim(double a, double y0, double y_stop, long paths, std::uint64_t seed) {
  SimConfig c{ModelParams(a, 1), HalfSpacePoint(Eigen::VectorXd::Zero(1), y0)};
  c.y_stop = y_stop;
  c.n_paths = paths;
  c.master_seed = seed;
  c.workers = workers();
  return c;
}

Verdict monte_carlo_laws() {
  Verdict v;
  for (double a : {0.0, 2.0}) {
    const auto r = validate_boundary_law(sim(a, 1.0, 0.0, 100000, 42));
    v.require(r.pass, "boundary a=" + fmt(a) + " KS " + fmt(r.ks) + " > " + fmt(r.threshold));
    v.detail << (v.pass ? "" : "; ") << "boundary a=" << fmt(a) << " KS " << fmt(r.ks) << "/" << fmt(r.threshold) << "; ";
  }
  for (double a : {0.0, 3.0}) {
    const auto r = validate_hitting_law(sim(a, 2.0, 1.0, 100000, 43));
    v.require(r.pass, "hitting a=" + fmt(a) + " KS " + fmt(r.ks) + " > " + fmt(r.threshold));
    v.detail << "hitting a=" << fmt(a) << " KS " << fmt(r.ks) << "/" << fmt(r.threshold) << "; ";
  }
  // Second moment of K_{3,1} by quadrature: 2 int_0^inf x^2 K(x) dx.
  const ModelParams p3(3, 1);
  boost::math::quadrature::exp_sinh<double> es;
  const double m2 = 2.0 * es.integrate([&](double x) { return x * x * poisson_kernel_raw(p3, x * x, 1.0); });
  v.require(std::abs(m2 - 0.5) <= 1e-10, "quadrature second moment " + fmt(m2));
  const auto samples = simulate_paths(sim(3.0, 1.0, 0.0, 200000, 44));
  const auto mom = sample_moments(samples.coordinate_column(0));
  const double z = (mom.variance - 0.5) / mom.variance_stderr;
  v.require(std::abs(z) <= 4.0, "Var " + fmt(mom.variance) + " is " + fmt(z) + " stderr from 0.5");
  v.detail << "Var(X) at a=3: " << fmt(mom.variance) << " +- " << fmt(mom.variance_stderr) << " (quadrature " << fmt(m2)
           << ")";
  return v;
}

// --- 9 ---------------------------------------------------------------------

Verdict growth_order() {
  Verdict v;
  std::vector<double> radii;
  for (int k = 0; k <= 8; ++k) radii.push_back(4.0 * std::pow(10.0, k / 4.0));
  double worst = 0.0;
  for (auto [a, n, per_radius] : {std::tuple{0.0, 1, 64}, std::tuple{2.0, 2, 16}}) {
    const ModelParams p(a, n);
    auto t = tent_term(Eigen::VectorXd::Zero(n), 1.0, 1.0, per_radius);
    double mass = 0.0;
    for (Eigen::Index j = 0; j < t.values.size(); ++j) mass += t.grid.trapezoid_weight(j) * t.values(j);
    t.values /= mass;
    const BoundaryData d{p, {t}};
    const auto scan = l1_data_scan(d, p, radii, 64, workers());
    const auto verdict = assess_decay(scan, support_radius(d));
    v.require(verdict.pass, "(" + fmt(a) + "," + std::to_string(n) + ") decade ratio " + fmt(verdict.decade_ratio));
    for (std::size_t i = 0; i + 4 < scan.records.size(); ++i) {
      const double f = scan.records[i].M / scan.records[i + 4].M;
      worst = std::max(worst, 1.0 / f);
      v.require(f >= 5.0, "decay factor " + fmt(f) + " from r=" + fmt(scan.records[i].r));
    }
    const Evaluator null_sol = [a](const HalfSpacePoint& q) { return std::pow(q.y, a + 1.0); };
    const auto ns = sphere_sup_scan(null_sol, p, 0, radii, 64, workers());
    for (const auto& r : ns.records) v.require(std::abs(r.M - 1.0) <= 1e-10, "null solution M " + fmt(r.M));
  }
  v.detail << (v.pass ? "" : "; ") << "largest decade ratio " << fmt(worst) << " (<= 0.2 required); null solution M = 1";
  return v;
}

// --- 10 --------------------------------------------------------------------

Verdict counterexample() {
  Verdict v;
  const ModelParams p(0, 1);
  const double tu = unit_tent_response(p);
  const auto rec = counterexample_track(p, SharpnessCase::subcritical(0, 0), 10);
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& r : rec) {
    if (r.k < 4) continue;
    lowest = std::min(lowest, r.ratio);
    v.require(std::isfinite(r.log_ratio) && r.ratio >= 0.5 * tu, "k=" + std::to_string(r.k) + " ratio " + fmt(r.ratio));
  }
  v.detail << (v.pass ? "" : "; ") << "u~(0,1) = " << fmt(tu) << ", min ratio over k=4..10 = " << fmt(lowest);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"kernel mass", kernel_mass_grid},
      {"PDE residual order", pde_residual_order},
      {"spectral three-way agreement", spectral_agreement},
      {"transform ODE", transform_ode},
      {"boundary convergence", boundary_convergence_check},
      {"derivative commutation", derivative_commutation},
      {"hitting identities", hitting_identities},
      {"Monte Carlo laws", monte_carlo_laws},
      {"growth order", growth_order},
      {"counterexample", counterexample},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s (%s) [%.1fs]\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.str().c_str(), secs);
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
