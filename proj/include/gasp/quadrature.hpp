#pragma once

// One-dimensional quadrature building blocks: adaptive Gauss-Kronrod,
// double-exponential rules for endpoint singularities and half lines,
// Gauss-Legendre and generalized Gauss-Laguerre node sets, and the Wynn
// epsilon accelerator used for oscillatory tails.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "gasp/errors.hpp"

namespace gasp::quad {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

inline QuadResult& operator+=(QuadResult& a, const QuadResult& b) {
  a.value += b.value;
  a.error += b.error;
  a.evaluations += b.evaluations;
  a.converged = a.converged && b.converged;
  return a;
}

/// Throws NonConvergenceError if `r` did not converge.
inline const QuadResult& require(const QuadResult& r, const char* what) {
  if (!r.converged) throw NonConvergenceError(what, r.value, r.error);
  return r;
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

/// Single G7-K15 panel on [a, b] with the QUADPACK error heuristic.
template <class F>
QuadResult gauss_kronrod15(F&& f, double a, double b) {
  using namespace detail;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  QuadResult r;
  r.value = resk * half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps))
    err = std::max(50 * eps * resabs, err);
  r.error = err;
  r.evaluations = 15;
  return r;
}

/// Globally adaptive Gauss-Kronrod on [a, b]. The interval with the largest
/// error is bisected until error <= max(abs_tol, rel_tol*|value|).
template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                     int max_intervals = 2000) {
  struct Piece {
    double a, b;
    QuadResult r;
    bool operator<(const Piece& o) const { return r.error < o.r.error; }
  };
  if (a == b) return {};
  std::priority_queue<Piece> heap;
  QuadResult total = gauss_kronrod15(f, a, b);
  heap.push({a, b, total});
  int intervals = 1;
  while (total.error > std::max(abs_tol, rel_tol * std::abs(total.value))) {
    if (intervals >= max_intervals) {
      total.converged = false;
      break;
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
      // Interval exhausted at machine resolution.
      total.converged = false;
      heap.push(worst);
      break;
    }
    QuadResult left = gauss_kronrod15(f, worst.a, mid);
    QuadResult right = gauss_kronrod15(f, mid, worst.b);
    total.value += left.value + right.value - worst.r.value;
    total.error += left.error + right.error - worst.r.error;
    total.evaluations += 30;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
    ++intervals;
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().r.value;
    e += heap.top().r.error;
    heap.pop();
  }
  total.value = v;
  total.error = e;
  return total;
}

/// Tanh-sinh rule on [a, b]. `f(x, da, db)` receives the node together with its
/// distances to a and b, computed without cancellation, so integrands with
/// endpoint singularities can be evaluated accurately.
template <class F>
QuadResult tanh_sinh(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                     int max_level = 9) {
  constexpr double kHalfPi = std::numbers::pi / 2;
  constexpr double kTmax = 6.5;
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  QuadResult out;

  auto node_sum = [&](double t) {
    // returns weight*f at +t and -t (or just t==0)
    const double q = kHalfPi * std::sinh(t);
    const double ch = std::cosh(q);
    const double w = hw * kHalfPi * std::cosh(t) / (ch * ch);
    // distance of the node to the nearer endpoint
    const double e2q = std::exp(-2.0 * std::abs(q));
    const double near = hw * 2.0 * e2q / (1.0 + e2q);
    const double far = 2.0 * hw - near;
    if (w == 0.0 || near == 0.0) return 0.0;
    ++out.evaluations;
    if (t == 0.0) return w * f(c, hw, hw);
    out.evaluations += 1;
    const double xr = b - near, xl = a + near;
    return w * (f(xr, far, near) + f(xl, near, far));
  };

  double h = 1.0;
  double sum = node_sum(0.0);
  for (int k = 1; k * h <= kTmax; ++k) sum += node_sum(k * h);
  double estimate = sum * h;
  double previous = estimate;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (int k = 1; k * h <= kTmax; k += 2) add += node_sum(k * h);
    sum += add;
    previous = estimate;
    estimate = sum * h;
    // Consecutive levels can agree bitwise; rounding still bounds the accuracy.
    const double diff = std::max(std::abs(estimate - previous), 4.0 * kEps * std::abs(estimate));
    if (level >= 3 && diff <= std::max(abs_tol, rel_tol * std::abs(estimate))) {
      out.value = estimate;
      out.error = diff;
      return out;
    }
  }
  out.value = estimate;
  out.error = std::max(std::abs(estimate - previous), 4.0 * kEps * std::abs(estimate));
  out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(estimate));
  return out;
}

/// Convenience overload for integrands that only need the abscissa.
template <class F>
QuadResult tanh_sinh_simple(F&& f, double a, double b, double rel_tol,
                            double abs_tol = 0.0) {
  return tanh_sinh([&](double x, double, double) { return f(x); }, a, b, rel_tol,
                   abs_tol);
}

/// Exp-sinh rule for integrals over [0, inf): u = exp(pi/2 sinh t).
/// The integrand must return a finite value (zero is fine) for every u,
/// including very large and very small ones.
template <class F>
QuadResult exp_sinh(F&& f, double rel_tol, double abs_tol = 0.0, int max_level = 8) {
  constexpr double kHalfPi = std::numbers::pi / 2;
  constexpr double kTmin = -6.7, kTmax = 6.7;
  QuadResult out;
  auto term = [&](double t) {
    const double lu = kHalfPi * std::sinh(t);
    if (lu > 700.0 || lu < -700.0) return 0.0;
    const double u = std::exp(lu);
    ++out.evaluations;
    return f(u) * u * kHalfPi * std::cosh(t);
  };
  double h = 0.5;
  double sum = 0.0;
  for (double t = 0.0; t <= kTmax; t += h) sum += term(t);
  for (double t = -h; t >= kTmin; t -= h) sum += term(t);
  double estimate = sum * h, previous = estimate;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (int k = 1; k * h <= kTmax; k += 2) add += term(k * h) + term(-k * h);
    sum += add;
    previous = estimate;
    estimate = sum * h;
    // Consecutive levels can agree bitwise; rounding still bounds the accuracy.
    const double diff = std::max(std::abs(estimate - previous), 4.0 * kEps * std::abs(estimate));
    if (level >= 3 && diff <= std::max(abs_tol, rel_tol * std::abs(estimate))) {
      out.value = estimate;
      out.error = diff;
      return out;
    }
  }
  out.value = estimate;
  out.error = std::abs(estimate - previous);
  out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(estimate));
  return out;
}

/// Wynn's epsilon algorithm on a stream of partial sums.
class WynnEpsilon {
 public:
  /// Feeds the next partial sum and returns the current extrapolation.
  double push(double partial_sum) {
    std::vector<double> next(diag_.size() + 1);
    next[0] = partial_sum;
    std::size_t k = 0;
    for (; k < diag_.size(); ++k) {
      const double diff = next[k] - diag_[k];
      const double before = k >= 1 ? diag_[k - 1] : 0.0;
      if (diff == 0.0 || !std::isfinite(1.0 / diff)) break;
      next[k + 1] = before + 1.0 / diff;
    }
    next.resize(k + 1);
    diag_ = std::move(next);
    // The highest even column of the newest diagonal is the best estimate.
    const std::size_t top = (diag_.size() - 1) & ~std::size_t{1};
    const double estimate = diag_[top];
    history_.push_back(estimate);
    return estimate;
  }

  /// Distance between the last three estimates, a pessimistic error measure.
  double error() const {
    const auto n = history_.size();
    if (n < 3) return std::numeric_limits<double>::infinity();
    return std::abs(history_[n - 1] - history_[n - 2]) +
           std::abs(history_[n - 2] - history_[n - 3]);
  }

  double estimate() const { return history_.empty() ? 0.0 : history_.back(); }
  std::size_t size() const { return history_.size(); }

 private:
  std::vector<double> diag_;
  std::vector<double> history_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct NodeSet {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline NodeSet gauss_legendre(int m) {
  NodeSet out;
  out.nodes.resize(m);
  out.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    out.nodes[i] = -z;
    out.nodes[m - 1 - i] = z;
    out.weights[i] = out.weights[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return out;
}

/// Generalized Gauss-Laguerre rule for the weight u^a e^{-u} on [0, inf),
/// computed by Golub-Welsch from the Jacobi matrix of the weight.
inline NodeSet gauss_laguerre(int m, double a) {
  Eigen::VectorXd diag(m), sub(std::max(m - 1, 0));
  for (int k = 0; k < m; ++k) diag(k) = 2.0 * k + a + 1.0;
  for (int k = 1; k < m; ++k) sub(k - 1) = std::sqrt(k * (k + a));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  NodeSet out;
  out.nodes.resize(m);
  out.weights.resize(m);
  const double mu0 = std::tgamma(a + 1.0);
  for (int k = 0; k < m; ++k) {
    out.nodes[k] = solver.eigenvalues()(k);
    const double v = solver.eigenvectors()(0, k);
    out.weights[k] = mu0 * v * v;
  }
  return out;
}

}  // namespace gasp::quad
