#include "gasp/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gasp {

namespace {

constexpr double kPi = std::numbers::pi;

// Hankel's large-argument expansion of J_nu; summed until the terms stop
// decreasing or drop below machine precision.
double j_asymptotic(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * 8.0 * z);
    if (next == 0.0) break;
    if (std::abs(next) > last) break;  // asymptotic series starts to diverge
    last = std::abs(next);
    term = next;
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
    if (std::abs(term) < 1e-17) break;
  }
  const double chi = z - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

// J_nu for orders too large for the Hankel expansion at this z: backward
// recurrence from well past the turning point k = z, normalized against the
// expansion at the base orders nu0, nu0 + 1 with nu0 in [-1/2, 1/2).
double j_recurrence(double nu, double z) {
  const double nu0 = nu - std::floor(nu + 0.5);
  const long m = std::lround(nu - nu0);
  const long top = std::max(m, static_cast<long>(std::ceil(z))) + 20 + static_cast<long>(3.0 * std::sqrt(z));
  double next = 0.0, cur = 1e-100;  // a_{top+1}, a_top
  double at_m = m == top ? cur : 0.0, at0 = 0.0, at1 = 0.0;
  for (long k = top; k >= 1; --k) {
    const double prev = 2.0 * (nu0 + k) / z * cur - next;  // a_{k-1}
    next = cur;
    cur = prev;
    if (k - 1 == m) at_m = cur;
    if (k - 1 == 1) at1 = cur;
    if (std::abs(cur) > 1e100) {
      next *= 1e-100;
      cur *= 1e-100;
      at_m *= 1e-100;
      at1 *= 1e-100;
    }
  }
  at0 = cur;
  if (m == 0) at_m = at0;
  const double j0 = j_asymptotic(nu0, z), j1 = j_asymptotic(nu0 + 1.0, z);
  const double scale = (j0 * at0 + j1 * at1) / (at0 * at0 + at1 * at1);
  return at_m * scale;
}

}  // namespace

double gamma_fn(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("gamma_fn: argument must be finite and > 0");
  const double g = std::tgamma(s);
  if (!std::isfinite(g)) throw RangeError("gamma_fn: result overflows");
  return g;
}

double bessel_j(BesselOrder order, double z) {
  const double nu = order.value();
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("bessel_j: z must be finite and >= 0");
  if (z == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  // The series cancels for large z; the Hankel expansion needs z >> nu^2.
  if (z <= 15.0) return static_cast<double>(bessel_j_series<long double>(nu, z));
  if (z > nu * nu) return j_asymptotic(nu, z);
  return j_recurrence(nu, z);
}

double bessel_i(BesselOrder order, double z) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("bessel_i: z must be finite and >= 0");
  const double v = static_cast<double>(bessel_i_series<long double>(order.value(), z));
  if (!std::isfinite(v) && z > 0.0) throw RangeError("bessel_i: result overflows");
  return v;
}

double bessel_k(BesselOrder order, double z, Scaling scaling) {
  if (!(order.value() > 0.0)) throw DomainError("bessel_k: order must be > 0");
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("bessel_k: z must be finite and > 0");
  return BesselK(order.value())(z, scaling);
}

double phi_nu(BesselOrder order, double r) {
  if (!(order.value() > 0.0)) throw DomainError("phi_nu: order must be > 0");
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("phi_nu: r must be finite and >= 0");
  return BesselK(order.value()).phi(r);
}

double bessel_j_zero(BesselOrder order, int k) {
  if (k < 1) throw DomainError("bessel_j_zero: k must be >= 1");
  const double nu = order.value();
  const double mu = 4.0 * nu * nu;
  const double beta = (k + 0.5 * nu - 0.25) * kPi;
  const double b8 = 8.0 * beta;
  double x0 = beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8);
  if (mu == 1.0) return x0;  // J_{+-1/2}: zeros of sin/cos are exact
  double x1 = x0 + 1e-3;
  double f0 = bessel_j(order, x0), f1 = bessel_j(order, x1);
  for (int it = 0; it < 50 && f1 != f0; ++it) {
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = bessel_j(order, x1);
    if (std::abs(x1 - x0) <= 1e-15 * x1) break;
  }
  return x1;
}

double bessel_j_radial(BesselOrder order, double x, double s) {
  const double nu = order.value();
  if (x * s < 1e-150) return std::pow(0.5 * s, nu) / std::tgamma(nu + 1.0);
  return std::pow(x, -nu) * bessel_j(order, x * s);
}

// --- BesselK -----------------------------------------------------------------

namespace {
constexpr double kTmin = -6.7;
constexpr double kTmax = 2.3;  // e^{-u} underflows beyond
constexpr int kMaxLevel = 8;
}  // namespace

BesselK::BesselK(double nu) : nu_(nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("BesselK: order must be finite and > 0");
  prefactor_ = std::sqrt(kPi) / (std::tgamma(nu + 0.5) * std::pow(2.0, nu));
  inv_gamma2nu_ = 1.0 / std::tgamma(2.0 * nu);
  const double a = nu - 0.5;
  auto make = [&](double t) -> Node {
    const double lu = 0.5 * kPi * std::sinh(t);
    const double u = std::exp(lu);
    // e^{-u} u^{nu-1/2} * du/dt with du/dt = u * pi/2 cosh t
    const double base = std::exp(-u + (a + 1.0) * lu) * 0.5 * kPi * std::cosh(t);
    return {u, base};
  };
  double h = 0.5;
  std::vector<Node> level0;
  for (int k = static_cast<int>(std::ceil(kTmin / h)); k * h <= kTmax; ++k) {
    Node nd = make(k * h);
    if (nd.base > 0.0) level0.push_back(nd);
  }
  levels_.push_back(std::move(level0));
  level_h_.push_back(h);
  for (int level = 1; level <= kMaxLevel; ++level) {
    h *= 0.5;
    std::vector<Node> nodes;
    for (int k = static_cast<int>(std::ceil(kTmin / h)); k * h <= kTmax; ++k) {
      if (k % 2 == 0) continue;
      Node nd = make(k * h);
      if (nd.base > 0.0) nodes.push_back(nd);
    }
    levels_.push_back(std::move(nodes));
    level_h_.push_back(h);
  }
}

double BesselK::reduced_integral(double r, double* error) const {
  const double a = nu_ - 0.5;
  auto level_sum = [&](const std::vector<Node>& nodes) {
    double s = 0.0;
    if (a == 0.0) {
      for (const Node& nd : nodes) s += nd.base;
    } else {
      for (const Node& nd : nodes) s += nd.base * std::exp(a * std::log(nd.u + 2.0 * r));
    }
    return s;
  };
  double sum = level_sum(levels_[0]);
  double estimate = sum * level_h_[0];
  double diff = std::numeric_limits<double>::infinity();
  for (std::size_t level = 1; level < levels_.size(); ++level) {
    sum += level_sum(levels_[level]);
    const double next = sum * level_h_[level];
    diff = std::abs(next - estimate);
    estimate = next;
    // Double-exponential rules roughly square their error per halving, so a
    // level difference of 1e-9 leaves the finer estimate far below 1e-13.
    if (level >= 3 && diff <= 1e-9 * std::abs(estimate)) break;
  }
  if (error) *error = diff * 1e-3 + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(estimate);
  if (diff > 1e-6 * std::abs(estimate))
    throw NonConvergenceError("BesselK: quadrature did not converge", estimate, diff);
  return estimate;
}

double BesselK::operator()(double z, Scaling scaling) const {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("bessel_k: z must be finite and > 0");
  const double scaled = prefactor_ * std::pow(z, -nu_) * reduced_integral(z);
  if (!std::isfinite(scaled)) throw RangeError("bessel_k: result overflows");
  if (scaling == Scaling::exponential) return scaled;
  const double value = scaled * std::exp(-z);
  if (value < std::numeric_limits<double>::min())
    throw RangeError("bessel_k: e^{-z} underflows; request the exponentially scaled value");
  return value;
}

double BesselK::phi(double r) const {
  if (r == 0.0) return 1.0;
  return std::exp(-r) * reduced_integral(r) * inv_gamma2nu_;
}

double BesselK::phi_scaled(double r) const {
  if (r == 0.0) return 1.0;
  return reduced_integral(r) * inv_gamma2nu_;
}

}  // namespace gasp
