#pragma once

// Gamma and Bessel-family functions of real order and nonnegative real argument.
//
// K_nu is evaluated from the Laplace-type integral
//
//   K_nu(z) = sqrt(pi) (z/2)^nu / Gamma(nu + 1/2) * int_1^inf e^{-zt} (t^2-1)^{nu-1/2} dt
//
// for every nu > 0, which needs no special case at integer orders. After the
// shift u = z (t - 1) the integral becomes
//
//   int_0^inf e^{-u} u^{nu-1/2} (u + 2z)^{nu-1/2} du
//
// which is what `BesselK::reduced_integral` returns.

#include <cmath>
#include <limits>
#include <vector>

#include "gasp/errors.hpp"

namespace gasp {

/// Order of a Bessel function; nu >= -1/2.
class BesselOrder {
 public:
  explicit BesselOrder(double nu) : nu_(nu) {
    if (!(nu >= -0.5) || !std::isfinite(nu))
      throw DomainError("Bessel order must be finite and >= -1/2");
  }
  double value() const noexcept { return nu_; }

 private:
  double nu_;
};

/// Requested accuracy of an evaluation.
struct EvalAccuracy {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;

  EvalAccuracy() = default;
  EvalAccuracy(double rel, double abs) : rel_tol(rel), abs_tol(abs) { validate(); }

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-4) || !std::isfinite(rel_tol))
      throw ValidationError("rel_tol must lie in (0, 1e-4]");
    if (!(abs_tol >= 0.0) || !std::isfinite(abs_tol))
      throw ValidationError("abs_tol must be finite and >= 0");
  }
};

enum class Scaling {
  none,        ///< K_nu(z)
  exponential  ///< e^{z} K_nu(z)
};

double gamma_fn(double s);

double bessel_j(BesselOrder order, double z);
double bessel_i(BesselOrder order, double z);
double bessel_k(BesselOrder order, double z, Scaling scaling = Scaling::none);

/// phi_nu(r) = 2^{1-nu} r^nu K_nu(r) / Gamma(nu), continuously extended by
/// phi_nu(0) = 1. Requires nu > 0.
double phi_nu(BesselOrder order, double r);

/// k-th positive zero of J_nu (k >= 1), McMahon estimate refined by secant steps.
double bessel_j_zero(BesselOrder order, int k);

/// x^{-nu} J_nu(x s) with its continuous extension s^nu / (2^nu Gamma(nu+1)) at x = 0.
double bessel_j_radial(BesselOrder order, double x, double s);

/// K_nu evaluator for a fixed order. Node tables of the exp-sinh rule are built
/// once, so repeated evaluations at different arguments are cheap.
class BesselK {
 public:
  explicit BesselK(double nu);

  double nu() const noexcept { return nu_; }

  double operator()(double z, Scaling scaling = Scaling::none) const;

  /// int_0^inf e^{-u} u^{nu-1/2} (u + 2r)^{nu-1/2} du for r >= 0, with an
  /// estimate of its absolute quadrature error.
  double reduced_integral(double r, double* error = nullptr) const;

  /// phi_nu(r); see the free function.
  double phi(double r) const;

  /// e^{r} phi_nu(r); finite for every r >= 0.
  double phi_scaled(double r) const;

 private:
  struct Node {
    double u;
    double base;  // weight * e^{-u} u^{nu-1/2}
  };
  double nu_;
  double prefactor_;   // sqrt(pi) / (Gamma(nu + 1/2) 2^nu)
  double inv_gamma2nu_;
  std::vector<std::vector<Node>> levels_;
  std::vector<double> level_h_;
};

/// Power series of I_nu for any real nu (used in extended precision by the
/// cross-checks; negative integer orders are reflected to |nu|).
template <class Scalar>
Scalar bessel_i_series(Scalar nu, Scalar z) {
  using std::abs;
  using std::floor;
  using std::pow;
  using std::tgamma;
  if (z < Scalar(0)) throw DomainError("bessel_i_series: z < 0");
  if (nu < Scalar(0) && nu == floor(nu)) nu = -nu;
  if (z == Scalar(0)) {
    if (nu == Scalar(0)) return Scalar(1);
    if (nu > Scalar(0)) return Scalar(0);
    return std::numeric_limits<Scalar>::infinity();
  }
  const Scalar half = z / 2;
  const Scalar q = half * half;
  Scalar term = pow(half, nu) / tgamma(nu + 1);
  Scalar sum = term;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int m = 0; m < 100000; ++m) {
    term *= q / (Scalar(m + 1) * (nu + Scalar(m + 1)));
    sum += term;
    if (Scalar(m) > half && abs(term) <= eps * abs(sum)) break;
  }
  return sum;
}

/// Power series of J_nu, any real nu > -1 or nu = -1/2.
template <class Scalar>
Scalar bessel_j_series(Scalar nu, Scalar z) {
  using std::abs;
  using std::pow;
  using std::tgamma;
  const Scalar half = z / 2;
  const Scalar q = -half * half;
  Scalar term = pow(half, nu) / tgamma(nu + 1);
  Scalar sum = term;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int m = 0; m < 100000; ++m) {
    term *= q / (Scalar(m + 1) * (nu + Scalar(m + 1)));
    sum += term;
    if (Scalar(m) > abs(half) && abs(term) <= eps * abs(sum)) break;
  }
  return sum;
}

}  // namespace gasp
