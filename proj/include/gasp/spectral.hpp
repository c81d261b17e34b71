#pragma once

// Radial Fourier analysis of the kernel. The transform of K_{a,y} is
//
//   phi_nu(y|xi|) = 2^{1-nu} (y|xi|)^nu K_nu(y|xi|) / Gamma(nu),  nu = (a+1)/2,
//
// evaluated here along three independent routes: the Bessel closed form, the
// Laplace-type integral representation, and brute-force Fourier quadrature.

#include <Eigen/Core>

#include <functional>
#include <limits>

#include "gasp/kernel.hpp"
#include "gasp/model.hpp"
#include "gasp/quadrature.hpp"
#include "gasp/special_functions.hpp"

namespace gasp {

enum class DecayKind { polynomial, exponential };

/// Tail model of a radial profile: (1+s)^{-power} or e^{-rate s}.
struct DecayClass {
  DecayKind kind;
  double parameter;

  static DecayClass polynomial(double power) { return {DecayKind::polynomial, power}; }
  static DecayClass exponential(double rate) { return {DecayKind::exponential, rate}; }
  double tail(double s) const;
};

/// Radial function s -> f(s) on [0, inf) together with its decay class.
class RadialProfile {
 public:
  /// Spot-checks the decay class at s = 1, 2, 4, ..., 4096.
  RadialProfile(std::function<double(double)> eval, DecayClass decay);

  double operator()(double s) const { return eval_(s); }
  const DecayClass& decay() const noexcept { return decay_; }

 private:
  std::function<double(double)> eval_;
  DecayClass decay_;
};

/// The radial profile of K_{a,y}: s -> K_{a,y}(|x| = s).
RadialProfile kernel_profile(const ModelParams& p, double y);

/// int_0^inf f(s) s^{n/2} J_{(n-2)/2}(r s) ds, integrated between consecutive
/// zeros of the Bessel factor. Partial sums of polynomially decaying profiles
/// are extrapolated with the epsilon algorithm; exponential ones are summed
/// until the panels fall below tolerance or s exceeds `cutoff`.
quad::QuadResult hankel_integral(const RadialProfile& f, int n, double r, const EvalAccuracy& acc,
                                 double cutoff = std::numeric_limits<double>::infinity());

/// F(r) = (2 pi)^{n/2} r^{(2-n)/2} int_0^inf f(s) s^{n/2} J_{(n-2)/2}(r s) ds.
/// Polynomially decaying profiles use rel_tol >= 1e-6.
quad::QuadResult hankel_transform(const RadialProfile& f, int n, double r, const EvalAccuracy& acc = {});

/// Closed form phi_nu(y |xi|).
double ft_closed_form(const ModelParams& p, double y, double xi_norm);

/// (t^{a+1} / Gamma(a+1)) int_1^inf e^{-t tau} (tau^2 - 1)^{a/2} d tau with t = y|xi|,
/// by generalized Gauss-Laguerre quadrature of increasing order.
quad::QuadResult ft_integral_rep(const ModelParams& p, double y, double xi_norm, const EvalAccuracy& acc = {});

struct ComplexEstimate {
  double re;
  double im;
  double error;
};

/// Brute-force quadrature of int e^{-i <x, xi>} K_{a,y}(x) dx for n <= 2.
ComplexEstimate ft_direct(const ModelParams& p, double y, const Eigen::VectorXd& xi, const EvalAccuracy& acc = {});

/// v'' - (a/t) v' - v at t for v = phi_nu, by central differences of step h.
double transform_ode_residual(const ModelParams& p, double t, double h);

}  // namespace gasp
