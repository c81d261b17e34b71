#pragma once

// The weighted Poisson kernel
//
//   K_a(x, y) = c_{a,n} y^{a+1} (|x|^2 + y^2)^{-(a+n+1)/2}
//
// its x-derivatives, and a finite-difference evaluator of
//
//   D_a u = y^{-a} (Lap u - (a/y) u_y).

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "gasp/model.hpp"
#include "gasp/quadrature.hpp"
#include "gasp/special_functions.hpp"

namespace gasp {

using Evaluator = std::function<double(const HalfSpacePoint&)>;

double poisson_kernel(const ModelParams& p, const HalfSpacePoint& pt);

/// K_{a,y}(x) for raw coordinates; no validation, for inner loops.
inline double poisson_kernel_raw(const ModelParams& p, double x2, double y) {
  return p.c_norm() * std::pow(y, p.alpha() + 1.0) * std::pow(x2 + y * y, -p.s());
}

/// Integral of K_{a,y} over R^n by radial quadrature after r = y tan(u).
quad::QuadResult kernel_mass(const ModelParams& p, double y, const EvalAccuracy& acc = {});

/// Mass of K_{a,y} outside the ball |x| <= radius.
double kernel_tail_mass(const ModelParams& p, double y, double radius);

/// CDF of K_{a,y} for n = 1: integral of K_{a,y} over (-inf, x].
double kernel_cdf_1d(const ModelParams& p, double y, double x);

/// x-derivative d^beta K_{a,y}(x), evaluated from an exact expansion into
/// terms coef * x^m * (|x|^2 + y^2)^{-s}.
class KernelDerivative {
 public:
  KernelDerivative(const ModelParams& p, const MultiIndex& beta);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x, double y) const;
  double operator()(const HalfSpacePoint& pt) const { return (*this)(pt.x, pt.y); }

  std::size_t term_count() const noexcept { return terms_.size(); }

 private:
  struct Term {
    double coef;
    Eigen::VectorXi m;
    int k;  // exponent is -(s0 + k)
  };
  ModelParams p_;
  std::vector<Term> terms_;
  int max_power_ = 0;
};

double kernel_derivative(const ModelParams& p, const MultiIndex& beta, const HalfSpacePoint& pt);

/// Second-order central-difference value of D_a u at pt with step h.
double dalpha_residual(const Evaluator& u, const ModelParams& p, const HalfSpacePoint& pt, double h);

inline double default_residual_step(const HalfSpacePoint& pt) { return pt.y / 100.0; }

}  // namespace gasp
