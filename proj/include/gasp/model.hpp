#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>

#include "gasp/errors.hpp"

namespace gasp {

/// Weight exponent alpha > -1 and boundary dimension n >= 1, with the kernel
/// normalization and the Bessel order / drift derived from them.
class ModelParams {
 public:
  ModelParams(double alpha, int n) : alpha_(alpha), n_(n) {
    if (!std::isfinite(alpha) || !(alpha > -1.0))
      throw ValidationError("alpha must be finite and > -1 (for alpha <= -1 the only solution with zero boundary data is u = 0, so no Poisson kernel exists)");
    if (n < 1) throw ValidationError("n must be >= 1");
    nu_ = 0.5 * (alpha + 1.0);
    c_norm_ = std::exp(std::lgamma(0.5 * (alpha + n + 1)) - std::lgamma(nu_) -
                       0.5 * n * std::log(std::numbers::pi));
  }

  double alpha() const noexcept { return alpha_; }
  int n() const noexcept { return n_; }
  /// Gamma((alpha+n+1)/2) / (Gamma((alpha+1)/2) pi^{n/2})
  double c_norm() const noexcept { return c_norm_; }
  double nu() const noexcept { return nu_; }
  double mu() const noexcept { return nu_; }
  /// (alpha + n + 1) / 2, the decay exponent of the kernel in |x|^2 + y^2.
  double s() const noexcept { return 0.5 * (alpha_ + n_ + 1); }

 private:
  double alpha_;
  int n_;
  double nu_;
  double c_norm_;
};

/// A point (x, y) of the upper half-space.
struct HalfSpacePoint {
  Eigen::VectorXd x;
  double y;

  HalfSpacePoint(Eigen::VectorXd x_, double y_) : x(std::move(x_)), y(y_) {
    if (!std::isfinite(y) || !(y > 0.0)) throw DomainError("HalfSpacePoint: y must be finite and > 0");
    if (!x.allFinite()) throw DomainError("HalfSpacePoint: x must be finite");
  }

  /// Point on the hemisphere of radius r at polar angle theta, with x along e_1.
  static HalfSpacePoint polar(int n, double r, double theta) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x(0) = r * std::sin(theta);
    return {x, r * std::cos(theta)};
  }
};

inline constexpr int kMaxDerivativeOrder = 4;

/// Multi-index of a partial derivative in x; total order is capped at 4.
struct MultiIndex {
  Eigen::VectorXi components;

  explicit MultiIndex(Eigen::VectorXi c) : components(std::move(c)) {
    if ((components.array() < 0).any()) throw ValidationError("MultiIndex: components must be >= 0");
    if (order() > kMaxDerivativeOrder)
      throw UnsupportedOrderError("MultiIndex: total order exceeds 4");
  }

  static MultiIndex zero(int n) { return MultiIndex(Eigen::VectorXi::Zero(n)); }
  static MultiIndex unit(int n, int i, int k = 1) {
    Eigen::VectorXi c = Eigen::VectorXi::Zero(n);
    c(i) = k;
    return MultiIndex(c);
  }

  int size() const noexcept { return static_cast<int>(components.size()); }
  int order() const noexcept { return components.size() ? components.sum() : 0; }
  bool is_zero() const noexcept { return order() == 0; }
};

}  // namespace gasp
