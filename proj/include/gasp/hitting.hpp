#pragma once

// Hitting density G_{a,y}(eta) of the level {y = eta} for the diffusion started
// at height y: K_{a,y} = G_{a,y}(eta) * K_{a,eta}. In Fourier variables
//
//   G^(s) = phi_nu(y s) / phi_nu(eta s),   nu = (a+1)/2, s = |xi|,
//
// and physical values follow by Hankel inversion.

#include <Eigen/Core>

#include <vector>

#include "gasp/model.hpp"
#include "gasp/quadrature.hpp"
#include "gasp/special_functions.hpp"

namespace gasp {

class LevelPair {
 public:
  LevelPair(double y, double eta);
  double y() const noexcept { return y_; }
  double eta() const noexcept { return eta_; }
  double gap() const noexcept { return y_ - eta_; }

 private:
  double y_;
  double eta_;
};

/// G^(|xi|), in (0, 1].
double hitting_ft(const ModelParams& p, const LevelPair& lv, double xi_norm);

struct HittingValue {
  double value;
  double error;
  bool clipped;  // a small negative quadrature result was set to 0
};

/// G(|x|) by oscillatory Hankel inversion of the quotient.
HittingValue hitting_kernel_detail(const ModelParams& p, const LevelPair& lv, double x_norm,
                                   const EvalAccuracy& acc = {});

inline double hitting_kernel(const ModelParams& p, const LevelPair& lv, double x_norm, const EvalAccuracy& acc = {}) {
  return hitting_kernel_detail(p, lv, x_norm, acc).value;
}

/// Fixed-node inversion of G^ for repeated evaluation. The Gauss-Kronrod panels
/// in s resolve the Bessel oscillation for every |x| <= r_max; the quotient is
/// sampled once.
class HittingProfile {
 public:
  HittingProfile(const ModelParams& p, const LevelPair& lv, double r_max);

  const ModelParams& params() const noexcept { return p_; }
  const LevelPair& levels() const noexcept { return lv_; }
  double r_max() const noexcept { return r_max_; }
  std::size_t node_count() const noexcept { return s_.size(); }

  /// G(r) for 0 <= r <= r_max.
  double density(double r) const;
  /// int_{-inf}^x G for n = 1 and |x| <= r_max.
  double cdf_1d(double x) const;

 private:
  ModelParams p_;
  LevelPair lv_;
  double r_max_;
  std::vector<double> s_;
  std::vector<double> wg_;  // quadrature weight * G^(s)
};

/// Tabulated CDF of G for n = 1, linear in theta = atan(x / (y - eta)). Beyond
/// the table the CDF is interpolated linearly in theta up to 1 at theta = pi/2;
/// `tail()` bounds the mass affected by that closure.
class HittingCdf {
 public:
  HittingCdf(const ModelParams& p, const LevelPair& lv, double tail_target = 1e-3, int table_size = 2048);

  double operator()(double x) const;
  double tail() const noexcept { return tail_; }
  double x_max() const noexcept { return x_max_; }

 private:
  double scale_;
  double theta_max_;
  double tail_;
  double x_max_;
  std::vector<double> table_;  // F on theta_j = j theta_max / (size - 1), j >= 0
};

/// Uniformly tabulated even radial function with 4-point Lagrange interpolation.
/// values[j] = f(j * step); at least 4 values are required.
class RadialTable {
 public:
  RadialTable(double step, std::vector<double> values);
  double operator()(double r) const;

 private:
  double step_;
  std::vector<double> values_;
};

/// Tabulates the profile's density on [0, r_max] with `count` nodes.
RadialTable tabulate_density(const HittingProfile& profile, int count, int workers = 1);

/// Physical mass int G dx: radial quadrature on [0, R] plus the power-law tail
/// C r^{-(a+n+1)} matched at R. `error` includes the tail estimate itself.
quad::QuadResult hitting_mass(const ModelParams& p, const LevelPair& lv);

/// (G_{a,y}(eta) * K_{a,eta})(x) by quadrature; compare with K_{a,y}(x).
quad::QuadResult hitting_reconstruction(const ModelParams& p, const LevelPair& lv, const Eigen::VectorXd& x);

struct SemigroupGrid {
  double spacing = 0.02;
  double half_width = 40.0;  // the grid covers [-half_width, half_width]^n
};

/// max |G_{y}(eta1) - G_{y}(eta2) * G_{eta2}(eta1)| over the central half of the
/// grid, the convolution taken as a trapezoid sum on the grid (n <= 2).
double semigroup_check(const ModelParams& p, double y, double eta2, double eta1, const SemigroupGrid& grid,
                       int workers = 1);

/// max over xi_list of |G^_y(eta1) - G^_y(eta2) G^_eta2(eta1)|.
double fourier_semigroup_deviation(const ModelParams& p, double y, double eta2, double eta1,
                                   const std::vector<double>& xi_list);

}  // namespace gasp
