#pragma once

// Growth of solutions on hemispheres S_r = {|x|^2 + y^2 = r^2, y > 0} with
// y = r cos(theta), |x| = r sin(theta):
//
//   M(r) = max_theta |u(r sin(theta) e_1, r cos(theta))| cos^{n+m}(theta) / r^{a+1}.
//
// Poisson integrals of weighted-L1 data have M(r) -> 0; the null solution
// y^{a+1} has M = 1; the bump sequences of `sharpness_data` keep the
// corresponding ratio away from 0.

#include <vector>

#include "gasp/boundary_data.hpp"
#include "gasp/kernel.hpp"

namespace gasp {

struct GrowthRecord {
  double r;
  double M;
  double theta_argmax;
};

struct GrowthScan {
  std::vector<double> r_values;
  int theta_count = 0;
  int m = 0;
  std::vector<GrowthRecord> records;
};

inline constexpr int kMinThetaCount = 16;

/// theta_j = j theta_max / (T - 1), theta_max = pi/2 - pi/(4T).
std::vector<double> theta_grid(int theta_count);

GrowthScan sphere_sup_scan(const Evaluator& u, const ModelParams& p, int m, const std::vector<double>& r_values,
                           int theta_count, int workers = 1);

/// Scan of the Poisson integral of function-type data (m = 0).
GrowthScan l1_data_scan(const BoundaryData& data, const ModelParams& p, const std::vector<double>& r_values,
                        int theta_count = 64, int workers = 1);

/// Largest |eta| over the nonzero samples of the data.
double support_radius(const BoundaryData& data);

/// I(r) = int |f(eta)| (|eta|^2 + r^2)^{-(a+n+1)/2} d eta (trapezoid on the data grids).
double envelope_integral(const BoundaryData& data, const ModelParams& p, double r);

/// C with M(r) <= C I(r) for r >= support_radius: c_{a,n} 2^{(a+n+1)/2}.
double envelope_constant(const ModelParams& p);

struct DecayVerdict {
  bool monotone;        // strictly decreasing beyond 4 support radii
  double decade_ratio;  // M(r_last) / M(r), r the largest radius <= r_last / 10
  bool pass;            // monotone and decade_ratio <= 0.2 (false without a decade)
};

DecayVerdict assess_decay(const GrowthScan& scan, double support_radius);

/// u~(0, 1) = int K_{a,1}(eta) max(0, 1 - |eta|) d eta.
double unit_tent_response(const ModelParams& p);

struct CounterexampleRecord {
  int k;
  double a;
  double rho;
  double log_ratio;    // lower bound from bump k alone
  double ratio;        // exp(log_ratio)
  double bump_response;  // u~_k: the unit-height bump's Poisson integral at (a_k e_1, rho_k)
};

/// rho_k^gamma u(a_k e_1, rho_k) / (a_k^2 + rho_k^2)^{(beta+gamma)/2}, bounded
/// below using bump k only (kernel positivity drops the others).
std::vector<CounterexampleRecord> counterexample_track(const ModelParams& p, const SharpnessCase& c, int k_max);

}  // namespace gasp
