#pragma once

// The Poisson integral u(x, y) = sum_beta int (d^beta K_{a,y})(x - eta) f_beta(eta) d eta
// of gridded boundary data. The data grid doubles as the quadrature grid.

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "gasp/boundary_data.hpp"
#include "gasp/kernel.hpp"

namespace gasp {

struct PointValue {
  double value;
  double error;  // |T_h - T_{2h}| of the trapezoid sums
};

PointValue extend_point_detail(const BoundaryData& data, const ModelParams& p, const HalfSpacePoint& pt);

inline double extend_point(const BoundaryData& data, const ModelParams& p, const HalfSpacePoint& pt) {
  return extend_point_detail(data, p, pt).value;
}

struct ExtensionResult {
  GridSpec grid;  // output x-grid
  double y = 0.0;
  Eigen::VectorXd values;
  Eigen::VectorXd errors;  // per-point quadrature error estimate
  double quadrature_error_estimate = 0.0;  // max over the grid
  bool used_fast_path = false;
  bool incommensurate_fallback = false;  // some term fell back to the direct sum
  bool coarse_spacing = false;           // data spacing > y/4
};

/// u(., y) on an output grid. Terms whose grid is commensurate with the output
/// grid are convolved by FFT; the others by direct summation.
ExtensionResult extend_grid(const BoundaryData& data, const ModelParams& p, double y, const GridSpec& out,
                            int workers = 1, bool allow_fast_path = true);

struct ConvergenceRecord {
  double y;
  double error;       // int |u_y - f| / w_a over the evaluation box
  double tail_bound;  // bound on the same integral outside the box
};

/// Weighted L1 distance between u(., y) and f for each y, on the support box
/// enlarged by 8 max(y). Requires beta = 0 terms sharing one commensurate grid.
std::vector<ConvergenceRecord> boundary_convergence(const BoundaryData& data, const ModelParams& p,
                                                    const std::vector<double>& y_list);

/// (finite-difference d^beta of u at pt, extension of the data carrying beta).
std::pair<double, double> derivative_commutation_check(const BoundaryData& data, const ModelParams& p,
                                                       const MultiIndex& beta, const HalfSpacePoint& pt, double h);

}  // namespace gasp
