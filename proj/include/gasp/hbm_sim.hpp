#pragma once

// Hyperbolic Brownian motion with drift,
//
//   dX = Y dW,   dY = Y dB - (mu - 1/2) Y dt,   mu = (a+1)/2,
//
// as a Monte Carlo oracle: started at (0, y0) the boundary limit of X has law
// K_{a,y0}, and the position where Y first reaches eta has law G_{a,y0}(eta).

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "gasp/model.hpp"

namespace gasp {

/// Philox4x32-10 counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

struct SimConfig {
  ModelParams p;
  HalfSpacePoint start;
  double dt = 1e-3;
  double y_stop = 0.0;   // absorption level; 0 selects boundary mode
  double y_floor = 0.0;  // boundary mode only; 0 selects 1e-4 * start.y
  long n_paths = 1000;
  std::uint64_t master_seed = 0;
  int workers = 1;

  bool boundary_mode() const { return y_stop == 0.0; }
  double stop_level() const;
  void validate() const;
};

struct HitSampleSet {
  int n = 1;
  std::vector<double> positions;  // path-major, n values per path
  std::vector<double> stop_times;
  std::vector<double> stop_y;
  std::uint64_t master_seed = 0;  // path i draws from stream (master_seed, i)

  long size() const { return static_cast<long>(stop_times.size()); }
  double coordinate(long path, int axis) const { return positions[path * n + axis]; }
  std::vector<double> coordinate_column(int axis) const;
};

/// Exact log-space Y, Euler X; the stop is interpolated linearly in log Y.
HitSampleSet simulate_paths(const SimConfig& cfg);

/// log Y_T for each path (no stopping), from the same streams as simulate_paths.
std::vector<double> simulate_log_y(const SimConfig& cfg, double T);

/// sup |F_emp - F| for sorted samples.
double ks_statistic(const std::vector<double>& sorted_samples, const std::function<double(double)>& cdf);

struct Moments {
  double mean;
  double variance;
  double mean_stderr;
  double variance_stderr;
};

Moments sample_moments(const std::vector<double>& values);

struct LawReport {
  double ks;
  double threshold;
  double floor_allowance;  // boundary mode: effect of stopping at y_floor
  double cdf_tail;         // hitting mode: tail closure of the tabulated CDF
  long n_paths;
  double dt;
  std::uint64_t seed;
  bool pass;
};

/// Statistical part of the threshold, 1.95/sqrt(N), plus the 5e-3 step-size allowance.
double ks_threshold(long n_paths);

/// KS of the boundary-mode samples of X against the CDF of K_{a,y0} (n = 1).
LawReport validate_boundary_law(const SimConfig& cfg);

/// KS of the hitting positions at level eta = cfg.y_stop against the CDF of G (n = 1).
LawReport validate_hitting_law(const SimConfig& cfg);

}  // namespace gasp
