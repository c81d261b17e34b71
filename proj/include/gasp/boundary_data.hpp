#pragma once

// Boundary data f = sum_beta d^beta f_beta with each f_beta sampled on a
// uniform grid of compact support.

#include <Eigen/Core>

#include <string>
#include <vector>

#include "gasp/model.hpp"

namespace gasp {

/// Uniform grid: origin + spacing * index, index in [0, shape) per axis.
/// Flattening is row-major (the last axis varies fastest).
struct GridSpec {
  Eigen::VectorXd origin;
  double spacing = 1.0;
  Eigen::VectorXi shape;

  int dim() const { return static_cast<int>(origin.size()); }
  Eigen::Index size() const;
  Eigen::VectorXi index(Eigen::Index flat) const;
  Eigen::VectorXd point(Eigen::Index flat) const;
  /// Product trapezoid weight of the node (spacing^n times 1/2 per boundary axis).
  double trapezoid_weight(Eigen::Index flat) const;
  void validate() const;
};

struct WeightedTerm {
  MultiIndex beta;
  GridSpec grid;
  Eigen::VectorXd values;

  void validate() const;
};

struct BoundaryData {
  ModelParams params_hint;
  std::vector<WeightedTerm> terms;

  int n() const { return params_hint.n(); }
  /// True when every term has beta = 0.
  bool function_type() const;
  void validate() const;
};

/// w_a(x) = (1 + |x|^2)^{(a+n+1)/2}
inline double weight_alpha(const ModelParams& p, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::pow(1.0 + x.squaredNorm(), p.s());
}

/// Trapezoidal int |f_beta| / w_a over the term's grid.
double weighted_l1_norm(const WeightedTerm& term, const ModelParams& p);

/// Sampled radial tent height * max(0, 1 - |x - center| / radius) with
/// `per_radius` grid steps per radius (beta = 0).
WeightedTerm tent_term(const Eigen::VectorXd& center, double radius, double height, int per_radius);

enum class SharpnessKind { subcritical, critical };

/// Parameters of the two bump sequences showing that the growth exponent is sharp.
struct SharpnessCase {
  SharpnessKind kind;
  double beta;   // radial exponent
  double gamma;  // cosine exponent

  /// beta + gamma < alpha + n + 1
  static SharpnessCase subcritical(double beta, double gamma) { return {SharpnessKind::subcritical, beta, gamma}; }
  /// gamma < n, beta = alpha + n + 1 - gamma
  static SharpnessCase critical(double gamma) { return {SharpnessKind::critical, 0.0, gamma}; }

  /// Radial exponent in effect (derived from gamma in the critical case).
  double beta_exponent(const ModelParams& p) const;
  void validate(const ModelParams& p) const;
};

inline constexpr int kMaxSharpnessK = 12;

struct SharpnessBump {
  int k;
  double a;           // center a_k e_1
  double rho;         // radius
  double log_height;  // log f_k
};

struct SharpnessData {
  BoundaryData data;  // one tent term per bump, actual heights
  std::vector<HalfSpacePoint> points;  // (a_k e_1, rho_k)
  std::vector<SharpnessBump> bumps;
  /// sum_k f_k rho_k^n / a_k^{a+n+1}, accumulated in logs.
  double weighted_series() const;
};

SharpnessData sharpness_data(const ModelParams& p, const SharpnessCase& c, int k_max);

std::string to_json(const BoundaryData& data);
BoundaryData from_json(const std::string& text);
BoundaryData load_data(const std::string& path);
void save_data(const BoundaryData& data, const std::string& path);

}  // namespace gasp
