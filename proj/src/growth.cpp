#include "gasp/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gasp/extension.hpp"
#include "gasp/parallel.hpp"
#include "gasp/quadrature.hpp"

namespace gasp {

std::vector<double> theta_grid(int T) {
  if (T < kMinThetaCount) throw ValidationError("theta_count must be >= 16");
  const double theta_max = std::numbers::pi / 2 - std::numbers::pi / (4.0 * T);
  std::vector<double> out(T);
  for (int j = 0; j < T; ++j) out[j] = theta_max * j / (T - 1);
  return out;
}

GrowthScan sphere_sup_scan(const Evaluator& u, const ModelParams& p, int m, const std::vector<double>& r_values,
                           int theta_count, int workers) {
  if (m < 0) throw ValidationError("sphere_sup_scan: m must be >= 0");
  if (r_values.empty()) throw ValidationError("sphere_sup_scan: no radii");
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    if (!(r_values[i] > 0.0) || !std::isfinite(r_values[i]))
      throw ValidationError("sphere_sup_scan: radii must be finite and > 0");
    if (i > 0 && !(r_values[i] > r_values[i - 1])) throw ValidationError("sphere_sup_scan: radii must increase");
  }
  const auto thetas = theta_grid(theta_count);
  const int n = p.n();
  const std::size_t T = thetas.size();
  std::vector<double> vals(r_values.size() * T);
  parallel_for(vals.size(), workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      const double r = r_values[idx / T], th = thetas[idx % T];
      const double v = u(HalfSpacePoint::polar(n, r, th));
      vals[idx] = std::abs(v) * std::pow(std::cos(th), n + m) / std::pow(r, p.alpha() + 1.0);
    }
  });
  GrowthScan scan{r_values, theta_count, m, {}};
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    GrowthRecord rec{r_values[i], -1.0, 0.0};
    for (std::size_t j = 0; j < T; ++j)
      if (vals[i * T + j] > rec.M) rec = {r_values[i], vals[i * T + j], thetas[j]};
    scan.records.push_back(rec);
  }
  return scan;
}

GrowthScan l1_data_scan(const BoundaryData& data, const ModelParams& p, const std::vector<double>& r_values,
                        int theta_count, int workers) {
  data.validate();
  if (!data.function_type()) throw ValidationError("l1_data_scan: data must be function-type (beta = 0)");
  if (data.n() != p.n()) throw ValidationError("l1_data_scan: data dimension differs from n");
  Evaluator u = [&](const HalfSpacePoint& pt) { return extend_point(data, p, pt); };
  return sphere_sup_scan(u, p, 0, r_values, theta_count, workers);
}

double support_radius(const BoundaryData& data) {
  double r = 0.0;
  for (const auto& t : data.terms)
    for (Eigen::Index j = 0; j < t.values.size(); ++j)
      if (t.values(j) != 0.0) r = std::max(r, t.grid.point(j).norm());
  return r;
}

double envelope_integral(const BoundaryData& data, const ModelParams& p, double r) {
  if (!data.function_type()) throw ValidationError("envelope_integral: data must be function-type (beta = 0)");
  double sum = 0.0;
  for (const auto& t : data.terms)
    for (Eigen::Index j = 0; j < t.values.size(); ++j) {
      if (t.values(j) == 0.0) continue;
      sum += t.grid.trapezoid_weight(j) * std::abs(t.values(j)) *
             std::pow(t.grid.point(j).squaredNorm() + r * r, -p.s());
    }
  return sum;
}

double envelope_constant(const ModelParams& p) { return p.c_norm() * std::pow(2.0, p.s()); }

DecayVerdict assess_decay(const GrowthScan& scan, double support_radius) {
  const auto& rec = scan.records;
  if (rec.size() < 2) throw ValidationError("assess_decay: need at least two radii");
  DecayVerdict v{true, 0.0, false};
  for (std::size_t i = 1; i < rec.size(); ++i)
    if (rec[i - 1].r >= 4.0 * support_radius && !(rec[i].M < rec[i - 1].M)) v.monotone = false;
  // Compare against the largest radius at least a decade below the last one.
  const GrowthRecord& hi = rec.back();
  const GrowthRecord* lo = nullptr;
  for (const auto& r : rec)
    if (r.r <= hi.r / 10.0 * (1.0 + 1e-12)) lo = &r;
  if (!lo) return v;
  v.decade_ratio = lo->M > 0.0 ? hi.M / lo->M : 0.0;
  v.pass = v.monotone && v.decade_ratio <= 0.2;
  return v;
}

double unit_tent_response(const ModelParams& p) {
  const int n = p.n();
  const double omega = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  const auto r = quad::integrate(
      [&](double t) { return std::pow(t, n - 1) * poisson_kernel_raw(p, t * t, 1.0) * (1.0 - t); }, 0.0, 1.0, 1e-15,
      1e-13);
  return omega * r.value;
}

std::vector<CounterexampleRecord> counterexample_track(const ModelParams& p, const SharpnessCase& c, int k_max) {
  const SharpnessData sd = sharpness_data(p, c, k_max);
  const double beta = c.beta_exponent(p);
  std::vector<CounterexampleRecord> out;
  for (std::size_t i = 0; i < sd.bumps.size(); ++i) {
    const SharpnessBump& b = sd.bumps[i];
    // Unit-height copy of bump k; the actual bump is e^{log_height} times it.
    const BoundaryData single{p, {tent_term(sd.points[i].x, b.rho, 1.0, 32)}};
    const double response = extend_point(single, p, sd.points[i]);
    const double log_ratio = b.log_height + std::log(response) + c.gamma * std::log(b.rho) -
                             0.5 * (beta + c.gamma) * std::log(b.a * b.a + b.rho * b.rho);
    out.push_back({b.k, b.a, b.rho, log_ratio, std::exp(log_ratio), response});
  }
  return out;
}

}  // namespace gasp
