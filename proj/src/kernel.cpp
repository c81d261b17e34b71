#include "gasp/kernel.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace gasp {

namespace {

double sphere_area(int n) {
  // omega_{n-1} = 2 pi^{n/2} / Gamma(n/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// omega c int_0^phi cos^{n-1}(v) sin^a(v) dv: the kernel mass outside the
// cone |x| >= y cot(phi), i.e. outside the ball of radius y cot(phi).
quad::QuadResult outer_mass(const ModelParams& p, double phi, double rel_tol) {
  const double a = p.alpha();
  const int n = p.n();
  const double scale = sphere_area(n) * p.c_norm();
  auto f = [&](double v, double dv, double) {
    const double sv = std::sin(dv);
    if (sv <= 0.0) return 0.0;
    return scale * std::pow(std::cos(v), n - 1) * std::pow(sv, a);
  };
  return quad::tanh_sinh(f, 0.0, phi, rel_tol, 1e-300);
}

}  // namespace

double poisson_kernel(const ModelParams& p, const HalfSpacePoint& pt) {
  if (pt.x.size() != p.n()) throw ValidationError("poisson_kernel: point dimension differs from n");
  return poisson_kernel_raw(p, pt.x.squaredNorm(), pt.y);
}

quad::QuadResult kernel_mass(const ModelParams& p, double y, const EvalAccuracy& acc) {
  acc.validate();
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("kernel_mass: y must be finite and > 0");
  const int n = p.n();
  const double log_pref = std::log(sphere_area(n)) + std::log(p.c_norm()) + (p.alpha() + 2.0) * std::log(y);
  // r = y tan u; the integrand r^{n-1} K_{a,y}(r) dr/du is formed in logs so
  // that nodes next to u = pi/2 neither overflow nor underflow.
  auto f = [&](double, double du, double dv) {
    const double su = std::sin(du), cu = std::sin(dv);  // sin u, cos u
    if (su <= 0.0 || cu <= 0.0) return 0.0;
    const double t = su / cu;
    const double log_tan2p1 = t > 1.0 ? 2.0 * std::log(t) + std::log1p(1.0 / (t * t)) : std::log1p(t * t);
    const double log_rho = 2.0 * std::log(y) + log_tan2p1;  // log(r^2 + y^2)
    const double log_r = std::log(y) + std::log(t);
    const double log_sec2 = -2.0 * std::log(cu);
    return std::exp(log_pref + (n - 1) * log_r - p.s() * log_rho + log_sec2);
  };
  auto r = quad::tanh_sinh(f, 0.0, std::numbers::pi / 2, 0.01 * acc.rel_tol, acc.abs_tol);
  return quad::require(r, "kernel_mass: quadrature did not converge");
}

double kernel_tail_mass(const ModelParams& p, double y, double radius) {
  if (!(y > 0.0)) throw DomainError("kernel_tail_mass: y must be > 0");
  if (!(radius > 0.0)) return 1.0;
  return outer_mass(p, std::atan2(y, radius), 1e-12).value;
}

double kernel_cdf_1d(const ModelParams& p, double y, double x) {
  if (p.n() != 1) throw ValidationError("kernel_cdf_1d: requires n = 1");
  if (!(y > 0.0)) throw DomainError("kernel_cdf_1d: y must be > 0");
  if (x == 0.0) return 0.5;
  // Half of the outer mass lies on each side.
  const double tail = 0.5 * outer_mass(p, std::atan2(y, std::abs(x)), 1e-12).value;
  return x > 0.0 ? 1.0 - tail : tail;
}

// --- derivatives ---------------------------------------------------------------

KernelDerivative::KernelDerivative(const ModelParams& p, const MultiIndex& beta) : p_(p) {
  const int n = p.n();
  if (beta.size() != n) throw ValidationError("kernel_derivative: multi-index dimension differs from n");
  if (beta.order() > kMaxDerivativeOrder) throw UnsupportedOrderError("kernel_derivative: order > 4");
  const double s0 = p.s();
  using Key = std::pair<std::vector<int>, int>;
  std::map<Key, double> current;
  current[{std::vector<int>(n, 0), 0}] = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int rep = 0; rep < beta.components(i); ++rep) {
      std::map<Key, double> next;
      for (const auto& [key, coef] : current) {
        const auto& [m, k] = key;
        // d/dx_i [x^m rho^{-(s0+k)}] = m_i x^{m-e_i} rho^{-(s0+k)} - 2(s0+k) x^{m+e_i} rho^{-(s0+k+1)}
        if (m[i] > 0) {
          auto m1 = m;
          --m1[i];
          next[{m1, k}] += coef * m[i];
        }
        auto m2 = m;
        ++m2[i];
        next[{m2, k + 1}] += -2.0 * (s0 + k) * coef;
      }
      current = std::move(next);
    }
  }
  for (const auto& [key, coef] : current) {
    if (coef == 0.0) continue;
    Eigen::VectorXi m(n);
    for (int i = 0; i < n; ++i) m(i) = key.first[i];
    terms_.push_back({coef, m, key.second});
    max_power_ = std::max(max_power_, key.second);
  }
}

double KernelDerivative::operator()(const Eigen::Ref<const Eigen::VectorXd>& x, double y) const {
  const double rho = x.squaredNorm() + y * y;
  const double base = p_.c_norm() * std::pow(y, p_.alpha() + 1.0) * std::pow(rho, -p_.s());
  const double inv_rho = 1.0 / rho;
  double sum = 0.0;
  for (const Term& t : terms_) {
    double v = t.coef;
    for (int i = 0; i < t.m.size(); ++i)
      for (int j = 0; j < t.m(i); ++j) v *= x(i);
    for (int j = 0; j < t.k; ++j) v *= inv_rho;
    sum += v;
  }
  return base * sum;
}

double kernel_derivative(const ModelParams& p, const MultiIndex& beta, const HalfSpacePoint& pt) {
  if (pt.x.size() != p.n()) throw ValidationError("kernel_derivative: point dimension differs from n");
  return KernelDerivative(p, beta)(pt);
}

// --- operator residual -----------------------------------------------------------

double dalpha_residual(const Evaluator& u, const ModelParams& p, const HalfSpacePoint& pt, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("dalpha_residual: h must be finite and > 0");
  if (!(h < pt.y / 4.0)) throw DomainError("dalpha_residual: stencil leaves the half-space (need h < y/4)");
  const int n = static_cast<int>(pt.x.size());
  const double u0 = u(pt);
  double lap = 0.0;
  for (int i = 0; i < n; ++i) {
    HalfSpacePoint plus = pt, minus = pt;
    plus.x(i) += h;
    minus.x(i) -= h;
    lap += (u(plus) - 2.0 * u0 + u(minus)) / (h * h);
  }
  const double up = u(HalfSpacePoint(pt.x, pt.y + h));
  const double um = u(HalfSpacePoint(pt.x, pt.y - h));
  lap += (up - 2.0 * u0 + um) / (h * h);
  const double uy = (up - um) / (2.0 * h);
  return std::pow(pt.y, -p.alpha()) * (lap - p.alpha() / pt.y * uy);
}

}  // namespace gasp
