#include "gasp/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace gasp {

namespace {

constexpr double kPi = std::numbers::pi;

struct PanelOptions {
  double abs_tol;
  double rel_tol;
  bool accelerate;
  double cutoff;
  int max_panels = 4000;
};

// Sums int_0^inf g over panels [b_{k-1}, b_k] with b_0 = 0 and b_k = brk(k).
// g is expected to change sign once per panel.
template <class G, class B>
quad::QuadResult panel_sum(G&& g, B&& brk, const PanelOptions& opt, const char* what) {
  quad::QuadResult out;
  quad::WynnEpsilon wynn;
  double partial = 0.0;
  double scale = 0.0;
  double lo = 0.0;
  int quiet = 0;
  for (int k = 1; k <= opt.max_panels; ++k) {
    const double hi = brk(k);
    const double tol_here = std::max(opt.abs_tol, opt.rel_tol * std::max(scale, std::abs(partial))) * 1e-2;
    const auto piece = quad::integrate(g, lo, hi, tol_here, 1e-14, 400);
    out.evaluations += piece.evaluations;
    out.error += piece.error;
    partial += piece.value;
    scale = std::max(scale, std::abs(piece.value));
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(partial));
    lo = hi;
    if (opt.accelerate) {
      const double est = wynn.push(partial);
      if (k >= 10 && wynn.error() <= tol) {
        out.value = est;
        out.error += wynn.error();
        return out;
      }
    } else {
      quiet = std::abs(piece.value) <= 1e-2 * tol ? quiet + 1 : 0;
      if ((k >= 3 && quiet >= 3) || hi >= opt.cutoff) {
        out.value = partial;
        return out;
      }
    }
  }
  std::ostringstream msg;
  msg << what << ": oscillatory sum did not converge after " << opt.max_panels << " panels (partial sum "
      << partial << ", extrapolated " << wynn.estimate() << ")";
  throw NonConvergenceError(msg.str(), opt.accelerate ? wynn.estimate() : partial,
                            opt.accelerate ? wynn.error() : std::abs(partial));
}

std::mutex laguerre_mutex;

const quad::NodeSet& laguerre_nodes(int m, double a) {
  static std::map<std::pair<int, double>, quad::NodeSet> cache;
  std::lock_guard<std::mutex> lock(laguerre_mutex);
  auto it = cache.find({m, a});
  if (it == cache.end()) it = cache.emplace(std::make_pair(m, a), quad::gauss_laguerre(m, a)).first;
  return it->second;
}

}  // namespace

double DecayClass::tail(double s) const {
  return kind == DecayKind::polynomial ? std::pow(1.0 + s, -parameter) : std::exp(-parameter * s);
}

RadialProfile::RadialProfile(std::function<double(double)> eval, DecayClass decay)
    : eval_(std::move(eval)), decay_(decay) {
  if (!eval_) throw ValidationError("RadialProfile: empty evaluator");
  if (!(decay_.parameter > 0.0) || !std::isfinite(decay_.parameter))
    throw ValidationError("RadialProfile: decay parameter must be finite and > 0");
  double head = 0.0;
  for (int k = 0; k <= 12; ++k) {
    const double s = std::ldexp(1.0, k);
    const double v = eval_(s);
    if (!std::isfinite(v)) throw ValidationError("RadialProfile: evaluator is not finite");
    const double t = decay_.tail(s);
    if (t == 0.0) continue;
    const double ratio = std::abs(v) / t;
    if (k <= 3) {
      head = std::max(head, ratio);
    } else if (ratio > 1e3 * head + 1e-300) {
      throw ValidationError("RadialProfile: evaluator decays slower than its declared decay class");
    }
  }
}

RadialProfile kernel_profile(const ModelParams& p, double y) {
  if (!(y > 0.0)) throw DomainError("kernel_profile: y must be > 0");
  return RadialProfile([p, y](double s) { return poisson_kernel_raw(p, s * s, y); },
                       DecayClass::polynomial(p.alpha() + p.n() + 1.0));
}

quad::QuadResult hankel_integral(const RadialProfile& f, int n, double r, const EvalAccuracy& acc, double cutoff) {
  acc.validate();
  if (n < 1) throw ValidationError("hankel_integral: n must be >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("hankel_integral: r must be finite and > 0");
  const bool poly = f.decay().kind == DecayKind::polynomial;
  const double nu = 0.5 * (n - 2);
  const BesselOrder order(nu);
  PanelOptions opt{acc.abs_tol, poly ? std::max(acc.rel_tol, 1e-6) : acc.rel_tol, poly, cutoff};
  if (n == 1) {
    // s^{1/2} J_{-1/2}(r s) = sqrt(2 / (pi r)) cos(r s)
    const double c = std::sqrt(2.0 / (kPi * r));
    auto g = [&](double s) { return f(s) * c * std::cos(r * s); };
    auto brk = [&](int k) { return (k - 0.5) * kPi / r; };
    return panel_sum(g, brk, opt, "hankel_integral");
  }
  auto g = [&](double s) { return f(s) * std::pow(s, n - 1) * bessel_j_radial(order, s, r); };
  auto brk = [&](int k) { return bessel_j_zero(order, k) / r; };
  return panel_sum(g, brk, opt, "hankel_integral");
}

quad::QuadResult hankel_transform(const RadialProfile& f, int n, double r, const EvalAccuracy& acc) {
  auto res = hankel_integral(f, n, r, acc);
  const double pref = std::pow(2.0 * kPi, 0.5 * n) * std::pow(r, 0.5 * (2 - n));
  res.value *= pref;
  res.error *= pref;
  return res;
}

double ft_closed_form(const ModelParams& p, double y, double xi_norm) {
  if (!(y > 0.0)) throw DomainError("ft_closed_form: y must be > 0");
  if (!(xi_norm >= 0.0)) throw DomainError("ft_closed_form: |xi| must be >= 0");
  return phi_nu(BesselOrder(p.nu()), y * xi_norm);
}

quad::QuadResult ft_integral_rep(const ModelParams& p, double y, double xi_norm, const EvalAccuracy& acc) {
  acc.validate();
  const double t = y * xi_norm;
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("ft_integral_rep: y |xi| must be finite and > 0");
  // u = t (tau - 1) turns the integral into
  //   e^{-t} / Gamma(a+1) int_0^inf e^{-u} u^{a/2} (u + 2t)^{a/2} du,
  // and u^{a/2} e^{-u} is the Laguerre weight.
  const double a = 0.5 * p.alpha();
  const double pref = std::exp(-t - std::lgamma(p.alpha() + 1.0));
  auto rule = [&](int m) {
    const auto& ns = laguerre_nodes(m, a);
    double s = 0.0;
    for (int k = m - 1; k >= 0; --k) s += ns.weights[k] * std::pow(ns.nodes[k] + 2.0 * t, a);
    return s;
  };
  quad::QuadResult out;
  double prev = rule(16);
  out.evaluations = 16;
  for (int m = 32; m <= 1024; m *= 2) {
    const double cur = rule(m);
    out.evaluations += m;
    const double diff = std::abs(cur - prev);
    prev = cur;
    if (diff <= std::max(acc.abs_tol / pref, acc.rel_tol * std::abs(cur))) {
      out.value = pref * cur;
      out.error = pref * diff;
      return out;
    }
  }
  throw NonConvergenceError("ft_integral_rep: Gauss-Laguerre sequence did not converge", pref * prev, 0.0);
}

ComplexEstimate ft_direct(const ModelParams& p, double y, const Eigen::VectorXd& xi, const EvalAccuracy& acc) {
  acc.validate();
  const int n = p.n();
  if (n > 2) throw ValidationError("ft_direct: brute-force transform supports n <= 2 only");
  if (xi.size() != n) throw ValidationError("ft_direct: xi dimension differs from n");
  if (!(y > 0.0)) throw DomainError("ft_direct: y must be > 0");
  const double xn = xi.norm();
  if (xn == 0.0) {
    const auto m = kernel_mass(p, y, acc);
    return {m.value, 0.0, m.error};
  }
  // Marginal of K_{a,y} along the direction of xi (radial symmetry lets xi
  // lie on the first axis). For n = 2 the transverse integral is taken by
  // x2 = R tan(u), R^2 = x1^2 + y^2; its u-integrand does not depend on x1,
  // so it is computed once.
  std::function<double(double)> marginal;
  if (n == 1) {
    marginal = [&](double x) { return poisson_kernel_raw(p, x * x, y); };
  } else {
    const double e = 2.0 * p.s() - 2.0;
    const auto inner = quad::tanh_sinh(
        [&](double, double, double dv) { return std::pow(std::sin(dv), e); }, 0.0, kPi / 2, 1e-15);
    const double c = 2.0 * p.c_norm() * std::pow(y, p.alpha() + 1.0) * inner.value;
    marginal = [c, &p, y](double x1) { return c * std::pow(x1 * x1 + y * y, 0.5 - p.s()); };
  }
  // The transform is exponentially small for large y|xi| while the partial
  // sums stay O(1), so panels are always integrated near machine precision.
  PanelOptions opt{acc.abs_tol, 1e-13, true, std::numeric_limits<double>::infinity()};
  auto re_g = [&](double x) { return 2.0 * std::cos(xn * x) * marginal(x); };
  auto re_brk = [&](int k) { return (k - 0.5) * kPi / xn; };
  const auto re = panel_sum(re_g, re_brk, opt, "ft_direct");
  // -int sin(xi x) K over R: the odd part of the marginal.
  auto im_g = [&](double x) { return -std::sin(xn * x) * (marginal(x) - marginal(-x)); };
  auto im_brk = [&](int k) { return k * kPi / xn; };
  PanelOptions im_opt = opt;
  im_opt.abs_tol = std::max(opt.abs_tol, 1e-300);
  const auto im = panel_sum(im_g, im_brk, im_opt, "ft_direct");
  if (std::abs(im.value) > 1e-8) throw NonConvergenceError("ft_direct: imaginary part not negligible", im.value, im.error);
  return {re.value, im.value, re.error};
}

double transform_ode_residual(const ModelParams& p, double t, double h) {
  if (!(h > 0.0) || !(t > h)) throw DomainError("transform_ode_residual: need t > h > 0");
  const BesselK k(p.nu());
  const double vm = k.phi(t - h), v0 = k.phi(t), vp = k.phi(t + h);
  const double d2 = (vp - 2.0 * v0 + vm) / (h * h);
  const double d1 = (vp - vm) / (2.0 * h);
  return d2 - p.alpha() / t * d1 - v0;
}

}  // namespace gasp
