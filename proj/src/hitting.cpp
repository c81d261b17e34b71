#include "gasp/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "fft_util.hpp"
#include "gasp/kernel.hpp"
#include "gasp/parallel.hpp"
#include "gasp/spectral.hpp"

namespace gasp {

namespace {

constexpr double kPi = std::numbers::pi;

const BesselK& bessel_k_for(double nu) {
  static std::mutex mutex;
  static std::map<double, std::unique_ptr<BesselK>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[nu];
  if (!slot) slot = std::make_unique<BesselK>(nu);
  return *slot;
}

// phi_nu(y s) / phi_nu(eta s) = e^{-(y-eta)s} I(ys) / I(eta s) with the reduced
// integral I; the exponential factor is split off so nothing underflows.
double quotient(const BesselK& bk, const LevelPair& lv, double s) {
  if (s == 0.0) return 1.0;
  return std::exp(-lv.gap() * s) * bk.reduced_integral(lv.y() * s) / bk.reduced_integral(lv.eta() * s);
}

// Upper cutoff in s: (y/eta)^{a+1} e^{-(y-eta) S} = tol / 10.
double cutoff(const ModelParams& p, const LevelPair& lv, double tol) {
  return ((p.alpha() + 1.0) * std::log(lv.y() / lv.eta()) + std::log(10.0 / tol)) / lv.gap();
}

double surface_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

// Reach of the radial quadratures, in units of y - eta.
constexpr double kReach = 60.0;

}  // namespace

LevelPair::LevelPair(double y, double eta) : y_(y), eta_(eta) {
  if (!std::isfinite(y) || !std::isfinite(eta) || !(eta > 0.0) || !(y > eta))
    throw DomainError("level pair: requires finite y > eta > 0");
}

double hitting_ft(const ModelParams& p, const LevelPair& lv, double xi_norm) {
  if (!(xi_norm >= 0.0) || !std::isfinite(xi_norm)) throw DomainError("hitting_ft: |xi| must be finite and >= 0");
  return quotient(bessel_k_for(p.nu()), lv, xi_norm);
}

HittingValue hitting_kernel_detail(const ModelParams& p, const LevelPair& lv, double x_norm, const EvalAccuracy& acc) {
  acc.validate();
  if (!(x_norm >= 0.0) || !std::isfinite(x_norm)) throw DomainError("hitting_kernel: |x| must be finite and >= 0");
  const int n = p.n();
  const BesselK& bk = bessel_k_for(p.nu());
  const double tol = std::max(acc.abs_tol, 1e-17);
  const double S = cutoff(p, lv, tol);
  auto g = [&bk, &lv](double s) { return quotient(bk, lv, s); };
  quad::QuadResult r;
  if (x_norm == 0.0) {
    // r^{-nu} J_nu(r s) -> s^nu / (2^nu Gamma(nu+1)) with nu = (n-2)/2.
    const double nu = 0.5 * (n - 2);
    r = quad::integrate([&](double s) { return g(s) * std::pow(s, n - 1); }, 0.0, S, tol, acc.rel_tol);
    if (!r.converged) throw NonConvergenceError("hitting_kernel: quadrature at x = 0 did not converge", r.value, r.error);
    const double pref = std::pow(2.0 * kPi, -0.5 * n) / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
    r.value *= pref;
    r.error *= pref;
  } else {
    r = hankel_integral(RadialProfile(g, DecayClass::exponential(lv.gap())), n, x_norm, acc, S);
    const double pref = std::pow(2.0 * kPi, -0.5 * n) * std::pow(x_norm, 0.5 * (2 - n));
    r.value *= pref;
    r.error *= pref;
  }
  r.error += tol / 10.0;
  HittingValue out{r.value, r.error, false};
  if (out.value < 0.0) {
    if (-out.value > std::max(out.error, acc.abs_tol)) {
      std::ostringstream msg;
      msg << "hitting_kernel: negative value " << out.value << " exceeds the error estimate " << out.error;
      throw NonConvergenceError(msg.str(), out.value, out.error);
    }
    out.value = 0.0;
    out.clipped = true;
  }
  return out;
}

// --- fixed-node profile -------------------------------------------------------

HittingProfile::HittingProfile(const ModelParams& p, const LevelPair& lv, double r_max)
    : p_(p), lv_(lv), r_max_(r_max) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw DomainError("HittingProfile: r_max must be finite and > 0");
  const BesselK& bk = bessel_k_for(p.nu());
  // At most half an oscillation of the Bessel factor per panel; the quotient
  // varies on the scale 1/y. Panels near 0 are graded for the s^{2 nu} term.
  const double w = std::min(kPi / r_max, 0.5 / lv.y());
  const double S = cutoff(p, lv, 1e-17);
  std::vector<std::pair<double, double>> panels;
  double lo = std::ldexp(w, -40);
  panels.emplace_back(0.0, lo);
  for (int k = 39; k >= 0; --k) {
    const double hi = std::ldexp(w, -k);
    panels.emplace_back(lo, hi);
    lo = hi;
  }
  for (long k = 2; lo < S; ++k) {
    const double hi = std::min(S, k * w);
    panels.emplace_back(lo, hi);
    lo = hi;
  }
  using quad::detail::kWgk;
  using quad::detail::kXgk;
  for (const auto& [a, b] : panels) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int j = 0; j < 8; ++j) {
      for (int sign : {-1, 1}) {
        if (j == 7 && sign > 0) continue;
        const double s = c + sign * h * kXgk[j];
        const double v = h * kWgk[j] * quotient(bk, lv, s);
        if (v == 0.0) continue;
        s_.push_back(s);
        wg_.push_back(v);
      }
    }
  }
}

double HittingProfile::density(double r) const {
  if (!(r >= 0.0) || r > r_max_ * (1.0 + 1e-12)) throw DomainError("HittingProfile::density: r outside [0, r_max]");
  const int n = p_.n();
  double sum = 0.0;
  if (n == 1) {
    // (2 pi)^{-1/2} s^{1/2} r^{1/2} J_{-1/2}(r s) = cos(r s) / pi
    for (std::size_t i = 0; i < s_.size(); ++i) sum += wg_[i] * std::cos(r * s_[i]);
    return sum / kPi;
  }
  const BesselOrder order(0.5 * (n - 2));
  for (std::size_t i = 0; i < s_.size(); ++i)
    sum += wg_[i] * std::pow(s_[i], n - 1) * bessel_j_radial(order, r * s_[i], 1.0);
  return sum * std::pow(2.0 * kPi, -0.5 * n);
}

double HittingProfile::cdf_1d(double x) const {
  if (p_.n() != 1) throw ValidationError("HittingProfile::cdf_1d: requires n = 1");
  if (!(std::abs(x) <= r_max_ * (1.0 + 1e-12))) throw DomainError("HittingProfile::cdf_1d: |x| exceeds r_max");
  // F(x) = 1/2 + (1/pi) int_0^inf G^(s) sin(x s) / s ds
  double sum = 0.0;
  for (std::size_t i = 0; i < s_.size(); ++i) sum += wg_[i] * std::sin(x * s_[i]) / s_[i];
  return 0.5 + sum / kPi;
}

HittingCdf::HittingCdf(const ModelParams& p, const LevelPair& lv, double tail_target, int table_size)
    : scale_(lv.gap()) {
  if (p.n() != 1) throw ValidationError("HittingCdf: requires n = 1");
  if (!(tail_target > 0.0 && tail_target < 0.5)) throw ValidationError("HittingCdf: tail target must lie in (0, 1/2)");
  if (table_size < 16) throw ValidationError("HittingCdf: table size must be >= 16");
  double x = 40.0 * scale_;
  for (;;) {
    HittingProfile prof(p, lv, x);
    tail_ = 1.0 - prof.cdf_1d(x);
    if (tail_ <= tail_target || x >= 1e4 * scale_) {
      x_max_ = x;
      theta_max_ = std::atan(x / scale_);
      table_.resize(table_size + 1);
      for (int j = 0; j <= table_size; ++j) {
        const double t = theta_max_ * j / table_size;
        table_[j] = j == table_size ? prof.cdf_1d(x) : prof.cdf_1d(scale_ * std::tan(t));
      }
      table_[0] = 0.5;
      for (int j = 1; j <= table_size; ++j) table_[j] = std::clamp(std::max(table_[j], table_[j - 1]), 0.5, 1.0);
      tail_ = std::max(tail_, 0.0);
      return;
    }
    x *= 2.0;
  }
}

double HittingCdf::operator()(double x) const {
  if (std::isnan(x)) throw DomainError("HittingCdf: x is NaN");
  const double theta = std::atan(std::abs(x) / scale_);
  double upper;
  if (theta <= theta_max_) {
    const double pos = theta / theta_max_ * (table_.size() - 1);
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(pos), table_.size() - 2);
    const double f = pos - j;
    upper = table_[j] + f * (table_[j + 1] - table_[j]);
  } else {
    const double top = table_.back();
    upper = top + (1.0 - top) * (theta - theta_max_) / (0.5 * kPi - theta_max_);
  }
  return x >= 0.0 ? upper : 1.0 - upper;
}

RadialTable::RadialTable(double step, std::vector<double> values) : step_(step), values_(std::move(values)) {
  if (!(step > 0.0) || values_.size() < 4) throw ValidationError("RadialTable: step > 0 and >= 4 values required");
}

double RadialTable::operator()(double r) const {
  r = std::abs(r);
  const double pos = r / step_;
  const long last = static_cast<long>(values_.size()) - 1;
  if (pos > last * (1.0 + 1e-12)) throw DomainError("RadialTable: r beyond the table");
  long j = std::clamp(static_cast<long>(pos), 0L, last - 2);
  const double t = pos - j;
  if (t == 0.0) return values_[j];
  // Nodes j-1 .. j+2; evenness supplies the value at -step.
  auto v = [&](long k) { return values_[std::abs(k)]; };
  const double a = v(j - 1), b = v(j), c = v(j + 1), d = v(j + 2);
  return -a * t * (t - 1) * (t - 2) / 6 + b * (t + 1) * (t - 1) * (t - 2) / 2 - c * (t + 1) * t * (t - 2) / 2 +
         d * (t + 1) * t * (t - 1) / 6;
}

RadialTable tabulate_density(const HittingProfile& profile, int count, int workers) {
  if (count < 4) throw ValidationError("tabulate_density: count must be >= 4");
  const double step = profile.r_max() / (count - 1);
  std::vector<double> values(count);
  parallel_for(values.size(), workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) values[j] = profile.density(std::min(j * step, profile.r_max()));
  });
  return RadialTable(step, std::move(values));
}

// --- physical-space identities ---------------------------------------------------

quad::QuadResult hitting_mass(const ModelParams& p, const LevelPair& lv) {
  const int n = p.n();
  const double R = kReach * lv.gap();
  const HittingProfile prof(p, lv, R);
  auto body = quad::integrate([&](double r) { return std::pow(r, n - 1) * prof.density(r); }, 0.0, R, 1e-10, 1e-10);
  const double omega = surface_area(n);
  // G ~ C r^{-(a+n+1)}: int_R^inf r^{n-1} G dr = G(R) R^n / (a+1).
  const double tail = prof.density(R) * std::pow(R, n) / (p.alpha() + 1.0);
  quad::QuadResult out = body;
  out.value = omega * (body.value + tail);
  out.error = omega * (body.error + std::abs(tail));
  return out;
}

quad::QuadResult hitting_reconstruction(const ModelParams& p, const LevelPair& lv, const Eigen::VectorXd& x) {
  const int n = p.n();
  if (n > 2) throw ValidationError("hitting_reconstruction: supports n <= 2");
  if (x.size() != n || !x.allFinite()) throw ValidationError("hitting_reconstruction: x must be finite with dimension n");
  const double xn = x.norm();
  const double eta = lv.eta();
  const double R = kReach * lv.gap() + xn;
  const HittingProfile prof(p, lv, R);
  const double gR = prof.density(R);
  const double a = p.alpha();
  auto K = [&](double d2) { return poisson_kernel_raw(p, d2, eta); };
  quad::QuadResult out;
  if (n == 1) {
    const double x1 = x(0);
    auto f = [&](double z) { return prof.density(std::abs(z)) * K((x1 - z) * (x1 - z)); };
    std::vector<double> cuts = {-R, 0.0, x1, R};
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      out += quad::integrate(f, cuts[i], cuts[i + 1], 1e-13, 1e-11);
    // Power-law tail beyond |z| = R, with z = R / t.
    auto tail = quad::tanh_sinh_simple(
        [&](double t) {
          const double z = R / t;
          return std::pow(t, a) * (K((x1 - z) * (x1 - z)) + K((x1 + z) * (x1 + z)));
        },
        0.0, 1.0, 1e-8);
    out.value += gR * R * tail.value;
    out.error += std::abs(gR * R * tail.value);
  } else {
    // Angular average of K_eta over the circle |z| = rho around x.
    auto ring = [&](double rho) {
      auto inner = quad::integrate(
          [&](double phi) { return K(xn * xn + rho * rho - 2.0 * xn * rho * std::cos(phi)); }, 0.0, kPi, 1e-15,
          1e-11);
      return 2.0 * inner.value;
    };
    auto f = [&](double rho) { return rho * prof.density(rho) * ring(rho); };
    std::vector<double> cuts = {0.0, xn, R};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) out += quad::integrate(f, cuts[i], cuts[i + 1], 1e-13, 1e-11);
    auto tail = quad::tanh_sinh_simple([&](double t) { return std::pow(t, a) * ring(R / t); }, 0.0, 1.0, 1e-8);
    out.value += gR * R * R * tail.value;
    out.error += std::abs(gR * R * R * tail.value);
  }
  return out;
}

double semigroup_check(const ModelParams& p, double y, double eta2, double eta1, const SemigroupGrid& grid,
                       int workers) {
  const int n = p.n();
  if (n > 2) throw ValidationError("semigroup_check: supports n <= 2");
  if (!(0.0 < eta1 && eta1 < eta2 && eta2 < y)) throw DomainError("semigroup_check: requires 0 < eta1 < eta2 < y");
  if (!(grid.spacing > 0.0) || !(grid.half_width >= 4.0 * grid.spacing))
    throw ValidationError("semigroup_check: spacing > 0 and half_width >= 4 spacing required");
  const double h = grid.spacing;
  const long N = std::lround(grid.half_width / h);
  const LevelPair whole(y, eta1), upper(y, eta2), lower(eta2, eta1);

  // Radial tables: for n = 1 their nodes are exactly the grid offsets.
  auto table = [&](const LevelPair& lv, double reach) {
    const long cells = n == 1 ? std::lround(reach / h) : std::lround(4.0 * reach / h);
    const double r_max = n == 1 ? cells * h : reach * std::sqrt(2.0);
    return tabulate_density(HittingProfile(p, lv, r_max), static_cast<int>(cells) + 1, workers);
  };
  const RadialTable g_whole = table(whole, N * h);
  const RadialTable g_upper = table(upper, 2.0 * N * h);
  const RadialTable g_lower = table(lower, N * h);

  // Linear convolution of the trapezoid-weighted lower kernel on [-N, N]^n with
  // the upper kernel on [-2N, 2N]^n; output offset i sits at index i + 3N.
  const long Ma = 2 * N + 1, Mb = 4 * N + 1;
  const int L = detail::good_fft_size(static_cast<int>(Ma + Mb - 1));
  const Eigen::VectorXi dims = Eigen::VectorXi::Constant(n, L);
  const std::size_t total = n == 1 ? L : static_cast<std::size_t>(L) * L;
  std::vector<detail::Complex> A(total), B(total);
  auto flat = [&](long i0, long i1) { return n == 1 ? static_cast<std::size_t>(i0) : static_cast<std::size_t>(i0) * L + i1; };
  const long span1 = n == 1 ? 1 : Ma;
  for (long i0 = 0; i0 < Ma; ++i0)
    for (long i1 = 0; i1 < span1; ++i1) {
      const double d0 = (i0 - N) * h, d1 = n == 1 ? 0.0 : (i1 - N) * h;
      double w = std::pow(h, n);
      if (i0 == 0 || i0 == Ma - 1) w *= 0.5;
      if (n == 2 && (i1 == 0 || i1 == Ma - 1)) w *= 0.5;
      A[flat(i0, i1)] = w * g_lower(std::hypot(d0, d1));
    }
  const long spanb = n == 1 ? 1 : Mb;
  for (long i0 = 0; i0 < Mb; ++i0)
    for (long i1 = 0; i1 < spanb; ++i1) {
      const double d0 = (i0 - 2 * N) * h, d1 = n == 1 ? 0.0 : (i1 - 2 * N) * h;
      B[flat(i0, i1)] = g_upper(std::hypot(d0, d1));
    }
  detail::fftn(A, dims, false);
  detail::fftn(B, dims, false);
  for (std::size_t k = 0; k < total; ++k) A[k] *= B[k];
  detail::fftn(A, dims, true);

  double worst = 0.0;
  const long half = N / 2;
  const long span_out = n == 1 ? 0 : half;
  for (long i0 = -half; i0 <= half; ++i0)
    for (long i1 = -span_out; i1 <= span_out; ++i1) {
      const double conv = A[flat(i0 + 3 * N, n == 1 ? 0 : i1 + 3 * N)].real();
      const double left = g_whole(std::hypot(i0 * h, i1 * h));
      worst = std::max(worst, std::abs(left - conv));
    }
  return worst;
}

double fourier_semigroup_deviation(const ModelParams& p, double y, double eta2, double eta1,
                                   const std::vector<double>& xi_list) {
  if (!(0.0 < eta1 && eta1 < eta2 && eta2 < y))
    throw DomainError("fourier_semigroup_deviation: requires 0 < eta1 < eta2 < y");
  const LevelPair whole(y, eta1), upper(y, eta2), lower(eta2, eta1);
  double worst = 0.0;
  for (double xi : xi_list)
    worst = std::max(worst, std::abs(hitting_ft(p, whole, xi) - hitting_ft(p, upper, xi) * hitting_ft(p, lower, xi)));
  return worst;
}

}  // namespace gasp
