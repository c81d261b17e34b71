#include "gasp/hbm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gasp/hitting.hpp"
#include "gasp/kernel.hpp"
#include "gasp/parallel.hpp"
#include "gasp/quadrature.hpp"

namespace gasp {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Standard normals of one path. Block b of the path yields two normals from
// one Philox call with counter (b lo, b hi, path lo, path hi).
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path)),
        path_hi_(static_cast<std::uint32_t>(path >> 32)) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto r = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                               path_lo_, path_hi_},
                              key_);
    ++block_;
    // 53-bit uniforms; u1 in (0, 1] keeps the logarithm finite.
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32 | r[1]) >> 11;
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32 | r[3]) >> 11;
    const double u1 = (static_cast<double>(a) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b) * 0x1.0p-53;
    const double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return rad * std::cos(kTwoPi * u2);
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t path_lo_, path_hi_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

double SimConfig::stop_level() const {
  if (!boundary_mode()) return y_stop;
  return y_floor > 0.0 ? y_floor : 1e-4 * start.y;
}

void SimConfig::validate() const {
  if (start.x.size() != p.n()) throw ValidationError("simulation: start point dimension differs from n");
  if (!(dt > 0.0 && dt <= 1e-2)) throw ValidationError("simulation: dt must lie in (0, 1e-2]");
  if (n_paths < 1) throw ValidationError("simulation: n_paths must be >= 1");
  if (workers < 1) throw ValidationError("simulation: workers must be >= 1");
  if (!(y_stop >= 0.0) || !std::isfinite(y_stop)) throw ValidationError("simulation: y_stop must be finite and >= 0");
  if (boundary_mode()) {
    if (!(y_floor >= 0.0 && y_floor <= start.y / 100.0))
      throw ValidationError("simulation: y_floor must lie in (0, y0/100]");
  } else if (!(y_stop < start.y)) {
    throw ValidationError("simulation: y_stop must be below the starting height");
  }
}

std::vector<double> HitSampleSet::coordinate_column(int axis) const {
  if (axis < 0 || axis >= n) throw ValidationError("coordinate_column: axis out of range");
  std::vector<double> out(stop_times.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = positions[i * n + axis];
  return out;
}

HitSampleSet simulate_paths(const SimConfig& cfg) {
  cfg.validate();
  const int n = cfg.p.n();
  const double mu = cfg.p.mu();
  const double sdt = std::sqrt(cfg.dt);
  const double log_stop = std::log(cfg.stop_level());
  HitSampleSet out;
  out.n = n;
  out.master_seed = cfg.master_seed;
  out.positions.resize(static_cast<std::size_t>(cfg.n_paths) * n);
  out.stop_times.resize(cfg.n_paths);
  out.stop_y.resize(cfg.n_paths);
  parallel_for(static_cast<std::size_t>(cfg.n_paths), cfg.workers, [&](std::size_t b, std::size_t e) {
    std::vector<double> x(n), dx(n);
    for (std::size_t path = b; path < e; ++path) {
      PathStream rng(cfg.master_seed, path);
      for (int i = 0; i < n; ++i) x[i] = cfg.start.x(i);
      double log_y = std::log(cfg.start.y);
      for (long step = 0;; ++step) {
        const double y = std::exp(log_y);
        const double next = log_y + sdt * rng.next() - mu * cfg.dt;
        for (int i = 0; i < n; ++i) dx[i] = y * sdt * rng.next();
        if (next <= log_stop) {
          const double f = (log_y - log_stop) / (log_y - next);
          for (int i = 0; i < n; ++i) out.positions[path * n + i] = x[i] + f * dx[i];
          out.stop_times[path] = (step + f) * cfg.dt;
          out.stop_y[path] = std::exp(log_stop);
          break;
        }
        for (int i = 0; i < n; ++i) x[i] += dx[i];
        log_y = next;
      }
    }
  });
  return out;
}

std::vector<double> simulate_log_y(const SimConfig& cfg, double T) {
  cfg.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("simulate_log_y: T must be finite and > 0");
  const int n = cfg.p.n();
  const long steps = std::lround(T / cfg.dt);
  const double sdt = std::sqrt(cfg.dt);
  std::vector<double> out(cfg.n_paths);
  parallel_for(out.size(), cfg.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t path = b; path < e; ++path) {
      PathStream rng(cfg.master_seed, path);
      double log_y = std::log(cfg.start.y);
      for (long step = 0; step < steps; ++step) {
        log_y += sdt * rng.next() - cfg.p.mu() * cfg.dt;
        for (int i = 0; i < n; ++i) rng.next();
      }
      out[path] = log_y;
    }
  });
  return out;
}

double ks_statistic(const std::vector<double>& s, const std::function<double(double)>& cdf) {
  if (s.empty()) throw ValidationError("ks_statistic: no samples");
  if (!std::is_sorted(s.begin(), s.end())) throw ValidationError("ks_statistic: samples must be sorted");
  const double N = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = cdf(s[i]);
    d = std::max({d, (i + 1) / N - F, F - i / N});
  }
  return std::clamp(d, 0.0, 1.0);
}

Moments sample_moments(const std::vector<double>& v) {
  if (v.size() < 2) throw ValidationError("sample_moments: need at least two values");
  const double N = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= N;
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d2 = (x - mean) * (x - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= N;
  m4 /= N;
  const double var = m2 * N / (N - 1.0);
  return {mean, var, std::sqrt(var / N), std::sqrt(std::max(m4 - m2 * m2, 0.0) / N)};
}

double ks_threshold(long n_paths) { return 1.95 / std::sqrt(static_cast<double>(n_paths)) + 5e-3; }

namespace {

// The boundary-mode sample is X at height y_f; the limit adds an independent
// displacement D with law K_{a,y_f}. For symmetric D,
//   |E F(x + D) - F(x)| <= E min(f1 D^2, 2 fmax |D|, 2) / 2
// with fmax = sup F' and f1 = sup |F''| of the target CDF.
double floor_allowance(const ModelParams& p, double y0, double y_floor) {
  const double fmax = poisson_kernel_raw(p, 0.0, y0);
  const double s = p.s();
  const double xs = y0 / std::sqrt(2.0 * s + 1.0);
  const double f1 = 2.0 * s * xs * poisson_kernel_raw(p, xs * xs, y0) / (xs * xs + y0 * y0);
  // z = y_f tan(u): K_{a,y_f}(z) dz = c cos^a(u) du on (0, pi/2), both signs.
  const auto r = quad::tanh_sinh(
      [&](double u, double, double db) {
        const double z = y_floor * std::tan(u);
        return p.c_norm() * std::pow(std::sin(db), p.alpha()) * std::min({f1 * z * z, 2.0 * fmax * z, 2.0});
      },
      0.0, std::numbers::pi / 2, 1e-8);
  return r.value;  // (2 sides) * (1/2)
}

std::vector<double> sorted_first_coordinate(const HitSampleSet& set) {
  auto v = set.coordinate_column(0);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

LawReport validate_boundary_law(const SimConfig& cfg) {
  if (cfg.p.n() != 1) throw ValidationError("validate_boundary_law: requires n = 1");
  if (!cfg.boundary_mode()) throw ValidationError("validate_boundary_law: requires boundary mode (y_stop = 0)");
  cfg.validate();
  const auto samples = sorted_first_coordinate(simulate_paths(cfg));
  const double x0 = cfg.start.x(0), y0 = cfg.start.y;
  const double ks = ks_statistic(samples, [&](double x) { return kernel_cdf_1d(cfg.p, y0, x - x0); });
  const double allowance = floor_allowance(cfg.p, y0, cfg.stop_level());
  const double threshold = ks_threshold(cfg.n_paths) + allowance;
  return {ks, threshold, allowance, 0.0, cfg.n_paths, cfg.dt, cfg.master_seed, ks <= threshold};
}

LawReport validate_hitting_law(const SimConfig& cfg) {
  if (cfg.p.n() != 1) throw ValidationError("validate_hitting_law: requires n = 1");
  if (cfg.boundary_mode()) throw ValidationError("validate_hitting_law: requires y_stop > 0");
  cfg.validate();
  const LevelPair lv(cfg.start.y, cfg.y_stop);
  const HittingCdf cdf(cfg.p, lv);
  const auto samples = sorted_first_coordinate(simulate_paths(cfg));
  const double x0 = cfg.start.x(0);
  const double ks = ks_statistic(samples, [&](double x) { return cdf(x - x0); });
  const double threshold = ks_threshold(cfg.n_paths);
  return {ks, threshold, 0.0, cdf.tail(), cfg.n_paths, cfg.dt, cfg.master_seed, ks <= threshold};
}

}  // namespace gasp
