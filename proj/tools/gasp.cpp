// gasp: command-line front end of the library.
//
// Exit codes: 0 success, 2 invalid input (JSON error on stderr), 3 numerical
// nonconvergence (JSON diagnostics on stderr).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "emit.hpp"
#include "gasp/boundary_data.hpp"
#include "gasp/extension.hpp"
#include "gasp/growth.hpp"
#include "gasp/hbm_sim.hpp"
#include "gasp/hitting.hpp"
#include "gasp/kernel.hpp"
#include "gasp/spectral.hpp"

using namespace gasp;
using cli::Output;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Globals {
  double alpha = kUnset;
  int n = 1;
  std::string config;
  int workers = 1;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format = "csv";
  double rel_tol = 1e-10;
};

Globals g;

ModelParams params() {
  if (std::isnan(g.alpha)) throw ValidationError("--alpha is required (flag or config file)");
  return ModelParams(g.alpha, g.n);
}

EvalAccuracy accuracy() { return EvalAccuracy(g.rel_tol, 0.0); }

Eigen::VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

Eigen::VectorXd point_x(const std::vector<double>& x) {
  if (x.empty()) return Eigen::VectorXd::Zero(g.n);
  if (static_cast<int>(x.size()) != g.n) throw ValidationError("--x must have n components");
  return vec(x);
}

void require_positive(double v, const char* name) {
  if (std::isnan(v)) throw ValidationError(std::string(name) + " is required");
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite and > 0");
}

std::uint64_t resolve_seed(const CLI::App& app) {
  if (app.get_option("--seed")->count() > 0) return g.seed;
  if (const char* env = std::getenv("GASP_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ValidationError("GASP_SEED must be an unsigned integer");
    return v;
  }
  return g.seed;
}

void emit(const Output& out) {
  const auto fmt = g.format == "json" ? cli::Format::json : cli::Format::csv;
  const std::string text = cli::render(out, fmt);
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write output file: " + g.out);
  f << text;
}

void error_json(const std::string& kind, const std::string& message, const nlohmann::json& extra = {}) {
  nlohmann::json j = {{"error", kind}, {"message", message}};
  if (extra.is_object())
    for (auto& [k, v] : extra.items()) j[k] = v;
  std::cerr << j.dump() << "\n";
}

// Config file values fill options that were not given on the command line.
void apply_config(CLI::App& app, const std::vector<CLI::App*>& chain) {
  if (g.config.empty()) return;
  std::ifstream in(g.config);
  if (!in) throw ValidationError("cannot open config file: " + g.config);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config file must hold a JSON object");
  for (auto& [key, value] : doc.items()) {
    if (key == "config") throw ValidationError("config: nested config files are not supported");
    CLI::Option* opt = nullptr;
    for (auto it = chain.rbegin(); it != chain.rend() && !opt; ++it) opt = (*it)->get_option_no_throw("--" + key);
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt) throw SchemaError(key, "unknown config key for this command");
    if (opt->count() > 0) continue;
    auto as_text = [&](const nlohmann::json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
      if (v.is_number_integer()) return v.dump();
      if (v.is_number()) return cli::format_real(v.get<double>(), 17);
      throw SchemaError(key, "expected a scalar or an array of scalars");
    };
    if (value.is_array()) {
      for (const auto& v : value) opt->add_result(as_text(v));
    } else {
      opt->add_result(as_text(value));
    }
    opt->run_callback();
  }
}

// --- commands -------------------------------------------------------------------

struct KernelArgs {
  double y = kUnset;
  std::vector<double> x;
  std::vector<int> beta;
  std::vector<double> h;
} ka;

void cmd_kernel_eval() {
  const ModelParams p = params();
  require_positive(ka.y, "--y");
  const HalfSpacePoint pt(point_x(ka.x), ka.y);
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  out.set("y", ka.y);
  if (ka.beta.empty()) {
    out.set("value", poisson_kernel(p, pt));
  } else {
    if (static_cast<int>(ka.beta.size()) != p.n()) throw ValidationError("--beta must have n components");
    Eigen::VectorXi b(p.n());
    for (int i = 0; i < p.n(); ++i) b(i) = ka.beta[i];
    out.set("value", kernel_derivative(p, MultiIndex(b), pt));
  }
  emit(out);
}

void cmd_kernel_mass() {
  const ModelParams p = params();
  require_positive(ka.y, "--y");
  const auto m = kernel_mass(p, ka.y, accuracy());
  if (!m.converged) throw NonConvergenceError("kernel_mass did not converge", m.value, m.error);
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  out.set("y", ka.y);
  out.set("mass", m.value);
  out.set("error", m.error);
  emit(out);
}

void cmd_kernel_residual() {
  const ModelParams p = params();
  require_positive(ka.y, "--y");
  const HalfSpacePoint pt(point_x(ka.x), ka.y);
  std::vector<double> hs = ka.h;
  if (hs.empty()) hs = {default_residual_step(pt), default_residual_step(pt) / 2, default_residual_step(pt) / 4};
  Evaluator u = [&](const HalfSpacePoint& q) { return poisson_kernel(p, q); };
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  out.set("y", ka.y);
  out.columns = {"h", "residual", "order"};
  double prev_h = 0.0, prev_r = 0.0;
  for (double h : hs) {
    const double r = dalpha_residual(u, p, pt, h);
    const double order = prev_h > 0.0 ? std::log(std::abs(prev_r / r)) / std::log(prev_h / h) : kUnset;
    out.rows.push_back({h, r, order});
    prev_h = h;
    prev_r = r;
  }
  emit(out);
}

struct FourierArgs {
  double y = kUnset;
  std::vector<double> xi;
} fa;

void cmd_fourier_compare() {
  const ModelParams p = params();
  require_positive(fa.y, "--y");
  if (fa.xi.empty()) throw ValidationError("--xi requires at least one value");
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  out.set("y", fa.y);
  out.columns = {"xi", "closed_form", "integral_rep", "direct", "rel_integral", "rel_direct"};
  for (double xi : fa.xi) {
    if (!(xi > 0.0)) throw ValidationError("--xi values must be > 0");
    const double closed = ft_closed_form(p, fa.y, xi);
    const double rep = ft_integral_rep(p, fa.y, xi, accuracy()).value;
    double direct = kUnset;
    if (p.n() <= 2) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(p.n());
      v(0) = xi;
      direct = ft_direct(p, fa.y, v, accuracy()).re;
    }
    out.rows.push_back({xi, closed, rep, direct, std::abs(rep - closed) / closed, std::abs(direct - closed) / closed});
  }
  emit(out);
}

struct ExtendArgs {
  std::string data;
  double y = kUnset;
  std::vector<double> y_list;
  std::vector<double> origin;
  double spacing = kUnset;
  std::vector<int> shape;
} ea;

BoundaryData load_checked(const ModelParams& p) {
  if (ea.data.empty()) throw ValidationError("--data is required");
  BoundaryData d = load_data(ea.data);
  if (d.n() != p.n()) throw ValidationError("data file dimension differs from --n");
  return d;
}

void cmd_extend() {
  const ModelParams p = params();
  require_positive(ea.y, "--y");
  const BoundaryData data = load_checked(p);
  GridSpec grid;
  if (static_cast<int>(ea.origin.size()) != p.n() || static_cast<int>(ea.shape.size()) != p.n())
    throw ValidationError("--origin and --shape must have n components");
  require_positive(ea.spacing, "--spacing");
  grid.origin = vec(ea.origin);
  grid.spacing = ea.spacing;
  grid.shape = Eigen::Map<const Eigen::VectorXi>(ea.shape.data(), p.n());
  grid.validate();
  const auto res = extend_grid(data, p, ea.y, grid, g.workers);
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  out.set("y", ea.y);
  out.set("quadrature_error_estimate", res.quadrature_error_estimate);
  out.set("used_fast_path", res.used_fast_path);
  out.set("incommensurate_fallback", res.incommensurate_fallback);
  out.set("coarse_spacing", res.coarse_spacing);
  for (int i = 0; i < p.n(); ++i) out.columns.push_back("x" + std::to_string(i + 1));
  out.columns.push_back("y");
  out.columns.push_back("u");
  out.columns.push_back("err_estimate");
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    std::vector<cli::Value> row;
    const Eigen::VectorXd x = grid.point(j);
    for (int i = 0; i < p.n(); ++i) row.emplace_back(x(i));
    row.emplace_back(ea.y);
    row.emplace_back(res.values(j));
    row.emplace_back(res.errors(j));
    out.rows.push_back(std::move(row));
  }
  emit(out);
}

void cmd_converge() {
  const ModelParams p = params();
  const BoundaryData data = load_checked(p);
  std::vector<double> ys = ea.y_list;
  if (ys.empty()) ys = {1.0, 0.25, 0.0625, 0.015625};
  const auto recs = boundary_convergence(data, p, ys);
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  bool decreasing = true;
  for (std::size_t i = 1; i < recs.size(); ++i) decreasing = decreasing && recs[i].error < recs[i - 1].error;
  out.set("decreasing", decreasing);
  out.set("ratio_last_first", recs.back().error / recs.front().error);
  out.columns = {"y", "error", "tail_bound"};
  for (const auto& r : recs) out.rows.push_back({r.y, r.error, r.tail_bound});
  emit(out);
}

struct DataArgs {
  double radius = 1.0;
  double height = 1.0;
  int per_radius = 32;
  std::vector<double> center;
  bool unit_mass = false;
} da;

void cmd_data_tent() {
  const ModelParams p = params();
  Eigen::VectorXd c = da.center.empty() ? Eigen::VectorXd::Zero(p.n()) : vec(da.center);
  if (c.size() != p.n()) throw ValidationError("--center must have n components");
  double height = da.height;
  if (da.unit_mass) {
    // Mass of the radial tent: omega_{n-1} r^n / (n (n+1)).
    const double omega = 2.0 * std::pow(M_PI, 0.5 * p.n()) / std::tgamma(0.5 * p.n());
    height = p.n() * (p.n() + 1.0) / (omega * std::pow(da.radius, p.n()));
  }
  const BoundaryData d{p, {tent_term(c, da.radius, height, da.per_radius)}};
  const std::string text = to_json(d) + "\n";
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw ValidationError("cannot write output file: " + g.out);
    f << text;
  }
}

struct HittingArgs {
  double y = kUnset;
  double eta = kUnset;
  double eta2 = kUnset;
  std::vector<double> x;
  double spacing = 0.02;
  double half_width = 40.0;
  std::vector<double> xi;
} ha;

void cmd_hitting_kernel() {
  const ModelParams p = params();
  require_positive(ha.y, "--y");
  require_positive(ha.eta, "--eta");
  const LevelPair lv(ha.y, ha.eta);
  std::vector<double> xs = ha.x;
  if (xs.empty()) xs = {0.0, 0.5, 1.0, 2.0, 4.0};
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  out.set("y", ha.y);
  out.set("eta", ha.eta);
  out.columns = {"x_norm", "G", "error", "clipped"};
  for (double x : xs) {
    const auto v = hitting_kernel_detail(p, lv, x, accuracy());
    out.rows.push_back({x, v.value, v.error, v.clipped});
  }
  emit(out);
}

void cmd_hitting_semigroup() {
  const ModelParams p = params();
  require_positive(ha.y, "--y");
  require_positive(ha.eta, "--eta");
  require_positive(ha.eta2, "--eta2");
  std::vector<double> xi = ha.xi;
  if (xi.empty())
    for (int i = 0; i <= 400; ++i) xi.push_back(0.1 * i);
  const double phys = semigroup_check(p, ha.y, ha.eta2, ha.eta, {ha.spacing, ha.half_width}, g.workers);
  const double four = fourier_semigroup_deviation(p, ha.y, ha.eta2, ha.eta, xi);
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  out.set("y", ha.y);
  out.set("eta2", ha.eta2);
  out.set("eta1", ha.eta);
  out.set("spacing", ha.spacing);
  out.set("half_width", ha.half_width);
  out.set("physical_deviation", phys);
  out.set("fourier_deviation", four);
  emit(out);
}

struct SimArgs {
  double y = 1.0;
  double eta = kUnset;
  long paths = 100000;
  double dt = 1e-3;
  double y_floor = 0.0;
  std::string samples;
} sa;

SimConfig sim_config(const CLI::App& app) {
  SimConfig c{params(), HalfSpacePoint(Eigen::VectorXd::Zero(g.n), sa.y)};
  c.dt = sa.dt;
  c.n_paths = sa.paths;
  c.master_seed = resolve_seed(app);
  c.workers = g.workers;
  c.y_floor = sa.y_floor;
  return c;
}

void write_samples(const SimConfig& c) {
  if (sa.samples.empty()) return;
  const auto set = simulate_paths(c);
  Output s;
  s.columns = {"stop_time"};
  for (int i = 0; i < set.n; ++i) s.columns.push_back("x" + std::to_string(i + 1));
  for (long k = 0; k < set.size(); ++k) {
    std::vector<cli::Value> row{set.stop_times[k]};
    for (int i = 0; i < set.n; ++i) row.emplace_back(set.coordinate(k, i));
    s.rows.push_back(std::move(row));
  }
  std::ofstream f(sa.samples, std::ios::binary);
  if (!f) throw ValidationError("cannot write samples file: " + sa.samples);
  f << cli::render(s, cli::Format::csv);
}

void report(const LawReport& r, const char* mode) {
  Output out;
  out.set("mode", std::string(mode));
  out.set("alpha", g.alpha);
  out.set("n", static_cast<long long>(g.n));
  out.set("ks", r.ks);
  out.set("threshold", r.threshold);
  out.set("floor_allowance", r.floor_allowance);
  out.set("cdf_tail", r.cdf_tail);
  out.set("n_paths", static_cast<long long>(r.n_paths));
  out.set("dt", r.dt);
  out.set("seed", std::to_string(r.seed));
  out.set("pass", r.pass);
  emit(out);
}

void cmd_simulate_boundary(const CLI::App& app) {
  SimConfig c = sim_config(app);
  const auto r = validate_boundary_law(c);
  write_samples(c);
  report(r, "boundary");
}

void cmd_simulate_hitting(const CLI::App& app) {
  require_positive(sa.eta, "--eta");
  SimConfig c = sim_config(app);
  c.y_stop = sa.eta;
  const auto r = validate_hitting_law(c);
  write_samples(c);
  report(r, "hitting");
}

struct GrowthArgs {
  std::string data;
  std::vector<double> r;
  int theta_count = 64;
  int m = 0;
  bool null_solution = false;
  std::string kind = "A";
  double beta = 0.0;
  double gamma = 0.0;
  int k_max = 10;
} ga;

void cmd_growth_scan() {
  const ModelParams p = params();
  std::vector<double> rs = ga.r;
  if (rs.empty())
    for (int k = 0; k <= 8; ++k) rs.push_back(4.0 * std::pow(10.0, k / 4.0));
  GrowthScan scan;
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  if (ga.null_solution) {
    Evaluator u = [a = p.alpha()](const HalfSpacePoint& pt) { return std::pow(pt.y, a + 1.0); };
    scan = sphere_sup_scan(u, p, ga.m, rs, ga.theta_count, g.workers);
    out.set("evaluator", std::string("null_solution"));
  } else {
    BoundaryData data{p, {}};
    if (ga.data.empty()) {
      const double omega = 2.0 * std::pow(M_PI, 0.5 * p.n()) / std::tgamma(0.5 * p.n());
      data.terms.push_back(tent_term(Eigen::VectorXd::Zero(p.n()), 1.0, p.n() * (p.n() + 1.0) / omega, 32));
    } else {
      data = load_data(ga.data);
      if (data.n() != p.n()) throw ValidationError("data file dimension differs from --n");
    }
    if (ga.m != 0) throw ValidationError("--m applies to the null-solution scan only");
    scan = l1_data_scan(data, p, rs, ga.theta_count, g.workers);
    const auto v = assess_decay(scan, support_radius(data));
    out.set("evaluator", std::string("poisson_integral"));
    out.set("monotone", v.monotone);
    out.set("decade_ratio", v.decade_ratio);
    out.set("pass", v.pass);
  }
  out.columns = {"r", "theta_argmax", "M"};
  for (const auto& rec : scan.records) out.rows.push_back({rec.r, rec.theta_argmax, rec.M});
  emit(out);
}

void cmd_growth_counterexample() {
  const ModelParams p = params();
  SharpnessCase c = ga.kind == "A" ? SharpnessCase::subcritical(ga.beta, ga.gamma) : SharpnessCase::critical(ga.gamma);
  const auto recs = counterexample_track(p, c, ga.k_max);
  const double ut = unit_tent_response(p);
  Output out;
  out.set("alpha", p.alpha());
  out.set("n", static_cast<long long>(p.n()));
  out.set("case", ga.kind);
  out.set("beta", c.beta_exponent(p));
  out.set("gamma", c.gamma);
  out.set("u_tilde", ut);
  bool pass = true;
  for (const auto& r : recs)
    if (r.k >= 4) pass = pass && r.log_ratio >= std::log(0.5 * ut);
  out.set("pass", pass);
  out.columns = {"k", "a", "rho", "log_ratio", "ratio", "bump_response"};
  for (const auto& r : recs)
    out.rows.push_back({static_cast<long long>(r.k), r.a, r.rho, r.log_ratio, r.ratio, r.bump_response});
  emit(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gasp: weighted half-space Poisson kernels, hitting densities and growth scans"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--alpha", g.alpha, "Weight exponent alpha > -1");
  app.add_option("--n", g.n, "Boundary dimension n >= 1")->capture_default_str();
  app.add_option("--config", g.config, "JSON file of option values (flags take precedence)");
  app.add_option("--workers", g.workers, "Worker threads (results do not depend on it)")->capture_default_str();
  app.add_option("--seed", g.seed, "Master seed (falls back to GASP_SEED, then 0)");
  app.add_option("--out", g.out, "Output file, - for stdout")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--rel-tol", g.rel_tol, "Relative tolerance of quadratures")->capture_default_str();

  std::function<void()> action;

  auto* kernel = app.add_subcommand("kernel", "Kernel evaluation, mass and PDE residual");
  kernel->require_subcommand(1);
  auto* k_eval = kernel->add_subcommand("eval", "K_{a,y}(x) or its x-derivative");
  k_eval->add_option("--y", ka.y, "Height y > 0");
  k_eval->add_option("--x", ka.x, "Point x (n comma-separated values; default 0)")->delimiter(',');
  k_eval->add_option("--beta", ka.beta, "Derivative multi-index (n values)")->delimiter(',');
  k_eval->callback([&] { action = cmd_kernel_eval; });
  auto* k_mass = kernel->add_subcommand("mass", "Integral of K_{a,y} over R^n");
  k_mass->add_option("--y", ka.y, "Height y > 0");
  k_mass->callback([&] { action = cmd_kernel_mass; });
  auto* k_res = kernel->add_subcommand("residual", "Finite-difference D_a K at one point");
  k_res->add_option("--y", ka.y, "Height y > 0");
  k_res->add_option("--x", ka.x, "Point x (n values; default 0)")->delimiter(',');
  k_res->add_option("--step", ka.h, "Steps (default y/100, y/200, y/400)")->delimiter(',');
  k_res->callback([&] { action = cmd_kernel_residual; });

  auto* fourier = app.add_subcommand("fourier", "Fourier transform of the kernel");
  fourier->require_subcommand(1);
  auto* f_cmp = fourier->add_subcommand("compare", "Closed form, integral representation and direct transform");
  f_cmp->add_option("--y", fa.y, "Height y > 0");
  f_cmp->add_option("--xi", fa.xi, "Frequencies |xi|")->delimiter(',');
  f_cmp->callback([&] { action = cmd_fourier_compare; });

  auto* ext = app.add_subcommand("extend", "Poisson integral of boundary data on an x-grid");
  ext->add_option("--data", ea.data, "Boundary data JSON file");
  ext->add_option("--y", ea.y, "Height y > 0");
  ext->add_option("--origin", ea.origin, "Output grid origin")->delimiter(',');
  ext->add_option("--spacing", ea.spacing, "Output grid spacing");
  ext->add_option("--shape", ea.shape, "Output grid shape")->delimiter(',');
  ext->callback([&] { action = cmd_extend; });

  auto* conv = app.add_subcommand("converge", "Weighted L1 distance between u(., y) and the data");
  conv->add_option("--data", ea.data, "Boundary data JSON file (beta = 0 terms)");
  conv->add_option("--y-list", ea.y_list, "Strictly decreasing heights (default 1,1/4,1/16,1/64)")->delimiter(',');
  conv->callback([&] { action = cmd_converge; });

  auto* data = app.add_subcommand("data", "Boundary data generators");
  data->require_subcommand(1);
  auto* d_tent = data->add_subcommand("tent", "Radial tent on a uniform grid");
  d_tent->add_option("--radius", da.radius, "Tent radius")->capture_default_str();
  d_tent->add_option("--height", da.height, "Tent height")->capture_default_str();
  d_tent->add_option("--per-radius", da.per_radius, "Grid steps per radius")->capture_default_str();
  d_tent->add_option("--center", da.center, "Center (default 0)")->delimiter(',');
  d_tent->add_flag("--unit-mass", da.unit_mass, "Scale the height to total mass 1");
  d_tent->callback([&] { action = cmd_data_tent; });

  auto* hit = app.add_subcommand("hitting", "Hitting density of a lower level");
  hit->require_subcommand(1);
  auto* h_ker = hit->add_subcommand("kernel", "G_{a,y}(eta) at radii |x|");
  h_ker->add_option("--y", ha.y, "Starting height");
  h_ker->add_option("--eta", ha.eta, "Target level 0 < eta < y");
  h_ker->add_option("--x", ha.x, "Radii |x| (default 0,0.5,1,2,4)")->delimiter(',');
  h_ker->callback([&] { action = cmd_hitting_kernel; });
  auto* h_sg = hit->add_subcommand("semigroup", "G_y(eta1) against G_y(eta2) * G_eta2(eta1)");
  h_sg->add_option("--y", ha.y, "Starting height");
  h_sg->add_option("--eta2", ha.eta2, "Intermediate level");
  h_sg->add_option("--eta", ha.eta, "Final level eta1 < eta2");
  h_sg->add_option("--spacing", ha.spacing, "Grid spacing")->capture_default_str();
  h_sg->add_option("--half-width", ha.half_width, "Grid half-width")->capture_default_str();
  h_sg->add_option("--xi", ha.xi, "Frequencies for the Fourier-side check (default 0:0.1:40)")->delimiter(',');
  h_sg->callback([&] { action = cmd_hitting_semigroup; });

  auto* sim = app.add_subcommand("simulate", "Monte Carlo laws of hyperbolic Brownian motion (n = 1)");
  sim->require_subcommand(1);
  auto add_sim = [&](CLI::App* c) {
    c->add_option("--y", sa.y, "Starting height")->capture_default_str();
    c->add_option("--paths", sa.paths, "Number of paths")->capture_default_str();
    c->add_option("--dt", sa.dt, "Time step")->capture_default_str();
    c->add_option("--samples", sa.samples, "Optional CSV dump of stop times and positions");
  };
  auto* s_bnd = sim->add_subcommand("boundary", "KS test of the boundary limit against K_{a,y}");
  add_sim(s_bnd);
  s_bnd->add_option("--y-floor", sa.y_floor, "Stopping floor (default 1e-4 y)");
  s_bnd->callback([&] { action = [&] { cmd_simulate_boundary(app); }; });
  auto* s_hit = sim->add_subcommand("hitting", "KS test of the level-hitting position against G");
  add_sim(s_hit);
  s_hit->add_option("--eta", sa.eta, "Level 0 < eta < y");
  s_hit->callback([&] { action = [&] { cmd_simulate_hitting(app); }; });

  auto* growth = app.add_subcommand("growth", "Hemisphere growth scans");
  growth->require_subcommand(1);
  auto* g_scan = growth->add_subcommand("scan", "M(r) for a Poisson integral or the null solution");
  g_scan->add_option("--data", ga.data, "Boundary data JSON (default unit-mass tent)");
  g_scan->add_option("--r", ga.r, "Increasing radii (default 4 to 400, 4 per decade)")->delimiter(',');
  g_scan->add_option("--theta-count", ga.theta_count, "Angles per radius (>= 16)")->capture_default_str();
  g_scan->add_option("--m", ga.m, "Extra cosine power (null solution only)")->capture_default_str();
  g_scan->add_flag("--null-solution", ga.null_solution, "Scan u = y^(alpha+1)");
  g_scan->callback([&] { action = cmd_growth_scan; });
  auto* g_ce = growth->add_subcommand("counterexample", "Ratios along the sharpness bump sequence");
  g_ce->add_option("--case", ga.kind, "A (beta + gamma < alpha+n+1) or B (critical)")
      ->check(CLI::IsMember({"A", "B"}))
      ->capture_default_str();
  g_ce->add_option("--beta", ga.beta, "Radial exponent (case A)")->capture_default_str();
  g_ce->add_option("--gamma", ga.gamma, "Cosine exponent")->capture_default_str();
  g_ce->add_option("--k-max", ga.k_max, "Number of bumps (<= 12)")->capture_default_str();
  g_ce->callback([&] { action = cmd_growth_counterexample; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_json("validation", e.what());
    return 2;
  }

  try {
    std::vector<CLI::App*> chain;
    for (CLI::App* c = &app; !c->get_subcommands().empty();) {
      c = c->get_subcommands().front();
      chain.push_back(c);
    }
    apply_config(app, chain);
    if (g.workers < 1) throw ValidationError("--workers must be >= 1");
    if (g.n < 1) throw ValidationError("--n must be >= 1");
    if (!action) throw ValidationError("no command selected");
    action();
  } catch (const SchemaError& e) {
    error_json("validation", e.what(), {{"path", e.path()}});
    return 2;
  } catch (const NonConvergenceError& e) {
    error_json("nonconvergence", e.what(), {{"estimate", e.estimate()}, {"error_bound", e.error()}});
    return 3;
  } catch (const std::invalid_argument& e) {
    error_json("validation", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    error_json("validation", e.what());
    return 2;
  } catch (const CLI::ParseError& e) {
    error_json("validation", e.what());
    return 2;
  } catch (const std::exception& e) {
    error_json("failure", e.what());
    return 1;
  }
  return 0;
}
