#include "gasp/extension.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <optional>

#include "fft_util.hpp"
#include "gasp/parallel.hpp"

namespace gasp {

namespace {

using detail::Complex;
using detail::fftn;
using detail::good_fft_size;

// Kernel or kernel derivative of one term, as a function of (x - eta, y).
class TermKernel {
 public:
  TermKernel(const ModelParams& p, const MultiIndex& beta) : p_(p) {
    if (!beta.is_zero()) deriv_.emplace(p, beta);
  }
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& d, double y) const {
    if (deriv_) return (*deriv_)(d, y);
    return p_.c_norm() * std::pow(y, p_.alpha() + 1.0) * std::exp(-p_.s() * std::log(d.squaredNorm() + y * y));
  }

 private:
  ModelParams p_;
  std::optional<KernelDerivative> deriv_;
};

// Nonzero samples of a term with their fine (spacing h) and coarse (2h, even
// indices only) trapezoid weights folded in.
struct PreparedTerm {
  Eigen::MatrixXd points;  // n x m
  Eigen::VectorXd fine;
  Eigen::VectorXd coarse;
  TermKernel kernel;
};

PreparedTerm prepare(const WeightedTerm& t, const ModelParams& p) {
  const GridSpec& g = t.grid;
  const int n = g.dim();
  Eigen::Index m = 0;
  for (Eigen::Index j = 0; j < t.values.size(); ++j) m += t.values(j) != 0.0;
  PreparedTerm out{Eigen::MatrixXd(n, m), Eigen::VectorXd(m), Eigen::VectorXd(m), TermKernel(p, t.beta)};
  Eigen::VectorXi last_even(n);
  for (int i = 0; i < n; ++i) last_even(i) = (g.shape(i) - 1) - (g.shape(i) - 1) % 2;
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < t.values.size(); ++j) {
    const double v = t.values(j);
    if (v == 0.0) continue;
    const Eigen::VectorXi idx = g.index(j);
    out.points.col(c) = g.origin + g.spacing * idx.cast<double>();
    out.fine(c) = g.trapezoid_weight(j) * v;
    double w = v;
    for (int i = 0; i < n; ++i) {
      if (g.shape(i) == 1) {
        w *= g.spacing;
      } else if (idx(i) % 2 != 0 || idx(i) > last_even(i)) {
        w = 0.0;
        break;
      } else {
        w *= 2.0 * g.spacing * ((idx(i) == 0 || idx(i) == last_even(i)) ? 0.5 : 1.0);
      }
    }
    out.coarse(c) = w;
    ++c;
  }
  return out;
}

PointValue direct_sum(const std::vector<PreparedTerm>& terms, const Eigen::VectorXd& x, double y) {
  double fine = 0.0, coarse = 0.0;
  Eigen::VectorXd d(x.size());
  for (const auto& t : terms) {
    for (Eigen::Index j = 0; j < t.fine.size(); ++j) {
      d = x - t.points.col(j);
      const double k = t.kernel(d, y);
      fine += k * t.fine(j);
      coarse += k * t.coarse(j);
    }
  }
  return {fine, std::abs(fine - coarse)};
}

std::vector<PreparedTerm> prepare_all(const BoundaryData& data, const ModelParams& p) {
  data.validate();
  if (data.n() != p.n()) throw ValidationError("extension: data dimension differs from n");
  std::vector<PreparedTerm> terms;
  terms.reserve(data.terms.size());
  for (const auto& t : data.terms) terms.push_back(prepare(t, p));
  return terms;
}

// Linear convolution of one commensurate term onto the output grid by FFT.
// With displacement index t = q + o - j + (N_in - 1), u_q = (k * g)_{q + N_in - 1}.
class FftConvolver {
 public:
  FftConvolver(const WeightedTerm& t, const GridSpec& out) : term_(t), out_(out) {
    const int n = out.dim();
    n_in_ = t.grid.shape;
    offset_.resize(n);
    len_.resize(n);
    dims_.resize(n);
    for (int i = 0; i < n; ++i) {
      offset_(i) = static_cast<int>(std::llround((out.origin(i) - t.grid.origin(i)) / t.grid.spacing));
      len_(i) = n_in_(i) + out.shape(i) - 1;
      dims_(i) = good_fft_size(len_(i));
    }
    total_ = 1;
    for (int i = 0; i < n; ++i) total_ *= dims_(i);
    data_hat_.assign(total_, Complex(0.0));
    for (Eigen::Index j = 0; j < t.values.size(); ++j) {
      if (t.values(j) == 0.0) continue;
      data_hat_[flat(t.grid.index(j))] = t.grid.trapezoid_weight(j) * t.values(j);
    }
    fftn(data_hat_, dims_, false);
  }

  static bool commensurate(const GridSpec& a, const GridSpec& b) {
    if (a.dim() != b.dim() || std::abs(a.spacing - b.spacing) > 1e-12 * b.spacing) return false;
    for (int i = 0; i < a.dim(); ++i) {
      const double o = (b.origin(i) - a.origin(i)) / a.spacing;
      if (std::abs(o - std::round(o)) > 1e-9) return false;
    }
    return true;
  }

  Eigen::VectorXd apply(const TermKernel& kernel, double y) const {
    const int n = out_.dim();
    std::vector<Complex> k(total_, Complex(0.0));
    Eigen::VectorXi t = Eigen::VectorXi::Zero(n);
    Eigen::VectorXd d(n);
    // Iterate over the displacement box [0, len) in row-major order.
    for (;;) {
      for (int i = 0; i < n; ++i) d(i) = term_.grid.spacing * (t(i) + offset_(i) - (n_in_(i) - 1));
      k[flat(t)] = kernel(d, y);
      int i = n - 1;
      while (i >= 0 && ++t(i) == len_(i)) t(i--) = 0;
      if (i < 0) break;
    }
    fftn(k, dims_, false);
    for (std::size_t j = 0; j < total_; ++j) k[j] *= data_hat_[j];
    fftn(k, dims_, true);
    Eigen::VectorXd u(out_.size());
    for (Eigen::Index q = 0; q < u.size(); ++q) {
      Eigen::VectorXi idx = out_.index(q);
      idx += n_in_ - Eigen::VectorXi::Ones(n);
      u(q) = k[flat(idx)].real();
    }
    return u;
  }

 private:
  std::size_t flat(const Eigen::VectorXi& idx) const {
    std::size_t f = 0;
    for (int i = 0; i < idx.size(); ++i) f = f * dims_(i) + idx(i);
    return f;
  }

  const WeightedTerm& term_;
  const GridSpec& out_;
  Eigen::VectorXi n_in_, offset_, len_, dims_;
  std::size_t total_ = 0;
  std::vector<Complex> data_hat_;
};

void check_y(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("extension: y must be finite and > 0");
}

}  // namespace

PointValue extend_point_detail(const BoundaryData& data, const ModelParams& p, const HalfSpacePoint& pt) {
  if (pt.x.size() != p.n()) throw ValidationError("extend_point: point dimension differs from n");
  const auto terms = prepare_all(data, p);
  return direct_sum(terms, pt.x, pt.y);
}

ExtensionResult extend_grid(const BoundaryData& data, const ModelParams& p, double y, const GridSpec& out,
                            int workers, bool allow_fast_path) {
  check_y(y);
  out.validate();
  if (out.dim() != p.n()) throw ValidationError("extend_grid: output grid dimension differs from n");
  data.validate();
  if (data.n() != p.n()) throw ValidationError("extend_grid: data dimension differs from n");
  ExtensionResult res;
  res.grid = out;
  res.y = y;
  res.values = Eigen::VectorXd::Zero(out.size());
  res.errors = Eigen::VectorXd::Zero(out.size());
  for (const auto& t : data.terms) res.coarse_spacing = res.coarse_spacing || t.grid.spacing > y / 4.0;

  std::vector<PreparedTerm> direct_terms;
  std::vector<std::size_t> fast_terms;
  for (std::size_t i = 0; i < data.terms.size(); ++i) {
    if (allow_fast_path && FftConvolver::commensurate(data.terms[i].grid, out)) {
      fast_terms.push_back(i);
    } else {
      if (allow_fast_path) res.incommensurate_fallback = true;
      direct_terms.push_back(prepare(data.terms[i], p));
    }
  }

  if (!direct_terms.empty()) {
    parallel_for(static_cast<std::size_t>(out.size()), workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t q = b; q < e; ++q) {
        const PointValue v = direct_sum(direct_terms, out.point(q), y);
        res.values(q) = v.value;
        res.errors(q) = v.error;
      }
    });
  }

  if (!fast_terms.empty()) {
    res.used_fast_path = true;
    std::vector<PreparedTerm> check_terms;
    for (std::size_t i : fast_terms) {
      const FftConvolver conv(data.terms[i], out);
      res.values += conv.apply(TermKernel(p, data.terms[i].beta), y);
      check_terms.push_back(prepare(data.terms[i], p));
    }
    // The FFT path has no per-point coarse sum; estimate its error from up to
    // 16 evenly spread output points evaluated directly.
    const Eigen::Index size = out.size();
    const int samples = static_cast<int>(std::min<Eigen::Index>(16, size));
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const Eigen::Index q = samples == 1 ? 0 : s * (size - 1) / (samples - 1);
      const PointValue direct = direct_sum(check_terms, out.point(q), y);
      PointValue other = direct_terms.empty() ? PointValue{0.0, 0.0} : direct_sum(direct_terms, out.point(q), y);
      worst = std::max(worst, direct.error + std::abs(res.values(q) - other.value - direct.value));
    }
    res.errors.array() += worst;
  }
  res.quadrature_error_estimate = res.errors.size() ? res.errors.maxCoeff() : 0.0;
  return res;
}

std::vector<ConvergenceRecord> boundary_convergence(const BoundaryData& data, const ModelParams& p,
                                                    const std::vector<double>& y_list) {
  data.validate();
  if (data.n() != p.n()) throw ValidationError("boundary_convergence: data dimension differs from n");
  if (!data.function_type()) throw ValidationError("boundary_convergence: all terms must have beta = 0");
  if (y_list.empty()) throw ValidationError("boundary_convergence: empty y list");
  for (std::size_t i = 0; i < y_list.size(); ++i) {
    check_y(y_list[i]);
    if (i > 0 && !(y_list[i] < y_list[i - 1])) throw ValidationError("boundary_convergence: y list must be decreasing");
  }
  std::vector<ConvergenceRecord> out;
  if (data.terms.empty()) {
    for (double y : y_list) out.push_back({y, 0.0, 0.0});
    return out;
  }
  const int n = p.n();
  const GridSpec& g0 = data.terms.front().grid;
  for (const auto& t : data.terms)
    if (!FftConvolver::commensurate(t.grid, g0))
      throw ValidationError("boundary_convergence: terms must share a commensurate grid");

  // Evaluation box: bounding box of all supports enlarged by 8 max(y), on the data lattice.
  const double margin = 8.0 * y_list.front();
  const double h = g0.spacing;
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, INFINITY), hi = Eigen::VectorXd::Constant(n, -INFINITY);
  for (const auto& t : data.terms) {
    lo = lo.cwiseMin(t.grid.origin);
    hi = hi.cwiseMax(t.grid.origin + h * (t.grid.shape.array() - 1).cast<double>().matrix());
  }
  GridSpec box;
  box.spacing = h;
  box.origin.resize(n);
  box.shape.resize(n);
  for (int i = 0; i < n; ++i) {
    const double first = std::floor((lo(i) - margin - g0.origin(i)) / h);
    const double last = std::ceil((hi(i) + margin - g0.origin(i)) / h);
    box.origin(i) = g0.origin(i) + first * h;
    box.shape(i) = static_cast<int>(last - first) + 1;
  }

  // f on the box nodes, and its unweighted L1 norm.
  Eigen::VectorXd f = Eigen::VectorXd::Zero(box.size());
  double l1 = 0.0;
  for (const auto& t : data.terms) {
    for (Eigen::Index j = 0; j < t.values.size(); ++j) {
      const Eigen::VectorXi idx = t.grid.index(j);
      Eigen::Index q = 0;
      for (int i = 0; i < n; ++i) {
        const long off = std::lround((t.grid.origin(i) - box.origin(i)) / h);
        q = q * box.shape(i) + (idx(i) + off);
      }
      f(q) += t.values(j);
      l1 += t.grid.trapezoid_weight(j) * std::abs(t.values(j));
    }
  }
  Eigen::VectorXd wt(box.size());
  for (Eigen::Index q = 0; q < wt.size(); ++q) wt(q) = box.trapezoid_weight(q) / weight_alpha(p, box.point(q));

  std::vector<FftConvolver> convs;
  convs.reserve(data.terms.size());
  for (const auto& t : data.terms) convs.emplace_back(t, box);
  const TermKernel kernel(p, MultiIndex::zero(n));
  for (double y : y_list) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(box.size());
    for (const auto& c : convs) u += c.apply(kernel, y);
    const double e = (wt.array() * (u - f).array().abs()).sum();
    out.push_back({y, e, l1 * kernel_tail_mass(p, y, margin)});
  }
  return out;
}

std::pair<double, double> derivative_commutation_check(const BoundaryData& data, const ModelParams& p,
                                                       const MultiIndex& beta, const HalfSpacePoint& pt, double h) {
  if (beta.order() > 2) throw UnsupportedOrderError("derivative_commutation_check: |beta| must be <= 2");
  if (beta.size() != p.n()) throw ValidationError("derivative_commutation_check: beta dimension differs from n");
  if (!data.function_type()) throw ValidationError("derivative_commutation_check: data must have beta = 0 terms");
  if (!(h > 0.0)) throw DomainError("derivative_commutation_check: h must be > 0");
  const auto terms = prepare_all(data, p);
  // Tensor-product central differences: first order (f(+h) - f(-h)) / 2h,
  // second order (f(+h) - 2 f + f(-h)) / h^2.
  std::function<double(int, Eigen::VectorXd)> fd = [&](int axis, Eigen::VectorXd x) -> double {
    if (axis == p.n()) return direct_sum(terms, x, pt.y).value;
    const int k = beta.components(axis);
    if (k == 0) return fd(axis + 1, x);
    Eigen::VectorXd xp = x, xm = x;
    xp(axis) += h;
    xm(axis) -= h;
    if (k == 1) return (fd(axis + 1, xp) - fd(axis + 1, xm)) / (2.0 * h);
    return (fd(axis + 1, xp) - 2.0 * fd(axis + 1, x) + fd(axis + 1, xm)) / (h * h);
  };
  const double lhs = fd(0, pt.x);
  BoundaryData promoted = data;
  for (auto& t : promoted.terms) t.beta = beta;
  const double rhs = extend_point(promoted, p, pt);
  return {lhs, rhs};
}

}  // namespace gasp
