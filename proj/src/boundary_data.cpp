#include "gasp/boundary_data.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace gasp {

using nlohmann::json;

// --- grids -------------------------------------------------------------------

Eigen::Index GridSpec::size() const {
  Eigen::Index s = 1;
  for (int i = 0; i < shape.size(); ++i) s *= shape(i);
  return s;
}

Eigen::VectorXi GridSpec::index(Eigen::Index flat) const {
  Eigen::VectorXi idx(shape.size());
  for (int i = static_cast<int>(shape.size()) - 1; i >= 0; --i) {
    idx(i) = static_cast<int>(flat % shape(i));
    flat /= shape(i);
  }
  return idx;
}

Eigen::VectorXd GridSpec::point(Eigen::Index flat) const {
  return origin + spacing * index(flat).cast<double>();
}

double GridSpec::trapezoid_weight(Eigen::Index flat) const {
  const Eigen::VectorXi idx = index(flat);
  double w = std::pow(spacing, static_cast<double>(shape.size()));
  for (int i = 0; i < idx.size(); ++i)
    if (shape(i) > 1 && (idx(i) == 0 || idx(i) == shape(i) - 1)) w *= 0.5;
  return w;
}

void GridSpec::validate() const {
  if (origin.size() != shape.size()) throw ValidationError("grid: origin and shape differ in dimension");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ValidationError("grid: spacing must be finite and > 0");
  if (!origin.allFinite()) throw ValidationError("grid: origin must be finite");
  if ((shape.array() < 1).any()) throw ValidationError("grid: shape entries must be >= 1");
}

void WeightedTerm::validate() const {
  grid.validate();
  if (beta.size() != grid.dim()) throw ValidationError("term: beta and grid differ in dimension");
  if (values.size() != grid.size()) throw ValidationError("term: values length differs from product(shape)");
  if (!values.allFinite()) throw ValidationError("term: values must be finite");
}

bool BoundaryData::function_type() const {
  for (const auto& t : terms)
    if (!t.beta.is_zero()) return false;
  return true;
}

void BoundaryData::validate() const {
  for (const auto& t : terms) {
    t.validate();
    if (t.grid.dim() != n()) throw ValidationError("boundary data: term dimension differs from n");
  }
}

double weighted_l1_norm(const WeightedTerm& term, const ModelParams& p) {
  term.validate();
  if (term.grid.dim() != p.n()) throw ValidationError("weighted_l1_norm: term dimension differs from n");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < term.values.size(); ++j) {
    if (term.values(j) == 0.0) continue;
    sum += term.grid.trapezoid_weight(j) * std::abs(term.values(j)) / weight_alpha(p, term.grid.point(j));
  }
  return sum;
}

WeightedTerm tent_term(const Eigen::VectorXd& center, double radius, double height, int per_radius) {
  if (!(radius > 0.0) || per_radius < 1) throw ValidationError("tent_term: radius > 0 and per_radius >= 1 required");
  const int n = static_cast<int>(center.size());
  GridSpec g;
  g.spacing = radius / per_radius;
  g.origin = center.array() - radius;
  g.shape = Eigen::VectorXi::Constant(n, 2 * per_radius + 1);
  Eigen::VectorXd v(g.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    // Offsets from the center are exact multiples of the spacing.
    const Eigen::VectorXd d = (g.index(j).array() - per_radius).cast<double>() * g.spacing;
    v(j) = height * std::max(0.0, 1.0 - d.norm() / radius);
  }
  return {MultiIndex::zero(n), g, v};
}

// --- sharpness construction ----------------------------------------------------

double SharpnessCase::beta_exponent(const ModelParams& p) const {
  return kind == SharpnessKind::critical ? p.alpha() + p.n() + 1.0 - gamma : beta;
}

void SharpnessCase::validate(const ModelParams& p) const {
  if (!std::isfinite(beta) || !std::isfinite(gamma)) throw ValidationError("sharpness case: exponents must be finite");
  if (gamma < 0.0) throw ValidationError("sharpness case: gamma must be >= 0");
  if (kind == SharpnessKind::subcritical) {
    if (!(beta + gamma < p.alpha() + p.n() + 1.0))
      throw ValidationError("sharpness case A: requires beta + gamma < alpha + n + 1");
  } else if (!(gamma < p.n())) {
    throw ValidationError("sharpness case B: requires gamma < n");
  }
}

double SharpnessData::weighted_series() const {
  const ModelParams& p = data.params_hint;
  double sum = 0.0;
  for (const auto& b : bumps)
    sum += std::exp(b.log_height + p.n() * std::log(b.rho) - (p.alpha() + p.n() + 1.0) * std::log(b.a));
  return sum;
}

SharpnessData sharpness_data(const ModelParams& p, const SharpnessCase& c, int k_max) {
  c.validate(p);
  if (k_max < 1 || k_max > kMaxSharpnessK) throw ValidationError("sharpness_data: k_max must lie in [1, 12]");
  const int n = p.n();
  const double top = p.alpha() + n + 1.0;
  SharpnessData out{BoundaryData{p, {}}, {}, {}};
  for (int k = 1; k <= k_max; ++k) {
    SharpnessBump b;
    b.k = k;
    b.a = std::exp(static_cast<double>(k));
    if (c.kind == SharpnessKind::subcritical) {
      b.rho = 1.0 / (static_cast<double>(k) * k);
      b.log_height = k * top;
    } else {
      const double eps = n - c.gamma;
      const double q = (1.0 + eps) / eps;
      b.rho = std::pow(static_cast<double>(k), -q);
      b.log_height = k * top + c.gamma * q * std::log(static_cast<double>(k));
    }
    Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
    center(0) = b.a;
    out.data.terms.push_back(tent_term(center, b.rho, std::exp(b.log_height), 32));
    out.points.emplace_back(center, b.rho);
    out.bumps.push_back(b);
  }
  return out;
}

// --- JSON ------------------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw SchemaError(path.empty() ? key : path + "." + key, "unknown field");
}

const json& field(const json& obj, const char* name, const std::string& path) {
  const std::string p = path.empty() ? name : path + "." + name;
  if (!obj.contains(name)) throw SchemaError(p, "missing field");
  return obj.at(name);
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(path, "expected a finite number");
  return d;
}

long long as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<long long>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array");
  return v;
}

}  // namespace

std::string to_json(const BoundaryData& data) {
  data.validate();
  json doc;
  doc["alpha"] = data.params_hint.alpha();
  doc["n"] = data.n();
  doc["terms"] = json::array();
  for (const auto& t : data.terms) {
    json jt;
    jt["beta"] = std::vector<int>(t.beta.components.data(), t.beta.components.data() + t.beta.size());
    jt["origin"] = std::vector<double>(t.grid.origin.data(), t.grid.origin.data() + t.grid.origin.size());
    jt["spacing"] = t.grid.spacing;
    jt["shape"] = std::vector<int>(t.grid.shape.data(), t.grid.shape.data() + t.grid.shape.size());
    jt["values"] = std::vector<double>(t.values.data(), t.values.data() + t.values.size());
    doc["terms"].push_back(std::move(jt));
  }
  return doc.dump();
}

BoundaryData from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "document must be an object");
  reject_unknown(doc, {"alpha", "n", "terms"}, "");
  const double alpha = as_real(field(doc, "alpha", ""), "alpha");
  const long long n = as_int(field(doc, "n", ""), "n");
  if (n < 1 || n > 16) throw SchemaError("n", "must lie in [1, 16]");
  std::optional<ModelParams> params;
  try {
    params.emplace(alpha, static_cast<int>(n));
  } catch (const ValidationError& e) {
    throw SchemaError("alpha", e.what());
  }
  BoundaryData out{*params, {}};
  const json& terms = as_array(field(doc, "terms", ""), "terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = "terms[" + std::to_string(i) + "]";
    const json& jt = terms[i];
    if (!jt.is_object()) throw SchemaError(tp, "expected an object");
    reject_unknown(jt, {"beta", "origin", "spacing", "shape", "values"}, tp);

    auto int_vector = [&](const char* name) {
      const std::string fp = tp + "." + name;
      const json& a = as_array(field(jt, name, tp), fp);
      if (static_cast<long long>(a.size()) != n) throw SchemaError(fp, "dimension mismatch: expected length n");
      Eigen::VectorXi v(n);
      for (long long j = 0; j < n; ++j) {
        const long long x = as_int(a[j], fp + "[" + std::to_string(j) + "]");
        if (x < 0 || x > (1LL << 30)) throw SchemaError(fp + "[" + std::to_string(j) + "]", "out of range");
        v(j) = static_cast<int>(x);
      }
      return v;
    };

    Eigen::VectorXi beta = int_vector("beta");
    Eigen::VectorXi shape = int_vector("shape");
    const json& jo = as_array(field(jt, "origin", tp), tp + ".origin");
    if (static_cast<long long>(jo.size()) != n) throw SchemaError(tp + ".origin", "dimension mismatch: expected length n");
    Eigen::VectorXd origin(n);
    for (long long j = 0; j < n; ++j) origin(j) = as_real(jo[j], tp + ".origin[" + std::to_string(j) + "]");
    const double spacing = as_real(field(jt, "spacing", tp), tp + ".spacing");
    if (!(spacing > 0.0)) throw SchemaError(tp + ".spacing", "must be > 0");
    if ((shape.array() < 1).any()) throw SchemaError(tp + ".shape", "entries must be >= 1");

    const json& jv = as_array(field(jt, "values", tp), tp + ".values");
    GridSpec grid{origin, spacing, shape};
    if (static_cast<Eigen::Index>(jv.size()) != grid.size())
      throw SchemaError(tp + ".values", "length " + std::to_string(jv.size()) + " differs from product(shape) = " +
                                            std::to_string(grid.size()));
    Eigen::VectorXd values(grid.size());
    for (std::size_t j = 0; j < jv.size(); ++j) values(j) = as_real(jv[j], tp + ".values[" + std::to_string(j) + "]");

    std::optional<MultiIndex> mi;
    try {
      mi.emplace(beta);
    } catch (const ValidationError& e) {
      throw SchemaError(tp + ".beta", e.what());
    }
    out.terms.push_back({*mi, grid, values});
  }
  return out;
}

BoundaryData load_data(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open boundary data file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void save_data(const BoundaryData& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write boundary data file: " + path);
  out << to_json(data) << '\n';
  if (!out) throw ValidationError("failed writing boundary data file: " + path);
}

}  // namespace gasp
