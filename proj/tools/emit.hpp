#pragma once

// Deterministic CSV / JSON emission of command results: a list of named
// scalars followed by an optional table.

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace gasp::cli {

using Value = std::variant<double, long long, bool, std::string>;

enum class Format { csv, json };

struct Output {
  std::vector<std::pair<std::string, Value>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  void set(std::string key, Value v) { meta.emplace_back(std::move(key), std::move(v)); }
};

inline std::string format_real(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string json_value(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return std::isfinite(*d) ? format_real(*d, 17) : "null";
  if (const long long* i = std::get_if<long long>(&v)) return std::to_string(*i);
  if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return nlohmann::json(std::get<std::string>(v)).dump();
}

inline std::string csv_value(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) return format_real(*d, 9);
  if (const long long* i = std::get_if<long long>(&v)) return std::to_string(*i);
  if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  const std::string& s = std::get<std::string>(v);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string render(const Output& out, Format format) {
  std::string s;
  if (format == Format::json) {
    s += "{";
    bool first = true;
    for (const auto& [k, v] : out.meta) {
      s += first ? "\n  " : ",\n  ";
      first = false;
      s += nlohmann::json(k).dump() + ": " + json_value(v);
    }
    if (!out.columns.empty()) {
      s += first ? "\n  " : ",\n  ";
      s += "\"columns\": [";
      for (std::size_t i = 0; i < out.columns.size(); ++i) s += (i ? ", " : "") + nlohmann::json(out.columns[i]).dump();
      s += "],\n  \"rows\": [";
      for (std::size_t r = 0; r < out.rows.size(); ++r) {
        s += r ? ",\n    [" : "\n    [";
        for (std::size_t i = 0; i < out.rows[r].size(); ++i) s += (i ? ", " : "") + json_value(out.rows[r][i]);
        s += "]";
      }
      s += out.rows.empty() ? "]" : "\n  ]";
    }
    s += "\n}\n";
    return s;
  }
  if (out.columns.empty()) {
    for (std::size_t i = 0; i < out.meta.size(); ++i) s += (i ? "," : "") + out.meta[i].first;
    s += "\n";
    for (std::size_t i = 0; i < out.meta.size(); ++i) s += (i ? "," : "") + csv_value(out.meta[i].second);
    return s + "\n";
  }
  for (const auto& [k, v] : out.meta) s += "# " + k + "=" + csv_value(v) + "\n";
  for (std::size_t i = 0; i < out.columns.size(); ++i) s += (i ? "," : "") + out.columns[i];
  s += "\n";
  for (const auto& row : out.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_value(row[i]);
    s += "\n";
  }
  return s;
}

}  // namespace gasp::cli
