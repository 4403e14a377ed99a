#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sis/common.hpp"
#include "sis/dynamics.hpp"
#include "sis/model.hpp"
#include "sis/reservoir.hpp"

namespace sis {

class parse_error : public std::runtime_error {
 public:
  parse_error(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

// Optional reservoir extension of a model file.
struct ReservoirSpec {
  Vec kappa;
  double a = 0.5;
  double b = 1.0;
  double r_weight = 1.0;
};

struct ParsedModel {
  SISModel model;
  std::optional<ReservoirSpec> reservoir;

  ReservoirModel make_reservoir() const {
    if (!reservoir) throw std::invalid_argument("model file has no kappa section");
    return ReservoirModel(model, reservoir->kappa, reservoir->a, reservoir->b, reservoir->r_weight);
  }
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_real(const std::string& tok, int line) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw parse_error(line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size()) throw parse_error(line, "trailing characters in number '" + tok + "'");
  return v;
}

inline Vec parse_reals(const std::vector<std::string>& toks, int line) {
  Vec out;
  for (const auto& t : toks) out.push_back(parse_real(t, line));
  return out;
}

inline IncidenceFunction parse_incidence(const std::vector<std::string>& toks, int line) {
  if (toks.empty()) throw parse_error(line, "incidence requires a family name");
  const std::string& fam = toks[0];
  const auto need_param = [&]() {
    if (toks.size() != 2) throw parse_error(line, "family '" + fam + "' requires one parameter");
    return parse_real(toks[1], line);
  };
  if (fam == "mass_action") {
    if (toks.size() != 1) throw parse_error(line, "mass_action takes no parameter");
    return IncidenceFunction::mass_action();
  }
  if (fam == "london_yorke") return IncidenceFunction::london_yorke(need_param());
  if (fam == "power") return IncidenceFunction::power(need_param());
  if (fam == "saturation") return IncidenceFunction::saturation(need_param());
  if (fam == "exponential_saturation") return IncidenceFunction::exponential_saturation(need_param());
  if (fam == "log_saturation") return IncidenceFunction::log_saturation(need_param());
  throw parse_error(line, "unknown incidence family '" + fam + "'");
}

}  // namespace detail

// Model file format: `key: value` lines, `#` comments. `kernel:` is followed
// by n rows of n numbers. Keys: labels, weights, gamma, kernel, incidence,
// and the optional reservoir keys kappa, a, b, r_weight.
inline ParsedModel parse_model(std::istream& in) {
  std::optional<std::vector<std::string>> labels;
  std::optional<Vec> weights, gamma, kappa;
  std::optional<Matrix> kernel;
  std::optional<IncidenceFunction> incidence;
  double a = 0.5, b = 1.0, r_weight = 1.0;

  std::string raw;
  int lineno = 0;
  int kernel_rows_pending = -1;
  int kernel_line = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::string s = hash == std::string::npos ? raw : raw.substr(0, hash);
    const auto toks = detail::split_ws(s);
    if (toks.empty()) continue;

    if (kernel_rows_pending > 0) {
      const Vec row = detail::parse_reals(toks, lineno);
      if (!kernel) kernel = Matrix{};
      kernel->push_back(row);
      --kernel_rows_pending;
      continue;
    }

    const auto colon = s.find(':');
    if (colon == std::string::npos) throw parse_error(lineno, "expected 'key: value'");
    const auto keytoks = detail::split_ws(s.substr(0, colon));
    if (keytoks.size() != 1) throw parse_error(lineno, "malformed key");
    const std::string key = keytoks[0];
    const auto vals = detail::split_ws(s.substr(colon + 1));

    if (key == "labels") {
      labels = vals;
    } else if (key == "weights") {
      weights = detail::parse_reals(vals, lineno);
    } else if (key == "gamma") {
      gamma = detail::parse_reals(vals, lineno);
    } else if (key == "kappa") {
      kappa = detail::parse_reals(vals, lineno);
    } else if (key == "incidence") {
      incidence = detail::parse_incidence(vals, lineno);
    } else if (key == "a") {
      if (vals.size() != 1) throw parse_error(lineno, "a takes one value");
      a = detail::parse_real(vals[0], lineno);
    } else if (key == "b") {
      if (vals.size() != 1) throw parse_error(lineno, "b takes one value");
      b = detail::parse_real(vals[0], lineno);
    } else if (key == "r_weight") {
      if (vals.size() != 1) throw parse_error(lineno, "r_weight takes one value");
      r_weight = detail::parse_real(vals[0], lineno);
    } else if (key == "kernel") {
      if (!vals.empty()) throw parse_error(lineno, "kernel rows start on the following lines");
      if (!gamma && !weights && !labels)
        throw parse_error(lineno, "kernel must come after labels, weights or gamma (to fix n)");
      kernel_rows_pending = static_cast<int>(gamma ? gamma->size()
                                                  : (weights ? weights->size() : labels->size()));
      kernel_line = lineno;
      kernel = Matrix{};
    } else {
      throw parse_error(lineno, "unknown key '" + key + "'");
    }
  }

  if (!kernel) throw parse_error(lineno, "missing kernel");
  if (kernel_rows_pending > 0) throw parse_error(kernel_line, "kernel has too few rows");
  if (!gamma) throw parse_error(lineno, "missing gamma");
  const std::size_t n = gamma->size();
  for (const auto& row : kernel.value())
    if (row.size() != n) throw parse_error(kernel_line, "kernel rows must have length " + std::to_string(n));
  if (kernel->size() != n) throw parse_error(kernel_line, "kernel must be square");
  if (!weights) weights = Vec(n, 1.0);
  if (!incidence) incidence = IncidenceFunction::mass_action();
  if (!labels) {
    labels = std::vector<std::string>{};
    for (std::size_t i = 0; i < n; ++i) labels->push_back("f" + std::to_string(i));
  }
  if (labels->size() != n) throw parse_error(lineno, "labels length must match gamma");
  if (weights->size() != n) throw parse_error(lineno, "weights length must match gamma");

  ParsedModel out{
      SISModel(FeatureSpace(*weights, *labels), *kernel, *gamma, *incidence), std::nullopt};
  if (kappa) {
    if (kappa->size() != n) throw parse_error(lineno, "kappa length must match gamma");
    out.reservoir = ReservoirSpec{*kappa, a, b, r_weight};
  }
  return out;
}

inline ParsedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return parse_model(in);
}

// 17 significant digits: round-trip exact for doubles.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_trajectory_csv(std::ostream& os, const SISModel& m, const Trajectory& traj,
                                 std::size_t stride = 1) {
  os << "t";
  for (std::size_t i = 0; i < m.size(); ++i) os << "," << "feature_" << i;
  os << ",residual\n";
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    if (s % stride != 0 && s + 1 != traj.times.size()) continue;
    os << format_real(traj.times[s]);
    for (double v : traj.states[s]) os << "," << format_real(v);
    os << "," << format_real(traj.residuals[s]) << "\n";
  }
}

inline std::string mask_to_labels(const SISModel& m, const Mask& mask) {
  std::string out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) {
      if (!out.empty()) out += ",";
      out += i < m.space.labels.size() ? m.space.labels[i] : ("f" + std::to_string(i));
    }
  return out.empty() ? "(empty)" : out;
}

}  // namespace sis
