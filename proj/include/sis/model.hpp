#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sis/common.hpp"
#include "sis/incidence.hpp"

namespace sis {

// Weighted finite feature space: each feature is a subpopulation with a
// strictly positive measure weight.
struct FeatureSpace {
  std::size_t n = 0;
  Vec weights;
  std::vector<std::string> labels;

  FeatureSpace() = default;
  FeatureSpace(Vec w, std::vector<std::string> l) : n(w.size()), weights(std::move(w)), labels(std::move(l)) {
    if (n == 0) throw std::invalid_argument("feature space must have at least one feature");
    for (double wi : weights)
      if (!(wi > 0.0)) throw std::invalid_argument("feature weights must be strictly positive");
    if (labels.empty())
      for (std::size_t i = 0; i < n; ++i) labels.push_back("f" + std::to_string(i));
    require_length(labels.size(), n, "labels");
  }
};

// The model tuple (T, gamma, phi). kernel[x][y] is the infection rate from
// feature y to feature x; the operator action always multiplies by the
// source weight: (Tf)(x) = sum_y kernel[x][y] f[y] weights[y].
struct SISModel {
  FeatureSpace space;
  Matrix kernel;
  Vec gamma;
  IncidenceFunction incidence;

  SISModel(FeatureSpace s, Matrix k, Vec g, IncidenceFunction phi)
      : space(std::move(s)), kernel(std::move(k)), gamma(std::move(g)), incidence(std::move(phi)) {
    require_length(kernel.size(), space.n, "kernel rows");
    for (const auto& row : kernel) require_length(row.size(), space.n, "kernel row");
    require_length(gamma.size(), space.n, "gamma");
  }

  std::size_t size() const { return space.n; }
};

// Convenience for scalar and small hand-built models with unit weights.
inline SISModel make_model(Matrix kernel, Vec gamma, IncidenceFunction phi,
                           Vec weights = {}, std::vector<std::string> labels = {}) {
  const std::size_t n = kernel.size();
  if (weights.empty()) weights.assign(n, 1.0);
  return SISModel(FeatureSpace(std::move(weights), std::move(labels)), std::move(kernel),
                  std::move(gamma), std::move(phi));
}

inline Vec apply_T(const SISModel& m, const Vec& f) {
  require_length(f.size(), m.size(), "apply_T input");
  const std::size_t n = m.size();
  Vec out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += m.kernel[x][y] * f[y] * m.space.weights[y];
    out[x] = s;
  }
  return out;
}

// F(u) = phi(u) . Tu - gamma . u  (entrywise products)
inline Vec vector_field(const SISModel& m, const Vec& u) {
  Vec out = apply_T(m, u);
  for (std::size_t x = 0; x < m.size(); ++x)
    out[x] = m.incidence(u[x]) * out[x] - m.gamma[x] * u[x];
  return out;
}

// Zero the kernel outside rows and columns of A: T_A = M_A T M_A.
inline SISModel project_model(const SISModel& m, const Mask& A) {
  require_length(A.size(), m.size(), "mask");
  SISModel p = m;
  for (std::size_t x = 0; x < m.size(); ++x)
    for (std::size_t y = 0; y < m.size(); ++y)
      if (!A[x] || !A[y]) p.kernel[x][y] = 0.0;
  return p;
}

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  bool valid() const { return violations.empty(); }
};

inline ValidationReport validate_assumptions(const SISModel& m) {
  ValidationReport rep;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!(m.space.weights[i] > 0.0)) {
      rep.violations.push_back("weights must be strictly positive (feature " + m.space.labels[i] + ")");
    }
    if (!(m.gamma[i] > 0.0)) {
      rep.violations.push_back("gamma must be strictly positive (feature " + m.space.labels[i] + ")");
    }
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m.kernel[i][j] < 0.0) {
        rep.violations.push_back("kernel must be nonnegative (entry " + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
      }
  }
  const ConformityReport phi = check_conformity(m.incidence, 256);
  for (const auto& v : phi.violations) rep.violations.push_back("incidence: " + v);
  rep.notes.push_back("operator norm conditions auto-satisfied (finite dimension)");
  return rep;
}

}  // namespace sis
