#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sis/common.hpp"
#include "sis/detail/scc.hpp"
#include "sis/model.hpp"

namespace sis {

struct SpectralResult {
  double radius = 0.0;
  std::optional<Vec> eigenvector;  // nonnegative, sup-norm 1
  int iterations = 0;
  double residual = 0.0;  // ||Mv - rho v||_inf when eigenvector present
};

namespace detail {

inline void check_nonnegative_square(const Matrix& M) {
  const std::size_t n = M.size();
  for (const auto& row : M) {
    require_length(row.size(), n, "matrix row");
    for (double v : row)
      if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("matrix must be nonnegative and finite");
  }
}

// Perron root of an irreducible nonnegative matrix given by the index set
// `verts` into M, using the diagonal shift delta = 1 + max diag to defeat
// periodicity. Collatz-Wielandt bounds give a certified stopping test.
inline double perron_root_scc(const Matrix& M, const std::vector<int>& verts, double tol,
                              int iter_cap, int& iterations) {
  const std::size_t s = verts.size();
  double delta = 0.0;
  for (int v : verts) delta = std::max(delta, M[v][v]);
  delta += 1.0;

  Vec x(s, 1.0), y(s, 0.0);
  double lo = 0.0, hi = 0.0;
  for (int it = 0; it < iter_cap; ++it) {
    ++iterations;
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      double acc = delta * x[i];
      const auto& row = M[verts[i]];
      for (std::size_t j = 0; j < s; ++j) acc += row[verts[j]] * x[j];
      y[i] = acc;
      const double ratio = acc / x[i];  // x stays positive: (M+delta I)x >= delta x
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      norm = std::max(norm, acc);
    }
    for (std::size_t i = 0; i < s; ++i) x[i] = y[i] / norm;
    if (hi - lo <= tol) return 0.5 * (hi + lo) - delta;
  }
  throw convergence_error("power iteration did not converge", 0.5 * (hi + lo) - delta);
}

}  // namespace detail

// Spectral radius of a nonnegative matrix: max Perron root over its strongly
// connected classes. Eigenvector (when requested) comes from full-matrix
// power iteration at the known radius; its residual is reported as-is.
inline SpectralResult spectral_radius(const Matrix& M, double tol = 1e-10,
                                      bool want_eigenvector = false) {
  detail::check_nonnegative_square(M);
  if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
  const std::size_t n = M.size();
  SpectralResult res;
  if (n == 0) return res;

  std::vector<std::vector<int>> adj(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (M[x][y] > 0.0) adj[y].push_back(static_cast<int>(x));

  const auto scc = detail::strongly_connected_components(adj);
  const int iter_cap = 100 * static_cast<int>(n) + 1000;
  double rho = 0.0;
  for (const auto& members : scc.members) {
    if (members.size() == 1 && M[members[0]][members[0]] == 0.0) continue;  // zero class
    rho = std::max(rho, detail::perron_root_scc(M, members, tol, iter_cap, res.iterations));
  }
  res.radius = rho;

  if (want_eigenvector) {
    const double delta = [&] {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, M[i][i]);
      return d + 1.0;
    }();
    Vec v(n, 1.0), w(n, 0.0);
    double resid = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100 * iter_cap && resid > tol * std::max(1.0, rho); ++it) {
      ++res.iterations;
      double norm = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        double acc = delta * v[x];
        for (std::size_t y = 0; y < n; ++y) acc += M[x][y] * v[y];
        w[x] = acc;
        norm = std::max(norm, acc);
      }
      for (std::size_t x = 0; x < n; ++x) v[x] = w[x] / norm;
      // residual of the normalized iterate against the known radius
      resid = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        double acc = 0.0;
        for (std::size_t y = 0; y < n; ++y) acc += M[x][y] * v[y];
        resid = std::max(resid, std::abs(acc - rho * v[x]));
      }
    }
    res.eigenvector = std::move(v);
    res.residual = resid;
  }
  return res;
}

// Next-generation matrix of (T M_{1/gamma}) projected to A:
// entry (x,y) = 1_A(x) kernel[x][y] weights[y] / gamma[y] 1_A(y).
inline Matrix next_generation_matrix(const SISModel& m, const Mask& A) {
  require_length(A.size(), m.size(), "mask");
  const std::size_t n = m.size();
  Matrix M(n, Vec(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    if (!A[x]) continue;
    for (std::size_t y = 0; y < n; ++y)
      if (A[y]) M[x][y] = m.kernel[x][y] * m.space.weights[y] / m.gamma[y];
  }
  return M;
}

inline double R0(const SISModel& m, const Mask& A, double tol = 1e-10) {
  if (mask_count(A) == 0) return 0.0;
  return spectral_radius(next_generation_matrix(m, A), tol).radius;
}

inline double R0(const SISModel& m, double tol = 1e-10) {
  return R0(m, full_mask(m.size()), tol);
}

// Effective reproduction number under vaccination profile eta:
// rho of the matrix with entry kernel[x][y] weights[y] eta[y] / gamma[y].
inline double Re(const SISModel& m, const Vec& eta, double tol = 1e-10) {
  require_length(eta.size(), m.size(), "eta");
  const std::size_t n = m.size();
  Matrix M(n, Vec(n, 0.0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      M[x][y] = m.kernel[x][y] * m.space.weights[y] * eta[y] / m.gamma[y];
  return spectral_radius(M, tol).radius;
}

enum class SpectralSign { negative, zero, positive };

struct SpectralBound {
  SpectralSign sign;
  double value;  // s(T - M_gamma)
};

// Sign of the spectral bound s(T - M_gamma), computed by shifting the matrix
// into the nonnegative cone: s = rho(T - M_gamma + cI) - c, c = max gamma + 1.
inline SpectralBound spectral_bound_sign(const SISModel& m, double tol = 1e-10) {
  const std::size_t n = m.size();
  double c = 0.0;
  for (double g : m.gamma) c = std::max(c, g);
  c += 1.0;
  Matrix M(n, Vec(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) M[x][y] = m.kernel[x][y] * m.space.weights[y];
    M[x][x] += c - m.gamma[x];
  }
  const double s = spectral_radius(M, tol).radius - c;
  SpectralSign sign = SpectralSign::zero;
  if (s > 2 * tol) sign = SpectralSign::positive;
  else if (s < -2 * tol) sign = SpectralSign::negative;
  return {sign, s};
}

struct Eigenpair {
  double lambda;
  Vec w;  // nonnegative, sup-norm 1, ||Tw - gamma w - lambda w||_inf small
};

// Positive eigenpair Tw - gamma w = lambda w for supercritical models, found
// by bisecting a > 0 on psi(a) = rho(T M_{1/(gamma+a)}) = 1.
inline Eigenpair supersolution_eigenpair(const SISModel& m, double tol = 1e-9) {
  const std::size_t n = m.size();
  if (R0(m) <= 1.0) throw std::invalid_argument("supersolution_eigenpair requires R0 > 1");

  const auto psi_matrix = [&](double a) {
    Matrix M(n, Vec(n, 0.0));
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        M[x][y] = m.kernel[x][y] * m.space.weights[y] / (m.gamma[y] + a);
    return M;
  };
  const auto psi = [&](double a) { return spectral_radius(psi_matrix(a)).radius; };

  double upper = 0.0;  // max row sum of the matrix of T bounds rho from above
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += m.kernel[x][y] * m.space.weights[y];
    upper = std::max(upper, s);
  }
  double lo = 0.0, hi = upper;
  if (psi(hi) > 1.0) throw convergence_error("bisection bracket failure", hi);
  double a = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    a = 0.5 * (lo + hi);
    const double p = psi(a);
    if (std::abs(p - 1.0) <= tol) break;
    (p > 1.0 ? lo : hi) = a;
  }
  auto sr = spectral_radius(psi_matrix(a), 1e-12, /*want_eigenvector=*/true);
  Vec w = *sr.eigenvector;
  for (std::size_t x = 0; x < n; ++x) w[x] /= (m.gamma[x] + a);
  double norm = sup_norm(w);
  for (double& x : w) x /= norm;
  return {a, std::move(w)};
}

enum class SupersolutionCase { equality, strict, generic };

struct SupersolutionCertificate {
  bool certified;
  SupersolutionCase kind = SupersolutionCase::generic;
  double lower_bound = 0.0;        // certified rho(S_supp(v)) >= lambda
  int failing_coordinate = -1;     // when refused
  double worst_slack = 0.0;        // min over supp of (Sv - lambda v)
};

// Supersolution test: S v >= lambda v entrywise for S = T M_{1/gamma}
// certifies rho(S restricted to supp v) >= lambda. Equality on the support
// upgrades to rho = lambda; strict positivity to rho > lambda.
inline SupersolutionCertificate check_supersolution(const SISModel& m, const Vec& v, double lambda,
                                                    double slack = 1e-12) {
  require_length(v.size(), m.size(), "v");
  const std::size_t n = m.size();
  bool nonzero = false;
  for (double x : v) {
    if (x < 0.0) throw std::invalid_argument("v must be nonnegative");
    if (x > 0.0) nonzero = true;
  }
  if (!nonzero) throw std::invalid_argument("v must be nonzero");

  Vec Sv(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += m.kernel[x][y] * m.space.weights[y] * v[y] / m.gamma[y];
    Sv[x] = s;
  }
  SupersolutionCertificate cert{true};
  double min_gap = std::numeric_limits<double>::infinity();
  double max_gap = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    const double gap = Sv[x] - lambda * v[x];
    if (gap < -slack) {
      cert.certified = false;
      cert.failing_coordinate = static_cast<int>(x);
      cert.worst_slack = gap;
      return cert;
    }
    if (v[x] > 0.0) {
      min_gap = std::min(min_gap, gap);
      max_gap = std::max(max_gap, std::abs(gap));
    }
  }
  cert.lower_bound = lambda;
  cert.worst_slack = min_gap;
  if (max_gap <= slack) cert.kind = SupersolutionCase::equality;
  else if (min_gap > slack) cert.kind = SupersolutionCase::strict;
  return cert;
}

}  // namespace sis
