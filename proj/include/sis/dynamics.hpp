#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sis/common.hpp"
#include "sis/model.hpp"
#include "sis/structure.hpp"

namespace sis {

enum class TerminalReason { residual_converged, t_max_reached, step_failure };

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> residuals;  // ||F(u)||_inf per sample
  TerminalReason terminal_reason = TerminalReason::t_max_reached;
  double max_clamp = 0.0;  // largest [0,1] clamp applied to an accepted state

  const Vec& terminal_state() const { return states.back(); }
};

struct IntegrateOptions {
  double rk_tol = 1e-11;         // local error tolerance (abs and rel)
  double residual_tol = 1e-10;   // early stop on ||F(u)||_inf; <= 0 disables
  double clamp_warn = 1e-9;      // clamps above this flag a step-size problem
  bool clamp_states = true;
};

namespace detail {

// Dormand-Prince 5(4) embedded pair.
struct Dopri5 {
  static constexpr int stages = 7;
  static constexpr std::array<double, 7> c = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr std::array<std::array<double, 6>, 7> a = {{
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
  }};
  static constexpr std::array<double, 7> b5 = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                                               -2187.0 / 6784, 11.0 / 84, 0.0};
  static constexpr std::array<double, 7> b4 = {5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640,
                                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

// Generic adaptive integration of u' = rhs(u) with per-step callback.
// The callback receives each accepted (t, u) and may clamp u in place.
inline TerminalReason integrate_adaptive(const std::function<Vec(const Vec&)>& rhs, Vec& u,
                                         double t_end, double rk_tol,
                                         const std::function<bool(double, Vec&)>& on_accept) {
  using RK = Dopri5;
  const std::size_t n = u.size();
  double t = 0.0;
  double h = 1e-3;
  std::array<Vec, RK::stages> k;
  Vec utmp(n), u5(n);
  int rejects_in_row = 0;
  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, t)) return TerminalReason::step_failure;
    k[0] = rhs(u);
    for (int s = 1; s < RK::stages; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = u[i];
        for (int j = 0; j < s; ++j) acc += h * RK::a[s][j] * k[j][i];
        utmp[i] = acc;
      }
      k[s] = rhs(utmp);
    }
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double y5 = u[i], e = 0.0;
      for (int s = 0; s < RK::stages; ++s) {
        y5 += h * RK::b5[s] * k[s][i];
        e += h * (RK::b5[s] - RK::b4[s]) * k[s][i];
      }
      u5[i] = y5;
      const double scale = rk_tol * (1.0 + std::abs(u[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (err <= 1.0) {
      t += h;
      u = u5;
      rejects_in_row = 0;
      if (!on_accept(t, u)) return TerminalReason::residual_converged;
    } else if (++rejects_in_row > 60) {
      return TerminalReason::step_failure;
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::min(5.0, std::max(0.2, factor));
  }
  return TerminalReason::t_max_reached;
}

}  // namespace detail

inline Trajectory integrate(const SISModel& m, Vec h0, double t_max, double residual_tol,
                            IntegrateOptions opts = {}) {
  require_length(h0.size(), m.size(), "initial state");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  for (double v : h0)
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("initial state must lie in [0,1]");
  opts.residual_tol = residual_tol;

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(h0);
  traj.residuals.push_back(sup_norm(vector_field(m, h0)));
  if (opts.residual_tol > 0.0 && traj.residuals.back() <= opts.residual_tol) {
    traj.terminal_reason = TerminalReason::residual_converged;
    return traj;
  }

  Vec u = std::move(h0);
  auto rhs = [&](const Vec& x) { return vector_field(m, x); };
  auto on_accept = [&](double t, Vec& state) {
    if (opts.clamp_states) {
      for (double& v : state) {
        if (v < 0.0) {
          traj.max_clamp = std::max(traj.max_clamp, -v);
          v = 0.0;
        } else if (v > 1.0) {
          traj.max_clamp = std::max(traj.max_clamp, v - 1.0);
          v = 1.0;
        }
      }
    }
    const double resid = sup_norm(vector_field(m, state));
    traj.times.push_back(t);
    traj.states.push_back(state);
    traj.residuals.push_back(resid);
    return !(opts.residual_tol > 0.0 && resid <= opts.residual_tol);
  };
  traj.terminal_reason = detail::integrate_adaptive(rhs, u, t_max, opts.rk_tol, on_accept);
  return traj;
}

struct EquilibriumRecord {
  Vec state;
  Mask support;
  Antichain antichain;
  double residual = 0.0;
  bool is_maximal = false;
};

struct EquilibriumOptions {
  double equilibrium_tol = 1e-10;  // on ||F(g)||_inf
  double t_max = 1e4;
  double rk_tol = 1e-11;
  double support_tol = 1e-8;
  double monotone_tol = 1e-9;
};

namespace detail {

// Damped fixed-point polish g <- (1-w) g + w clamp(phi(g) T g / gamma).
inline double polish_equilibrium(const SISModel& m, Vec& g, double tol, int max_iter = 20000,
                                 double damping = 0.5) {
  const std::size_t n = m.size();
  double best = sup_norm(vector_field(m, g));
  Vec best_g = g;
  for (int it = 0; it < max_iter && best > tol; ++it) {
    Vec Tg = apply_T(m, g);
    for (std::size_t x = 0; x < n; ++x) {
      double target = m.incidence(g[x]) * Tg[x] / m.gamma[x];
      target = std::min(1.0, std::max(0.0, target));
      g[x] = (1.0 - damping) * g[x] + damping * target;
    }
    const double resid = sup_norm(vector_field(m, g));
    if (resid < best) {
      best = resid;
      best_g = g;
    }
  }
  g = best_g;
  return best;
}

}  // namespace detail

// Maximal equilibrium of the model restricted to A: monotone ODE descent from
// 1_A, then fixed-point polish down to equilibrium_tol.
inline EquilibriumRecord maximal_equilibrium(const SISModel& m, const Mask& A,
                                             EquilibriumOptions opts = {}) {
  require_length(A.size(), m.size(), "mask");
  const std::size_t n = m.size();

  // The equilibrium vanishes exactly off the future of the supercritical
  // antichain of A, and on critical atoms decay is only algebraic; restrict
  // the descent to where the limit is genuinely positive.
  Mask B = empty_mask(n);
  {
    const AtomDecomposition dA = decompose(project_model(m, A));
    const Antichain C = maximal_supercritical_antichain(dA, full_mask(n));
    B = dA.future_of_antichain(C);
  }
  if (mask_count(B) == 0) {
    EquilibriumRecord rec;
    rec.state = Vec(n, 0.0);
    rec.support = B;
    rec.is_maximal = true;
    return rec;
  }
  const SISModel proj = project_model(m, B);
  Vec g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) g[i] = B[i] ? 1.0 : 0.0;

  // descend from 1_A, checking the guaranteed monotone decrease
  Vec prev = g;
  auto rhs = [&](const Vec& x) { return vector_field(proj, x); };
  auto on_accept = [&](double t, Vec& state) {
    for (double& v : state) v = std::min(1.0, std::max(0.0, v));
    for (std::size_t i = 0; i < n; ++i)
      if (state[i] > prev[i] + opts.monotone_tol)
        throw std::runtime_error("monotone decrease violated at t=" + std::to_string(t) +
                                 " (feature " + m.space.labels[i] + ")");
    prev = state;
    return sup_norm(vector_field(proj, state)) > std::max(opts.equilibrium_tol, 1e-12);
  };
  detail::integrate_adaptive(rhs, g, opts.t_max, opts.rk_tol, on_accept);
  g = prev;

  double resid = detail::polish_equilibrium(proj, g, opts.equilibrium_tol);
  for (int round = 0; round < 3 && resid > opts.equilibrium_tol; ++round) {
    Vec u = g;
    prev = g;
    // re-descend without the monotone assertion: the polish may have left the
    // monotone envelope
    auto accept2 = [&](double, Vec& state) {
      for (double& v : state) v = std::min(1.0, std::max(0.0, v));
      prev = state;
      return sup_norm(vector_field(proj, state)) > std::max(opts.equilibrium_tol, 1e-12);
    };
    detail::integrate_adaptive(rhs, u, opts.t_max, opts.rk_tol, accept2);
    g = prev;
    resid = detail::polish_equilibrium(proj, g, opts.equilibrium_tol);
  }
  if (resid > opts.equilibrium_tol)
    throw convergence_error("maximal_equilibrium did not reach equilibrium_tol", resid);

  // entries below the support cutoff belong to exactly-zero coordinates of the
  // true equilibrium; snap them when doing so does not hurt the residual
  {
    Vec snapped = g;
    for (double& v : snapped)
      if (v <= opts.support_tol) v = 0.0;
    const double snapped_resid = sup_norm(vector_field(proj, snapped));
    if (snapped_resid <= std::max(resid, opts.equilibrium_tol)) {
      g = std::move(snapped);
      resid = snapped_resid;
    }
  }

  EquilibriumRecord rec;
  rec.state = std::move(g);
  rec.residual = resid;
  rec.support = empty_mask(n);
  for (std::size_t i = 0; i < n; ++i) rec.support[i] = rec.state[i] > opts.support_tol ? 1 : 0;
  rec.is_maximal = true;
  return rec;
}

inline Mask support_mask(const Vec& v, double support_tol = 1e-8) {
  Mask s(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] > support_tol ? 1 : 0;
  return s;
}

// Long-time limit from initial condition h: the maximal equilibrium of the
// future of supp(h), tagged with its supercritical antichain.
inline EquilibriumRecord predict_limit(const SISModel& m, const AtomDecomposition& d, const Vec& h,
                                       EquilibriumOptions opts = {}) {
  require_length(h.size(), m.size(), "initial state");
  const Mask A = future(d.graph, support_mask(h, opts.support_tol));
  EquilibriumRecord rec = maximal_equilibrium(m, A, opts);
  rec.antichain = maximal_supercritical_antichain(d, A);
  rec.is_maximal = rec.antichain == maximal_supercritical_antichain(d, full_mask(m.size()));
  return rec;
}

struct VerificationReport {
  double sup_distance = 0.0;            // ||u(T) - predicted||_inf
  double gamma_weighted_distance = 0.0; // ||(u(T) - predicted) gamma||_inf
  double terminal_residual = 0.0;
  bool matched = false;
  double fitted_decay_rate = 0.0;  // only for subcritical runs; 0 if not fitted
  double expected_decay_rate = 0.0;
  TerminalReason terminal_reason = TerminalReason::t_max_reached;
};

inline VerificationReport verify_limit(const SISModel& m, const Vec& h,
                                       const EquilibriumRecord& predicted, double t_max,
                                       double match_tol = 1e-6, IntegrateOptions opts = {}) {
  VerificationReport rep;
  const bool subcritical = R0(m) < 1.0;
  const Trajectory traj = integrate(m, h, t_max, subcritical ? 0.0 : 1e-12, opts);
  rep.terminal_reason = traj.terminal_reason;
  rep.terminal_residual = traj.residuals.back();
  const Vec& u = traj.terminal_state();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = std::abs(u[i] - predicted.state[i]);
    rep.sup_distance = std::max(rep.sup_distance, d);
    rep.gamma_weighted_distance = std::max(rep.gamma_weighted_distance, d * m.gamma[i]);
  }
  rep.matched = rep.sup_distance <= match_tol && rep.gamma_weighted_distance <= match_tol;

  if (subcritical) {
    // fit log ||u||_inf against t on the window where decay is clean
    double min_g = m.gamma[0];
    for (double g : m.gamma) min_g = std::min(min_g, g);
    if (min_g > 0.0) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int cnt = 0;
      for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double norm = sup_norm(traj.states[i]);
        if (norm < 1e-8 || norm > 1e-2) continue;
        const double x = traj.times[i], y = std::log(norm);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
      }
      if (cnt >= 2 && sxx * cnt - sx * sx > 0.0)
        rep.fitted_decay_rate = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
      rep.expected_decay_rate = -spectral_bound_sign(m).value;
    }
  }
  return rep;
}

struct MonotoneReport {
  bool order_preserved = true;
  double worst_violation = 0.0;
  double t_worst = 0.0;
};

// Co-integrates the pair as one stacked system so both see identical accepted
// steps, then checks the comparison principle entrywise.
inline MonotoneReport check_monotone_flow(const SISModel& m, const Vec& h1, const Vec& h2,
                                          double horizon, double order_tol = 1e-9,
                                          IntegrateOptions opts = {}) {
  require_length(h1.size(), m.size(), "h1");
  require_length(h2.size(), m.size(), "h2");
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i)
    if (h1[i] > h2[i]) throw std::invalid_argument("check_monotone_flow requires h1 <= h2");

  Vec u(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = h1[i];
    u[n + i] = h2[i];
  }
  auto rhs = [&](const Vec& x) {
    Vec a(x.begin(), x.begin() + n), b(x.begin() + n, x.end());
    Vec fa = vector_field(m, a), fb = vector_field(m, b);
    Vec out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = fa[i];
      out[n + i] = fb[i];
    }
    return out;
  };
  MonotoneReport rep;
  auto on_accept = [&](double t, Vec& state) {
    for (double& v : state) v = std::min(1.0, std::max(0.0, v));
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = state[i] - state[n + i];
      if (gap > rep.worst_violation) {
        rep.worst_violation = gap;
        rep.t_worst = t;
      }
    }
    return true;
  };
  detail::integrate_adaptive(rhs, u, horizon, opts.rk_tol, on_accept);
  rep.order_preserved = rep.worst_violation <= order_tol;
  return rep;
}

}  // namespace sis
