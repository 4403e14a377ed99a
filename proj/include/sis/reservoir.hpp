#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "sis/common.hpp"
#include "sis/dynamics.hpp"
#include "sis/equilibria.hpp"
#include "sis/model.hpp"

namespace sis {

// SIS model with an external disease reservoir: u' = phi(u)(Tu + kappa) - gamma u.
// Analyzed through a one-node augmentation whose reservoir coordinate is
// pinned at level a.
struct ReservoirModel {
  SISModel base;
  Vec kappa;
  double a = 0.5;         // reservoir infection level, phi(a) > 0 required
  double b = 1.0;         // reservoir self-rate
  double r_weight = 1.0;  // measure weight of the reservoir node

  ReservoirModel(SISModel base_model, Vec kappa_rates, double a_level = 0.5, double b_rate = 1.0,
                 double reservoir_weight = 1.0)
      : base(std::move(base_model)), kappa(std::move(kappa_rates)), a(a_level), b(b_rate),
        r_weight(reservoir_weight) {
    require_length(kappa.size(), base.size(), "kappa");
    for (double k : kappa)
      if (k < 0.0) throw std::invalid_argument("kappa must be nonnegative");
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("a must lie in (0,1)");
    if (!(base.incidence(a) > 0.0)) throw std::invalid_argument("phi(a) must be positive");
    if (!(b > 0.0)) throw std::invalid_argument("b must be positive");
    if (!(r_weight > 0.0)) throw std::invalid_argument("r_weight must be positive");
  }

  Vec f_kappa(const Vec& u) const {
    Vec out = apply_T(base, u);
    for (std::size_t x = 0; x < base.size(); ++x)
      out[x] = base.incidence(u[x]) * (out[x] + kappa[x]) - base.gamma[x] * u[x];
    return out;
  }
};

// (n+1)-feature SIS model whose dynamics restricted to the base features,
// for any state with value a at the reservoir node, equal F_kappa.
inline SISModel augment(const ReservoirModel& rm) {
  const std::size_t n = rm.base.size();
  Vec weights = rm.base.space.weights;
  weights.push_back(rm.r_weight);
  std::vector<std::string> labels = rm.base.space.labels;
  labels.push_back("reservoir");

  Matrix kernel(n + 1, Vec(n + 1, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) kernel[x][y] = rm.base.kernel[x][y];
    kernel[x][n] = rm.kappa[x] / rm.a / rm.r_weight;
  }
  kernel[n][n] = rm.b / rm.r_weight;

  Vec gamma = rm.base.gamma;
  gamma.push_back(rm.b * rm.base.incidence(rm.a));

  return SISModel(FeatureSpace(std::move(weights), std::move(labels)), std::move(kernel),
                  std::move(gamma), rm.base.incidence);
}

inline Vec augment_state(const ReservoirModel& rm, const Vec& h) {
  require_length(h.size(), rm.base.size(), "state");
  Vec hr = h;
  hr.push_back(rm.a);
  return hr;
}

inline Vec restrict_state(const ReservoirModel& rm, const Vec& hr) {
  require_length(hr.size(), rm.base.size() + 1, "augmented state");
  return Vec(hr.begin(), hr.end() - 1);
}

namespace detail {

struct ReservoirContext {
  SISModel aug;
  AtomDecomposition base_decomp;
  AtomDecomposition aug_decomp;
  Mask future_supp_kappa;            // in the base graph
  std::vector<int> free_atoms;       // base supercritical atoms disjoint from F(supp kappa)
};

inline ReservoirContext reservoir_context(const ReservoirModel& rm) {
  ReservoirContext ctx{augment(rm), decompose(rm.base), decompose(augment(rm))};
  ctx.future_supp_kappa = future(ctx.base_decomp.graph, support_mask(rm.kappa, 0.0));
  for (int a : ctx.base_decomp.supercritical) {
    bool disjoint = true;
    for (std::size_t v = 0; v < rm.base.size(); ++v)
      if (ctx.base_decomp.atoms[a][v] && ctx.future_supp_kappa[v]) disjoint = false;
    if (disjoint) ctx.free_atoms.push_back(a);
  }
  return ctx;
}

}  // namespace detail

// Equilibria of the SIS-kappa model, indexed by antichains of base
// supercritical atoms not already infected through the reservoir. Each record
// lives on the base features; support is future(C) union future(supp kappa).
inline std::vector<EquilibriumRecord> reservoir_equilibria(const ReservoirModel& rm,
                                                           EquilibriumOptions opts = {},
                                                           int antichain_cap = 20) {
  const auto ctx = detail::reservoir_context(rm);
  const std::size_t n = rm.base.size();
  const auto& bd = ctx.base_decomp;

  // antichains of the free supercritical atoms
  std::vector<Antichain> chains;
  Antichain cur;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == ctx.free_atoms.size()) {
      chains.push_back(cur);
      return;
    }
    self(self, i + 1);
    for (int a : cur)
      if (bd.comparable(a, ctx.free_atoms[i])) return;
    cur.push_back(ctx.free_atoms[i]);
    self(self, i + 1);
    cur.pop_back();
  };
  if (static_cast<int>(ctx.free_atoms.size()) > antichain_cap)
    throw resource_cap_error("too many reservoir-free supercritical atoms");
  rec(rec, 0);

  std::vector<EquilibriumRecord> out;
  for (Antichain& c : chains) {
    std::sort(c.begin(), c.end());
    // augmented-model region: future of C union {reservoir node}
    Mask region(n + 1, 0);
    region[n] = 1;
    for (int a : c)
      for (std::size_t v = 0; v < n; ++v)
        if (bd.atoms[a][v]) region[v] = 1;
    region = future(ctx.aug_decomp.graph, region);

    EquilibriumRecord full = maximal_equilibrium(ctx.aug, region, opts);
    if (std::abs(full.state[n] - rm.a) > 1e-9)
      throw std::runtime_error("reservoir coordinate drifted from its pinned level");

    EquilibriumRecord r;
    r.state = Vec(full.state.begin(), full.state.end() - 1);
    r.residual = sup_norm(rm.f_kappa(r.state));
    r.support = support_mask(r.state, opts.support_tol);
    r.antichain = c;

    Mask expected = ctx.future_supp_kappa;
    for (int a : c) expected = mask_union(expected, bd.futures[a]);
    if (!mask_equal(r.support, expected))
      throw std::runtime_error("reservoir equilibrium support mismatch");
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const EquilibriumRecord& a, const EquilibriumRecord& b) {
    if (a.antichain.size() != b.antichain.size()) return a.antichain.size() < b.antichain.size();
    return a.antichain < b.antichain;
  });
  // the maximal record carries every free atom's maximal antichain
  if (!out.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.size(); ++i)
      if (mask_subset(out[best].support, out[i].support)) best = i;
    out[best].is_maximal = true;
  }
  return out;
}

// Long-time limit of the SIS-kappa semi-flow from h, via the augmentation.
inline EquilibriumRecord reservoir_predict_limit(const ReservoirModel& rm, const Vec& h,
                                                 EquilibriumOptions opts = {}) {
  const auto ctx = detail::reservoir_context(rm);
  const std::size_t n = rm.base.size();
  EquilibriumRecord full = predict_limit(ctx.aug, ctx.aug_decomp, augment_state(rm, h), opts);

  EquilibriumRecord r;
  r.state = Vec(full.state.begin(), full.state.end() - 1);
  r.residual = sup_norm(rm.f_kappa(r.state));
  r.support = support_mask(r.state, opts.support_tol);

  // antichain in terms of the base decomposition: maximal free atoms inside
  // the future of supp(h)
  const Mask fh = future(ctx.base_decomp.graph, support_mask(h, opts.support_tol));
  Antichain inside;
  for (int a : ctx.free_atoms)
    if (mask_subset(ctx.base_decomp.atoms[a], fh)) inside.push_back(a);
  for (int a : inside) {
    bool dominated = false;
    for (int b : inside)
      if (b != a && ctx.base_decomp.below(a, b) && !ctx.base_decomp.below(b, a)) dominated = true;
    if (!dominated) r.antichain.push_back(a);
  }
  std::sort(r.antichain.begin(), r.antichain.end());
  return r;
}

}  // namespace sis
