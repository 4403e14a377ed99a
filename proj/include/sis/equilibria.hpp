#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "sis/common.hpp"
#include "sis/dynamics.hpp"
#include "sis/spectral.hpp"
#include "sis/structure.hpp"

namespace sis {

// Equilibrium attached to a supercritical antichain C: the maximal
// equilibrium of future(C). The empty antichain yields the DFE.
inline EquilibriumRecord equilibrium_for_antichain(const SISModel& m, const AtomDecomposition& d,
                                                   const Antichain& c, EquilibriumOptions opts = {}) {
  for (int a : c)
    if (a < 0 || a >= static_cast<int>(d.num_atoms()) || d.atom_class[a] != AtomClass::supercritical)
      throw std::invalid_argument("antichain must consist of supercritical atoms");
  const Mask A = d.future_of_antichain(c);
  EquilibriumRecord rec = maximal_equilibrium(m, A, opts);
  rec.antichain = c;
  std::sort(rec.antichain.begin(), rec.antichain.end());
  rec.is_maximal = rec.antichain == maximal_supercritical_antichain(d, full_mask(m.size()));
  if (!mask_equal(rec.support, A))
    throw std::runtime_error("equilibrium support does not match future(antichain); "
                             "a near-critical atom or tolerance misconfiguration is likely");
  if (maximal_supercritical_antichain(d, rec.support) != rec.antichain)
    throw std::runtime_error("equilibrium antichain post-check failed");
  return rec;
}

// One equilibrium per supercritical antichain; sorted with the DFE first,
// the maximal equilibrium last.
inline std::vector<EquilibriumRecord> equilibrium_catalog(const SISModel& m,
                                                          const AtomDecomposition& d,
                                                          EquilibriumOptions opts = {},
                                                          int antichain_cap = 20) {
  std::vector<EquilibriumRecord> out;
  for (const Antichain& c : supercritical_antichains(d, antichain_cap))
    out.push_back(equilibrium_for_antichain(m, d, c, opts));
  return out;
}

inline const EquilibriumRecord* find_maximal(const std::vector<EquilibriumRecord>& catalog) {
  for (const auto& rec : catalog)
    if (rec.is_maximal) return &rec;
  return nullptr;
}

struct SweepEntry {
  Vec start;
  int matched_index = -1;       // catalog entry the terminal state matched
  int predicted_index = -1;     // catalog entry predicted from supp(start)
  double match_distance = 0.0;  // sup distance to the matched entry
  bool agrees = false;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  int unmatched = 0;
  int disagreements = 0;
  bool all_consistent() const { return unmatched == 0 && disagreements == 0; }
};

// Validation harness: integrate from random and extreme starts, match every
// terminal state to a catalog entry and compare with the predicted basin.
inline SweepReport random_start_sweep(const SISModel& m, const AtomDecomposition& d,
                                      const std::vector<EquilibriumRecord>& catalog,
                                      int num_starts, std::uint64_t seed,
                                      double match_tol = 1e-5, EquilibriumOptions opts = {}) {
  if (num_starts < 1) throw std::invalid_argument("num_starts must be >= 1");
  const std::size_t n = m.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<Vec> starts;
  starts.emplace_back(n, 0.0);
  starts.emplace_back(n, 1.0);
  for (const auto& atom : d.atoms) {
    Vec h(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i] = atom[i] ? 1.0 : 0.0;
    starts.push_back(std::move(h));
  }
  for (int s = 0; s < num_starts; ++s) {
    Vec h(n);
    for (double& v : h) v = unif(rng);
    if (unif(rng) < 0.5) {
      // zero out a random feature subset to vary the support
      for (double& v : h)
        if (unif(rng) < 0.5) v = 0.0;
    }
    starts.push_back(std::move(h));
  }

  const auto match = [&](const Vec& u, double& dist) {
    int best = -1;
    double best_d = match_tol;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      const double dd = sup_dist(u, catalog[i].state);
      if (dd <= best_d) {
        best_d = dd;
        best = static_cast<int>(i);
      }
    }
    dist = best_d;
    return best;
  };
  const auto catalog_index_of_antichain = [&](const Antichain& c) {
    for (std::size_t i = 0; i < catalog.size(); ++i)
      if (catalog[i].antichain == c) return static_cast<int>(i);
    return -1;
  };

  SweepReport rep;
  for (const Vec& h : starts) {
    SweepEntry e;
    e.start = h;
    const Trajectory traj = integrate(m, h, opts.t_max, opts.equilibrium_tol,
                                      {.rk_tol = opts.rk_tol});
    Vec u = traj.terminal_state();
    detail::polish_equilibrium(m, u, opts.equilibrium_tol);
    e.matched_index = match(u, e.match_distance);
    const EquilibriumRecord predicted = predict_limit(m, d, h, opts);
    e.predicted_index = catalog_index_of_antichain(predicted.antichain);
    e.agrees = e.matched_index >= 0 && e.matched_index == e.predicted_index;
    if (e.matched_index < 0) ++rep.unmatched;
    else if (!e.agrees) ++rep.disagreements;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

struct VaccinationEntry {
  Antichain antichain;
  double re_phi = 0.0;  // Re(phi(g))
  bool is_maximal = false;
  bool is_dfe = false;
};

struct VaccinationReport {
  std::vector<VaccinationEntry> entries;
  double r0 = 0.0;
  std::vector<std::string> violations;
  bool consistent() const { return violations.empty(); }
};

// Critical vaccination identity: Re(phi(g*)) = 1 for the maximal equilibrium
// when R0 > 1; Re(phi(h)) > 1 for every other endemic equilibrium;
// Re(phi(0)) = R0.
inline VaccinationReport critical_vaccination_check(const SISModel& m,
                                                    const std::vector<EquilibriumRecord>& catalog,
                                                    double identity_tol = 1e-6) {
  VaccinationReport rep;
  rep.r0 = R0(m);
  for (const auto& rec : catalog) {
    VaccinationEntry e;
    e.antichain = rec.antichain;
    e.is_maximal = rec.is_maximal;
    e.is_dfe = sup_norm(rec.state) == 0.0;
    Vec eta(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) eta[i] = m.incidence(rec.state[i]);
    e.re_phi = Re(m, eta);
    if (e.is_dfe) {
      if (std::abs(e.re_phi - rep.r0) > identity_tol)
        rep.violations.push_back("Re(phi(0)) should equal R0");
    } else if (e.is_maximal) {
      if (std::abs(e.re_phi - 1.0) > identity_tol)
        rep.violations.push_back("Re(phi(g*)) should equal 1, got " + std::to_string(e.re_phi));
    } else {
      if (!(e.re_phi > 1.0 + 1e-8))
        rep.violations.push_back("Re(phi(h)) should exceed 1 for non-maximal endemic equilibrium");
    }
    rep.entries.push_back(std::move(e));
  }
  if (rep.r0 > 1.0) {
    // the maximal record must exist and be endemic
    const auto* g = find_maximal(catalog);
    if (!g || sup_norm(g->state) == 0.0)
      rep.violations.push_back("R0 > 1 but no endemic maximal equilibrium in catalog");
  }
  return rep;
}

struct MonatomicityReport {
  std::vector<double> lambdas;
  std::vector<int> nonnull_counts;
  bool all_at_most_one = true;
  bool some_at_least_one = false;
  bool agrees_with_structure = false;
};

// Monatomicity criterion via equilibrium counts of the recovery-scaled
// models (T, lambda gamma, phi).
inline MonatomicityReport monatomicity_by_equilibrium_counts(const SISModel& m,
                                                             const AtomDecomposition& d,
                                                             const std::vector<double>& lambdas,
                                                             EquilibriumOptions opts = {}) {
  MonatomicityReport rep;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw std::invalid_argument("lambda must be positive");
    SISModel scaled = m;
    for (double& g : scaled.gamma) g *= lam;
    const AtomDecomposition ds = decompose(scaled);
    int count = 0;
    for (const auto& rec : equilibrium_catalog(scaled, ds, opts))
      if (sup_norm(rec.state) > 0.0) ++count;
    rep.lambdas.push_back(lam);
    rep.nonnull_counts.push_back(count);
    if (count > 1) rep.all_at_most_one = false;
    if (count >= 1) rep.some_at_least_one = true;
  }
  rep.agrees_with_structure =
      (rep.all_at_most_one && rep.some_at_least_one) == is_monatomic(d);
  return rep;
}

}  // namespace sis
