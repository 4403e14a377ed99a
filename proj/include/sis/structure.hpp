#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "sis/common.hpp"
#include "sis/detail/scc.hpp"
#include "sis/spectral.hpp"

namespace sis {

// Transmission graph G_K: edge y -> x iff kernel[x][y] * weights[y] > 0.
struct Digraph {
  std::size_t n = 0;
  std::vector<std::vector<int>> out;  // successors
};

inline Digraph transmission_graph(const SISModel& m) {
  Digraph g;
  g.n = m.size();
  g.out.assign(g.n, {});
  for (std::size_t x = 0; x < g.n; ++x)
    for (std::size_t y = 0; y < g.n; ++y)
      if (m.kernel[x][y] * m.space.weights[y] > 0.0) g.out[y].push_back(static_cast<int>(x));
  return g;
}

// Reachability closure of A (including A itself).
inline Mask future(const Digraph& g, const Mask& A) {
  require_length(A.size(), g.n, "mask");
  Mask reached = A;
  std::vector<int> stack;
  for (std::size_t v = 0; v < g.n; ++v)
    if (A[v]) stack.push_back(static_cast<int>(v));
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : g.out[v])
      if (!reached[w]) {
        reached[w] = 1;
        stack.push_back(w);
      }
  }
  return reached;
}

inline bool is_invariant(const Digraph& g, const Mask& A) {
  return mask_equal(future(g, A), A);
}

enum class AtomClass { zero, subcritical, critical, supercritical };

inline const char* to_string(AtomClass c) {
  switch (c) {
    case AtomClass::zero: return "zero";
    case AtomClass::subcritical: return "subcritical";
    case AtomClass::critical: return "critical";
    case AtomClass::supercritical: return "supercritical";
  }
  return "?";
}

// Antichain of atoms, stored as sorted atom indices into a decomposition.
using Antichain = std::vector<int>;

// Atoms (strongly connected components of G_K), their criticality classes,
// the reachability order and cached futures.
struct AtomDecomposition {
  Digraph graph;
  std::vector<Mask> atoms;
  std::vector<AtomClass> atom_class;
  std::vector<double> atom_r0;
  std::vector<int> atom_of;                 // feature -> atom index
  std::vector<Mask> futures;                // future(atom)
  std::vector<std::vector<std::uint8_t>> leq;  // leq[a][b]: a is below b (a subset of future(b))
  std::vector<int> supercritical;           // indices of supercritical atoms

  std::size_t num_atoms() const { return atoms.size(); }

  bool below(int a, int b) const { return leq[a][b] != 0; }
  bool comparable(int a, int b) const { return below(a, b) || below(b, a); }

  Mask future_of_antichain(const Antichain& c) const {
    Mask u = empty_mask(graph.n);
    for (int a : c) u = mask_union(u, futures[a]);
    return u;
  }
};

inline AtomDecomposition decompose(const SISModel& m, double classification_tol = 1e-9,
                                   double spectral_tol = 1e-10) {
  AtomDecomposition d;
  d.graph = transmission_graph(m);
  const auto scc = detail::strongly_connected_components(d.graph.out);
  const std::size_t n = m.size();
  const std::size_t k = scc.members.size();

  d.atoms.assign(k, Mask(n, 0));
  d.atom_of.assign(n, -1);
  for (std::size_t a = 0; a < k; ++a)
    for (int v : scc.members[a]) {
      d.atoms[a][v] = 1;
      d.atom_of[v] = static_cast<int>(a);
    }

  d.atom_class.assign(k, AtomClass::zero);
  d.atom_r0.assign(k, 0.0);
  d.futures.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    d.futures[a] = future(d.graph, d.atoms[a]);
    const auto& mem = scc.members[a];
    const bool zero = mem.size() == 1 && !(m.kernel[mem[0]][mem[0]] * m.space.weights[mem[0]] > 0.0);
    if (zero) continue;
    const double r0 = R0(m, d.atoms[a], spectral_tol);
    d.atom_r0[a] = r0;
    if (r0 > 1.0 + classification_tol) {
      d.atom_class[a] = AtomClass::supercritical;
      d.supercritical.push_back(static_cast<int>(a));
    } else if (r0 >= 1.0 - classification_tol) {
      d.atom_class[a] = AtomClass::critical;
    } else {
      d.atom_class[a] = AtomClass::subcritical;
    }
  }

  // a below b iff atom a lies inside future(b)
  d.leq.assign(k, std::vector<std::uint8_t>(k, 0));
  for (std::size_t b = 0; b < k; ++b)
    for (std::size_t a = 0; a < k; ++a)
      d.leq[a][b] = mask_subset(d.atoms[a], d.futures[b]) ? 1 : 0;
  return d;
}

inline bool is_monatomic(const AtomDecomposition& d) {
  int nonzero = 0;
  for (auto c : d.atom_class)
    if (c != AtomClass::zero) ++nonzero;
  return nonzero == 1;
}

// All antichains of supercritical atoms, empty antichain included,
// enumerated by depth-first subset search with incomparability pruning.
inline std::vector<Antichain> supercritical_antichains(const AtomDecomposition& d, int cap = 20) {
  if (static_cast<int>(d.supercritical.size()) > cap)
    throw resource_cap_error("too many supercritical atoms (" + std::to_string(d.supercritical.size()) +
                             " > cap " + std::to_string(cap) + "); raise the cap explicitly if intended");
  std::vector<Antichain> out;
  Antichain cur;
  const auto& sup = d.supercritical;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == sup.size()) {
      out.push_back(cur);
      return;
    }
    self(self, i + 1);  // skip sup[i]
    for (int a : cur)
      if (d.comparable(a, sup[i])) return;
    cur.push_back(sup[i]);
    self(self, i + 1);
    cur.pop_back();
  };
  rec(rec, 0);
  for (auto& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end(),
            [](const Antichain& a, const Antichain& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  return out;
}

// Maximal elements (under the reachability order) of the supercritical atoms
// contained in A.
inline Antichain maximal_supercritical_antichain(const AtomDecomposition& d, const Mask& A) {
  Antichain inside;
  for (int a : d.supercritical)
    if (mask_subset(d.atoms[a], A)) inside.push_back(a);
  Antichain maximal;
  for (int a : inside) {
    bool dominated = false;
    for (int b : inside)
      if (b != a && d.below(a, b) && !d.below(b, a)) dominated = true;
    if (!dominated) maximal.push_back(a);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

// A is admissible when it is a union of atoms.
inline bool is_admissible(const AtomDecomposition& d, const Mask& A) {
  for (const auto& atom : d.atoms) {
    bool any = false, all = true;
    for (std::size_t v = 0; v < A.size(); ++v)
      if (atom[v]) {
        if (A[v]) any = true;
        else all = false;
      }
    if (any && !all) return false;
  }
  return true;
}

// Schwartz max formula: rho(A) = max over non-zero atoms B inside A of R0(B).
inline double schwartz_radius(const SISModel& m, const AtomDecomposition& d, const Mask& A) {
  require_length(A.size(), m.size(), "mask");
  if (!is_admissible(d, A))
    throw std::domain_error("schwartz_radius: mask is not a union of atoms");
  double r = 0.0;
  for (std::size_t a = 0; a < d.num_atoms(); ++a)
    if (d.atom_class[a] != AtomClass::zero && mask_subset(d.atoms[a], A))
      r = std::max(r, d.atom_r0[a]);
  return r;
}

}  // namespace sis
