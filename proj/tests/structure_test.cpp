#include <random>
#include <set>

#include "doctest.h"
#include "sis/structure.hpp"
#include "test_models.hpp"

using namespace sis;

namespace {

Mask to_mask(std::initializer_list<int> idx, std::size_t n) {
  Mask m(n, 0);
  for (int i : idx) m[i] = 1;
  return m;
}

}  // namespace

TEST_CASE("transmission_graph") {
  SUBCASE("west nile edges") {
    // features B=0, M=1, H=2; expected edges M->B, B->M, M->H
    const auto g = transmission_graph(testmodels::westnile());
    std::set<std::pair<int, int>> edges;
    for (std::size_t y = 0; y < g.n; ++y)
      for (int x : g.out[y]) edges.insert({static_cast<int>(y), x});
    CHECK(edges == std::set<std::pair<int, int>>{{0, 1}, {1, 0}, {1, 2}});
  }
  SUBCASE("zero kernel is edgeless") {
    auto m = make_model({{0, 0}, {0, 0}}, {1, 1}, IncidenceFunction::mass_action());
    const auto g = transmission_graph(m);
    CHECK(g.out[0].empty());
    CHECK(g.out[1].empty());
  }
  SUBCASE("zoonosis has 5 edges") {
    const auto g = transmission_graph(testmodels::zoonosis());
    std::size_t count = 0;
    for (const auto& succ : g.out) count += succ.size();
    CHECK(count == 5);
  }
}

TEST_CASE("future") {
  const auto g = transmission_graph(testmodels::zoonosis());
  SUBCASE("chain closure") {
    CHECK(future(g, to_mask({0}, 3)) == to_mask({0, 1, 2}, 3));
    CHECK(future(g, to_mask({1}, 3)) == to_mask({1, 2}, 3));
    CHECK(future(g, to_mask({2}, 3)) == to_mask({2}, 3));
  }
  SUBCASE("empty set") {
    CHECK(future(g, empty_mask(3)) == empty_mask(3));
  }
  SUBCASE("west nile: humans reach nothing") {
    const auto wg = transmission_graph(testmodels::westnile());
    CHECK(future(wg, to_mask({2}, 3)) == to_mask({2}, 3));
    CHECK(future(wg, to_mask({0}, 3)) == to_mask({0, 1, 2}, 3));
  }
  SUBCASE("closure operator: extensive, monotone, idempotent; distributes over union") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
      auto m = testmodels::random_model(rng, 7, false);
      const auto gr = transmission_graph(m);
      Mask A(m.size()), B(m.size());
      for (auto& v : A) v = unif(rng) < 0.4 ? 1 : 0;
      for (auto& v : B) v = unif(rng) < 0.4 ? 1 : 0;
      const Mask fa = future(gr, A), fb = future(gr, B);
      CHECK(mask_subset(A, fa));
      CHECK(future(gr, fa) == fa);
      CHECK(future(gr, mask_union(A, B)) == mask_union(fa, fb));
      if (mask_subset(A, B)) CHECK(mask_subset(fa, fb));
    }
  }
}

TEST_CASE("is_invariant") {
  const auto g = transmission_graph(testmodels::zoonosis());
  CHECK(is_invariant(g, to_mask({2}, 3)));        // H has no exit
  CHECK_FALSE(is_invariant(g, to_mask({0}, 3)));  // W -> D exits
  CHECK(is_invariant(g, full_mask(3)));
}

TEST_CASE("decompose: west nile") {
  const auto d = decompose(testmodels::westnile());
  REQUIRE(d.num_atoms() == 2);
  int bm = -1, h = -1;
  for (std::size_t a = 0; a < 2; ++a)
    (mask_count(d.atoms[a]) == 2 ? bm : h) = static_cast<int>(a);
  REQUIRE(bm >= 0);
  REQUIRE(h >= 0);
  CHECK(d.atom_class[h] == AtomClass::zero);
  CHECK(d.atom_class[bm] == AtomClass::supercritical);
  CHECK(d.atom_r0[bm] == doctest::Approx(2.0));  // sqrt(2*2)
  CHECK(is_monatomic(d));
}

TEST_CASE("decompose: zoonosis") {
  const auto d = decompose(testmodels::zoonosis());
  REQUIRE(d.num_atoms() == 3);
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(d.atom_class[a] == AtomClass::supercritical);
    CHECK(d.atom_r0[a] == doctest::Approx(2.0));
    CHECK(mask_count(d.atoms[a]) == 1);
  }
  // total order H below D below W
  const int aw = d.atom_of[0], ad = d.atom_of[1], ah = d.atom_of[2];
  CHECK(d.below(ah, ad));
  CHECK(d.below(ad, aw));
  CHECK(d.below(ah, aw));
  CHECK_FALSE(d.below(aw, ad));
  CHECK_FALSE(is_monatomic(d));
}

TEST_CASE("decompose: diagonal zero kernel") {
  auto m = make_model({{0, 0}, {0, 0}}, {1, 1}, IncidenceFunction::mass_action());
  const auto d = decompose(m);
  REQUIRE(d.num_atoms() == 2);
  CHECK(d.atom_class[0] == AtomClass::zero);
  CHECK(d.atom_class[1] == AtomClass::zero);
  CHECK(d.supercritical.empty());
  CHECK_FALSE(is_monatomic(d));
}

TEST_CASE("order is a partial order and matches future inclusion") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    auto m = testmodels::random_model(rng, 7, false);
    const auto d = decompose(m);
    const std::size_t k = d.num_atoms();
    for (std::size_t a = 0; a < k; ++a) {
      CHECK(d.below(a, a));  // reflexive
      for (std::size_t b = 0; b < k; ++b) {
        CHECK(d.below(a, b) == mask_subset(d.futures[a], d.futures[b]));
        if (a != b && d.below(a, b) && d.below(b, a)) FAIL("antisymmetry violated");
        for (std::size_t c = 0; c < k; ++c)
          if (d.below(a, b) && d.below(b, c)) CHECK(d.below(a, c));
      }
    }
    // atoms partition the features
    std::size_t covered = 0;
    for (const auto& atom : d.atoms) covered += mask_count(atom);
    CHECK(covered == m.size());
  }
}

TEST_CASE("supercritical_antichains") {
  SUBCASE("zoonosis chain: 4 antichains") {
    const auto d = decompose(testmodels::zoonosis());
    const auto chains = supercritical_antichains(d);
    REQUIRE(chains.size() == 4);
    CHECK(chains[0].empty());
    for (std::size_t i = 1; i < 4; ++i) CHECK(chains[i].size() == 1);
  }
  SUBCASE("west nile: 2 antichains") {
    const auto d = decompose(testmodels::westnile());
    CHECK(supercritical_antichains(d).size() == 2);
  }
  SUBCASE("two incomparable atoms: 4 antichains") {
    auto m = make_model({{2, 0}, {0, 3}}, {1, 1}, IncidenceFunction::mass_action());
    const auto d = decompose(m);
    const auto chains = supercritical_antichains(d);
    REQUIRE(chains.size() == 4);
    CHECK(chains.back().size() == 2);
  }
  SUBCASE("antichain futures are pairwise distinct") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 15; ++rep) {
      auto m = testmodels::random_model(rng, 7, false);
      const auto d = decompose(m);
      const auto chains = supercritical_antichains(d);
      for (std::size_t i = 0; i < chains.size(); ++i)
        for (std::size_t j = i + 1; j < chains.size(); ++j)
          CHECK_FALSE(mask_equal(d.future_of_antichain(chains[i]),
                                 d.future_of_antichain(chains[j])));
    }
  }
}

TEST_CASE("maximal_supercritical_antichain") {
  const auto d = decompose(testmodels::zoonosis());
  const int aw = d.atom_of[0], ad = d.atom_of[1];
  CHECK(maximal_supercritical_antichain(d, full_mask(3)) == Antichain{aw});
  CHECK(maximal_supercritical_antichain(d, empty_mask(3)).empty());
  CHECK(maximal_supercritical_antichain(d, to_mask({1, 2}, 3)) == Antichain{ad});
}

TEST_CASE("schwartz_radius") {
  auto m = testmodels::zoonosis();
  const auto d = decompose(m);
  SUBCASE("matches R0 on futures") {
    for (std::size_t a = 0; a < d.num_atoms(); ++a) {
      const Mask A = d.futures[a];
      CHECK(schwartz_radius(m, d, A) == doctest::Approx(R0(m, A)).epsilon(1e-8));
    }
  }
  SUBCASE("empty mask") {
    CHECK(schwartz_radius(m, d, empty_mask(3)) == 0.0);
  }
  SUBCASE("non-admissible mask rejected") {
    auto wn = testmodels::westnile();
    const auto dw = decompose(wn);
    // half of the B-M atom
    CHECK_THROWS_AS(schwartz_radius(wn, dw, to_mask({0}, 3)), std::domain_error);
  }
  SUBCASE("random models: schwartz formula equals projected R0") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
      auto rm = testmodels::random_model(rng, 7, false);
      const auto rd = decompose(rm);
      for (std::size_t a = 0; a < rd.num_atoms(); ++a) {
        const Mask A = rd.futures[a];
        CAPTURE(rep);
        CHECK(schwartz_radius(rm, rd, A) == doctest::Approx(R0(rm, A)).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("antichain cap") {
  // 21 isolated supercritical atoms exceed the default cap
  const std::size_t n = 21;
  Matrix kernel(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) kernel[i][i] = 2.0;
  auto m = make_model(std::move(kernel), Vec(n, 1.0), IncidenceFunction::mass_action());
  const auto d = decompose(m);
  CHECK_THROWS_AS(supercritical_antichains(d), resource_cap_error);

  // 10 isolated supercritical atoms: every subset is an antichain
  const std::size_t k = 10;
  Matrix kernel10(k, Vec(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) kernel10[i][i] = 2.0;
  auto m10 = make_model(std::move(kernel10), Vec(k, 1.0), IncidenceFunction::mass_action());
  CHECK(supercritical_antichains(decompose(m10)).size() == (1u << k));
}
