#include <random>

#include "doctest.h"
#include "sis/dynamics.hpp"
#include "test_models.hpp"

using namespace sis;

TEST_CASE("integrate: scalar logistic-type model") {
  auto m = testmodels::scalar(2, 1);
  const auto traj = integrate(m, {0.9}, 1e3, 1e-10);
  CHECK(traj.terminal_reason == TerminalReason::residual_converged);
  CHECK(traj.terminal_state()[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(traj.max_clamp <= 1e-9);
}

TEST_CASE("integrate: equilibrium start stays put") {
  auto m = testmodels::scalar(2, 1);
  const auto traj = integrate(m, {0.5}, 10.0, 0.0);
  for (const auto& s : traj.states) CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("integrate: zero start stays zero") {
  const auto traj = integrate(testmodels::zoonosis(), {0, 0, 0}, 10.0, 0.0);
  for (const auto& s : traj.states)
    for (double v : s) CHECK(v == 0.0);
}

TEST_CASE("integrate: cross-check against fixed-step RK4") {
  auto m = testmodels::zoonosis();
  const Vec h{0.3, 0.1, 0.7};
  const auto traj = integrate(m, h, 5.0, 0.0);
  const Vec direct = testmodels::rk4_integrate(
      [&](const Vec& u) { return vector_field(m, u); }, h, 5.0, 1e-4);
  CHECK(sup_dist(traj.terminal_state(), direct) <= 1e-7);
}

TEST_CASE("integrate: input validation") {
  auto m = testmodels::scalar(1, 1);
  CHECK_THROWS_AS(integrate(m, {1.5}, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(m, {0.5}, -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(m, {0.5, 0.5}, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("trajectory times strictly increase and states stay in the box") {
  auto m = testmodels::westnile();
  const auto traj = integrate(m, {0.0, 1.0, 0.5}, 50.0, 0.0);
  for (std::size_t i = 1; i < traj.times.size(); ++i)
    CHECK(traj.times[i] > traj.times[i - 1]);
  for (const auto& s : traj.states)
    for (double v : s) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  CHECK(traj.max_clamp <= 1e-9);
}

TEST_CASE("maximal_equilibrium") {
  SUBCASE("scalar supercritical") {
    const auto rec = maximal_equilibrium(testmodels::scalar(2, 1), full_mask(1));
    CHECK(rec.state[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rec.residual <= 1e-10);
    CHECK(rec.support == Mask{1});
  }
  SUBCASE("scalar subcritical gives the DFE") {
    const auto rec = maximal_equilibrium(testmodels::scalar(0.5, 1), full_mask(1));
    CHECK(rec.state[0] == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(rec.support == Mask{0});
  }
  SUBCASE("continuum example: g*(x) = 1/(1+x) on a 10-point grid") {
    auto m = testmodels::continuum_example(10);
    const auto rec = maximal_equilibrium(m, full_mask(10));
    for (std::size_t i = 0; i < 10; ++i) {
      const double x = static_cast<double>(i + 1) / 10.0;
      CHECK(rec.state[i] == doctest::Approx(1.0 / (1.0 + x)).epsilon(1e-6));
    }
  }
  SUBCASE("restricted region") {
    // zoonosis restricted to {D,H}: W never activates
    const auto rec = maximal_equilibrium(testmodels::zoonosis(), {0, 1, 1});
    CHECK(rec.state[0] == 0.0);
    CHECK(rec.state[1] > 0.0);
    CHECK(rec.state[2] > 0.0);
  }
}

TEST_CASE("predict_limit") {
  auto z = testmodels::zoonosis();
  const auto dz = decompose(z);
  SUBCASE("zoonosis from H only") {
    const auto rec = predict_limit(z, dz, {0, 0, 0.5});
    CHECK(rec.support == Mask{0, 0, 1});
    CHECK(rec.antichain == Antichain{dz.atom_of[2]});
  }
  auto w = testmodels::westnile();
  const auto dw = decompose(w);
  SUBCASE("west nile from H only dies out") {
    const auto rec = predict_limit(w, dw, {0, 0, 0.9});
    CHECK(sup_norm(rec.state) == 0.0);
    CHECK(rec.antichain.empty());
  }
  SUBCASE("west nile from M reaches the endemic equilibrium") {
    const auto rec = predict_limit(w, dw, {0, 0.1, 0});
    CHECK(rec.support == Mask{1, 1, 1});
    CHECK(rec.is_maximal);
  }
}

TEST_CASE("verify_limit") {
  SUBCASE("prediction matches observation on zoonosis from 1") {
    auto z = testmodels::zoonosis();
    const auto dz = decompose(z);
    const auto pred = predict_limit(z, dz, {1, 1, 1});
    const auto rep = verify_limit(z, {1, 1, 1}, pred, 200.0);
    CHECK(rep.matched);
    CHECK(rep.sup_distance <= 1e-6);
    CHECK(rep.gamma_weighted_distance <= 1e-6);
  }
  SUBCASE("subcritical decay rate") {
    auto m = testmodels::scalar(0.5, 1);
    const auto d = decompose(m);
    const auto pred = predict_limit(m, d, {1.0});
    const auto rep = verify_limit(m, {1.0}, pred, 60.0);
    CHECK(rep.expected_decay_rate == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rep.fitted_decay_rate == doctest::Approx(0.5).epsilon(0.1));
  }
  SUBCASE("start at the prediction: distance 0") {
    auto m = testmodels::scalar(2, 1);
    const auto d = decompose(m);
    const auto pred = predict_limit(m, d, {0.5});
    const auto rep = verify_limit(m, pred.state, pred, 1.0);
    CHECK(rep.sup_distance <= 1e-8);
  }
}

TEST_CASE("check_monotone_flow") {
  auto m = testmodels::zoonosis();
  SUBCASE("extreme pair") {
    CHECK(check_monotone_flow(m, {0, 0, 0}, {1, 1, 1}, 50.0).order_preserved);
  }
  SUBCASE("scalar comparison") {
    auto s = testmodels::scalar(2, 1);
    CHECK(check_monotone_flow(s, {0.2}, {0.8}, 50.0).order_preserved);
  }
  SUBCASE("equal starts stay equal") {
    const auto rep = check_monotone_flow(m, {0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}, 20.0);
    CHECK(rep.order_preserved);
  }
  SUBCASE("unordered starts rejected") {
    CHECK_THROWS_AS(check_monotone_flow(m, {0.9, 0, 0}, {0.1, 1, 1}, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("semi-flow from 1 is non-increasing") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    auto m = testmodels::random_model(rng, 6, false);
    const auto traj = integrate(m, Vec(m.size(), 1.0), 50.0, 0.0);
    for (std::size_t s = 1; s < traj.states.size(); ++s)
      for (std::size_t i = 0; i < m.size(); ++i)
        CHECK(traj.states[s][i] <= traj.states[s - 1][i] + 1e-9);
  }
}

TEST_CASE("support of the flow equals the future of the initial support") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    // kernel entries bounded away from 0 so reachable mass clears the
    // support threshold by t = 1
    const std::size_t n = 2 + rep % 5;
    Matrix kernel(n, Vec(n, 0.0));
    for (auto& row : kernel)
      for (double& v : row)
        if (unif(rng) < 0.5) v = 0.5 + 1.5 * unif(rng);
    auto m = make_model(std::move(kernel), Vec(n, 1.0), IncidenceFunction::mass_action());
    const auto g = transmission_graph(m);
    Vec h(m.size(), 0.0);
    for (double& v : h)
      if (unif(rng) < 0.5) v = 0.2 + 0.8 * unif(rng);
    const auto traj = integrate(m, h, 1.0, 0.0);
    const Mask expect = future(g, support_mask(h, 0.0));
    CHECK(support_mask(traj.terminal_state(), 1e-8) == expect);
  }
}

TEST_CASE("restriction consistency on invariant sets") {
  // zoonosis: {D,H} is invariant; trajectories of the full and projected
  // models from a state supported there coincide
  auto m = testmodels::zoonosis();
  const Mask A{0, 1, 1};
  const Vec h{0, 0.4, 0.2};
  const auto full = integrate(m, h, 10.0, 0.0);
  const auto proj = integrate(project_model(m, A), h, 10.0, 0.0);
  CHECK(sup_dist(full.terminal_state(), proj.terminal_state()) <= 1e-8);
}

TEST_CASE("parameter monotonicity of the maximal equilibrium") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 8; ++rep) {
    auto m = testmodels::random_model(rng, 5, true);
    const auto base = maximal_equilibrium(m, full_mask(m.size()));
    SISModel stronger = m;
    for (auto& row : stronger.kernel)
      for (double& v : row) v *= 1.0 + unif(rng);
    for (double& g : stronger.gamma) g *= 1.0 - 0.3 * unif(rng);
    const auto more = maximal_equilibrium(stronger, full_mask(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
      CHECK(more.state[i] >= base.state[i] - 1e-8);
  }
}
