#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nashsir/shooter.hpp"
#include "nashsir/simulate.hpp"

using namespace nashsir;

namespace {

// Closed-form final condition of the unique no-transmission equilibrium:
// nobody distances (H stays below the distancing threshold when beta = 0,
// since the marginal gain is identically zero) and the linear system solves
// exactly.
FinalCondition no_transmission_fc(const ModelParams& p) {
  const double s = p.sigma, g = p.gamma, D = p.delta_init, T = p.T;
  FinalCondition fc;
  fc.S_T = 1.0 - D;
  fc.C_T = D * std::exp(-(s + g) * T);
  fc.I_T = D * std::exp(-g * T) * (1.0 - std::exp(-s * T));
  const double R_C = D * g / (s + g) * (1.0 - std::exp(-(s + g) * T));
  fc.R_I_T = D - fc.C_T - fc.I_T - R_C;
  return fc;
}

ModelParams beta0_params() {
  ModelParams p;
  p.beta = 0.0;
  p.sigma = 0.2;
  p.gamma = 0.1;
  p.alpha = 0.5;
  p.delta_init = 0.05;
  p.T = 10.0;
  return p;
}

}  // namespace

TEST_CASE("final condition validity and derived R_C") {
  FinalCondition fc{0.5, 0.1, 0.1, 0.1};
  CHECK(fc.r_c() == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(fc.valid());
  CHECK(fc.to_state().sum() == doctest::Approx(1.0).epsilon(1e-14));
  FinalCondition bad{0.5, 0.3, 0.3, 0.3};  // sum > 1
  CHECK_FALSE(bad.valid());
}

TEST_CASE("no-transmission closed form is classified Equilibrium") {
  const ModelParams p = beta0_params();
  IntegratorConfig cfg;
  const auto r = trace_backward(no_transmission_fc(p), p, cfg);
  REQUIRE(r.classification == Classification::Equilibrium);
  CHECK(r.residual_norm() < 1e-8);
  // The equilibrium has no distancing anywhere.
  for (const auto& s : r.traced) CHECK(s.d_N == 0.0);
  // Trajectory is reindexed forward.
  CHECK(r.traced.front().t == doctest::Approx(0.0));
  CHECK(r.traced.back().t == doctest::Approx(p.T));
  // Mass conservation along the backward trace.
  for (const auto& s : r.traced)
    CHECK(std::abs(s.epi.sum() - 1.0) < 1e-9);
}

TEST_CASE("infeasibly large S_T cannot reach the initial state") {
  ModelParams p = beta0_params();
  p.beta = 2.0;
  IntegratorConfig cfg;
  FinalCondition fc = no_transmission_fc(p);
  fc.S_T = 1.0 - p.delta_init / 2.0;  // S can only shrink forward in time
  fc.R_I_T = std::max(0.0, fc.R_I_T - p.delta_init / 2.0);
  const auto r = trace_backward(fc, p, cfg);
  CHECK(r.classification != Classification::Equilibrium);
}

TEST_CASE("degenerate corner hits an invalid boundary") {
  ModelParams p = beta0_params();
  p.beta = 3.0;
  IntegratorConfig cfg;
  const auto r = trace_backward(FinalCondition{0.0, 0.0, 1.0, 0.0}, p, cfg);
  CHECK(r.classification == Classification::InvalidBoundary);
  CHECK(std::isfinite(r.boundary_time));
}

TEST_CASE("classification is deterministic bit-for-bit") {
  ModelParams p = beta0_params();
  p.beta = 1.2;
  IntegratorConfig cfg;
  const FinalCondition fc{0.7, 0.05, 0.05, 0.1};
  const auto a = trace_backward(fc, p, cfg);
  const auto b = trace_backward(fc, p, cfg);
  CHECK(a.classification == b.classification);
  REQUIRE(a.traced.size() == b.traced.size());
  for (std::size_t i = 0; i < a.traced.size(); ++i) {
    CHECK(a.traced[i].epi.S == b.traced[i].epi.S);
    CHECK(a.traced[i].welfare.L_S == b.traced[i].welfare.L_S);
    CHECK(a.traced[i].d_N == b.traced[i].d_N);
  }
  for (int i = 0; i < 5; ++i)
    CHECK(a.initial_residual[i] == b.initial_residual[i]);
}

TEST_CASE("step budget exhaustion reports NonTerminating") {
  const ModelParams p = beta0_params();
  IntegratorConfig cfg;
  TraceOptions opts;
  opts.step_budget_factor = 0.01;
  const auto r = trace_backward(no_transmission_fc(p), p, cfg, opts);
  CHECK(r.classification == Classification::NonTerminating);
}

TEST_CASE("backward-forward round trip with frozen behavior") {
  // Forward-simulate under random smooth schedules, then trace the final
  // state backward with the same schedule substituted for the equilibrium
  // rule; the initial state must be recovered. (Smoothness keeps the
  // integrator at full order; schedules with jumps inside a step degrade it.)
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    ModelParams p;
    p.beta = 0.5 + 5.0 * u(rng);
    p.sigma = 0.1 + 0.4 * u(rng);
    p.gamma = 0.05 + 0.3 * u(rng);
    p.alpha = 0.2 + 0.8 * u(rng);
    p.delta_init = 0.01 + 0.2 * u(rng);
    p.T = 4.0 + 8.0 * u(rng);
    const double level = 0.5 * u(rng) + 0.25;
    const double amp = std::min(level, 1.0 - level) * u(rng);
    const double omega = 3.0 * u(rng);
    const double phase = 6.28 * u(rng);
    auto schedule = [=](double t) {
      return level + amp * std::sin(omega * t + phase);
    };

    IntegratorConfig cfg;
    auto rhs = [&](double t, const StateVec<5>& y) {
      EpidemicState e;
      e.S = y[0]; e.C = y[1]; e.I = y[2]; e.R_C = y[3]; e.R_I = y[4];
      const auto d = epi_rhs(e, schedule(t), p);
      return StateVec<5>{d.dS, d.dC, d.dI, d.dR_C, d.dR_I};
    };
    const auto es = initial_state(p);
    StateVec<5> yT{};
    integrate<5>(rhs, StateVec<5>{es.S, es.C, es.I, es.R_C, es.R_I}, 0.0, p.T,
                 cfg, [&](double, const StateVec<5>& y) {
                   yT = y;
                   return true;
                 });
    StateVec<5> y0{};
    integrate<5>(rhs, yT, p.T, 0.0, cfg, [&](double, const StateVec<5>& y) {
      y0 = y;
      return true;
    });
    const auto e0 = initial_state(p);
    CHECK(std::abs(y0[0] - e0.S) < 1e-7);
    CHECK(std::abs(y0[1] - e0.C) < 1e-7);
    CHECK(std::abs(y0[2]) < 1e-7);
    CHECK(std::abs(y0[3]) < 1e-7);
    CHECK(std::abs(y0[4]) < 1e-7);
  }
}

TEST_CASE("verify_fixed_point") {
  const ModelParams p = beta0_params();
  IntegratorConfig cfg;
  const auto r = trace_backward(no_transmission_fc(p), p, cfg);
  REQUIRE(r.classification == Classification::Equilibrium);

  SUBCASE("closed-form equilibrium passes") {
    CHECK(verify_fixed_point(r, p, cfg) < 1e-7);
  }

  SUBCASE("a perturbed schedule is rejected") {
    CandidateResult tampered = r;
    for (auto& s : tampered.traced)
      if (s.t <= p.T / 2.0) s.d_N = std::min(1.0, s.d_N + 0.1);
    CHECK(verify_fixed_point(tampered, p, cfg) > 1e-2);
  }

  SUBCASE("non-equilibrium candidates are rejected by contract") {
    CandidateResult wrong = r;
    wrong.classification = Classification::WrongInitialState;
    CHECK_THROWS_AS(verify_fixed_point(wrong, p, cfg), std::invalid_argument);
  }
}
