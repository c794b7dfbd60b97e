#ifndef NASHSIR_WELFARE_HPP
#define NASHSIR_WELFARE_HPP

#include <cmath>

#include "nashsir/economy.hpp"
#include "nashsir/model.hpp"

namespace nashsir {

/// Time derivatives of the five continuation-loss processes given the current
/// epidemic state and the common distancing intensity. Losses are nonnegative
/// totals of future harm; they burn off as flow losses accrue and jump when
/// agents change epidemiological state.
inline WelfareDerivative welfare_rhs(const EpidemicState& epi,
                                     const WelfareState& w, double d_N,
                                     const ModelParams& p) {
  const double N = epi.n_agents();
  const double open = 1.0 - p.alpha * d_N;
  const double A = open * N + epi.R_I;
  WelfareDerivative d;
  // Recovered-from-sickness agents only lose the social activity forgone by
  // everyone else's distancing and sickness.
  d.dL_RI = -p.a2 * (p.alpha * d_N * N + epi.I);
  d.dL_I = -(p.a0 + p.a1 + p.a2) + p.gamma * (w.L_I - w.L_RI);
  // Never-sick agents' own distancing loss: forgone public activity plus the
  // shortfall of social activity below the healthy benchmark.
  d.dL_RC = -p.a1 * p.alpha * d_N - p.a2 * (1.0 - open * A);
  if (p.lc_rates == LcRateConvention::dynamics_consistent) {
    d.dL_C = d.dL_RC + p.sigma * (w.L_I - w.L_C) + p.gamma * (w.L_RC - w.L_C);
  } else {
    d.dL_C = d.dL_RC + p.gamma * (w.L_I - w.L_C) + p.sigma * (w.L_RC - w.L_C);
  }
  d.dL_S =
      d.dL_RC + p.beta * open * open * epi.S * epi.C * (w.L_C - w.L_S);
  return d;
}

/// Continuation losses at the vaccine arrival time, in closed form from the
/// post-vaccine linear dynamics (no transmission, no distancing). With
/// P = I_T + C_T and Q = -C_T the sick prevalence is
/// I(tau) = P e^{-gamma tau} + Q e^{-(sigma+gamma) tau}, and:
///   L_RI = L_RC = L_S = a2 * integral of I  (only loss left is forgone
///     interaction with the sick);
///   L_I  = expected remaining own sick-time loss plus the post-recovery tail;
///   L_C  = expectation over the sickness (sigma) vs clearance (gamma)
///     branches plus the same tail.
inline WelfareState terminal_welfare(const EpidemicState& epi_T,
                                     const ModelParams& p) {
  const double s = p.sigma, g = p.gamma;
  const double C_T = epi_T.C, I_T = epi_T.I;
  const double P = I_T + C_T, Q = -C_T;

  WelfareState w;
  const double tail = p.a2 * (I_T / g + C_T * s / (g * (s + g)));
  w.L_S = w.L_RC = w.L_RI = tail;

  const double K = (p.a0 + p.a1 + p.a2) / g;  // expected own sick-time loss
  const double R1 = p.a2 * P / g;
  const double R2 = p.a2 * Q / (s + g);
  w.L_I = K + R1 / 2.0 + g * R2 / (s + 2.0 * g);
  w.L_C = s * K / (s + g) + p.a2 * P / (s + 2.0 * g) + R1 / 2.0 +
          p.a2 * Q / (2.0 * (s + g)) + g * R2 / (s + 2.0 * g);
  return w;
}

}  // namespace nashsir

#endif  // NASHSIR_WELFARE_HPP
