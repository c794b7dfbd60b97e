#ifndef NASHSIR_EPI_HPP
#define NASHSIR_EPI_HPP

#include <cmath>

#include "nashsir/model.hpp"

namespace nashsir {

/// Right-hand side of the behavior-coupled epidemic system. All not-yet-sick
/// agents share the common distancing intensity d_N.
inline EpiDerivative epi_rhs(const EpidemicState& epi, double d_N,
                             const ModelParams& p) {
  const double open = 1.0 - p.alpha * d_N;
  EpiDerivative d;
  d.dS = -p.beta * open * open * epi.S * epi.C;
  d.dC = -d.dS - (p.sigma + p.gamma) * epi.C;
  d.dI = p.sigma * epi.C - p.gamma * epi.I;
  d.dR_C = p.gamma * epi.C;
  d.dR_I = p.gamma * epi.I;
  return d;
}

/// Epidemic state at t = 0: mass delta_init in carriage, everyone else
/// susceptible.
inline EpidemicState initial_state(const ModelParams& p) {
  EpidemicState e;
  e.S = 1.0 - p.delta_init;
  e.C = p.delta_init;
  return e;
}

/// Closed-form epidemic state dt after the vaccine arrives. No transmission,
/// no distancing: S is frozen, C drains at sigma+gamma, I follows the linear
/// solution of dI = sigma C - gamma I.
inline EpidemicState post_T_state(const EpidemicState& epi_T, double dt,
                                  const ModelParams& p) {
  const double s = p.sigma, g = p.gamma;
  EpidemicState e;
  e.S = epi_T.S;
  e.C = epi_T.C * std::exp(-(s + g) * dt);
  e.I = std::exp(-g * dt) * (epi_T.I + epi_T.C * (1.0 - std::exp(-s * dt)));
  e.R_C = epi_T.R_C + epi_T.C * (g / (s + g)) * (1.0 - std::exp(-(s + g) * dt));
  // I(tau) = P e^{-g tau} + Q e^{-(s+g) tau} with P = I_T + C_T, Q = -C_T.
  const double P = epi_T.I + epi_T.C, Q = -epi_T.C;
  e.R_I = epi_T.R_I + P * (1.0 - std::exp(-g * dt)) +
          Q * (g / (s + g)) * (1.0 - std::exp(-(s + g) * dt));
  return e;
}

/// Ex-ante probability of ever becoming infected, evaluated in closed form
/// from the state at T: everyone outside S at T eventually resolves to R.
inline double attack_rate(const EpidemicState& epi_T) {
  return epi_T.C + epi_T.I + epi_T.R_C + epi_T.R_I;
}

inline double attack_rate(const Trajectory& traj, const ModelParams&) {
  return attack_rate(traj.back().epi);
}

}  // namespace nashsir

#endif  // NASHSIR_EPI_HPP
