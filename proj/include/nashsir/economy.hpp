#ifndef NASHSIR_ECONOMY_HPP
#define NASHSIR_ECONOMY_HPP

#include "nashsir/model.hpp"

namespace nashsir {

/// Population-average availability for social interaction:
/// A = (1 - alpha d_N) N + R_I = 1 - I - alpha d_N N.
inline double availability(const EpidemicState& epi, double d_N, double alpha) {
  return (1.0 - alpha * d_N) * epi.n_agents() + epi.R_I;
}

/// Flow benefit of a well agent distancing at d_i given availability A:
/// a0 + a1 (1 - alpha d_i) + a2 (1 - alpha d_i) A.
inline double flow_benefit(double d_i, double A, const ModelParams& p) {
  const double open = 1.0 - p.alpha * d_i;
  return p.a0 + p.a1 * open + p.a2 * open * A;
}

/// Population-wide lost economic activity per unit time:
/// a0 I + a1 (1 - A) + a2 (1 - A^2).
inline double aggregate_flow_loss(const EpidemicState& epi, double d_N,
                                  const ModelParams& p) {
  const double A = availability(epi, d_N, p.alpha);
  return p.a0 * epi.I + p.a1 * (1.0 - A) + p.a2 * (1.0 - A * A);
}

}  // namespace nashsir

#endif  // NASHSIR_ECONOMY_HPP
