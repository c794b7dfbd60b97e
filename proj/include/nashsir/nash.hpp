#ifndef NASHSIR_NASH_HPP
#define NASHSIR_NASH_HPP

#include <algorithm>
#include <cmath>

#include "nashsir/model.hpp"

namespace nashsir {

/// Everything the per-instant distancing game depends on: the compartment
/// masses and the harm a susceptible agent suffers on unnoticed infection.
struct NashInputs {
  EpidemicState epi;
  double H = 0.0;  // L_C - L_S
  ModelParams p;
};

/// Marginal gain from distancing for an N-agent when everyone else distances
/// at d_N: alpha (1 - alpha d_N) beta S C H / N.
inline double marginal_gain(double d_N, const NashInputs& in) {
  const double N = in.epi.n_agents();
  return in.p.alpha * (1.0 - in.p.alpha * d_N) * in.p.beta * in.epi.S *
         in.epi.C * in.H / N;
}

/// Marginal cost of distancing: forgone public and social activity,
/// a1 alpha + a2 alpha ((1 - alpha d_N) N + R_I).
inline double marginal_cost(double d_N, const NashInputs& in) {
  return in.p.a1 * in.p.alpha +
         in.p.a2 * in.p.alpha *
             ((1.0 - in.p.alpha * d_N) * in.epi.n_agents() + in.epi.R_I);
}

/// Slope of an individual's payoff in d_i when the population plays d_N.
/// Both the gain and the cost are linear in d_i, so the slope is MG - MC.
inline double best_response_payoff_slope(double d_N, const NashInputs& in) {
  return marginal_gain(d_N, in) - marginal_cost(d_N, in);
}

/// Unique symmetric Nash equilibrium distancing intensity at one instant.
/// Cases: (i) MG(0) <= MC(0) -> 0 (no distancing is dominant);
/// (ii) MG(1) >= MC(1) -> 1 (full distancing is dominant);
/// (iii) otherwise the interior root of MG(d) = MC(d).
/// If N < 1e-12 there are no players; d* = 0 with `degenerate` set.
inline double equilibrium_distancing(const NashInputs& in,
                                     bool* degenerate = nullptr) {
  if (degenerate) *degenerate = false;
  const double N = in.epi.n_agents();
  if (N < 1e-12) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  const double a1 = in.p.a1, a2 = in.p.a2, alpha = in.p.alpha;
  if (in.H <= 0.0) return 0.0;  // MG(0) <= 0 < MC(0)
  const double X = in.p.beta * in.epi.S * in.epi.C * in.H / N;
  // Case (i): MG(0) <= MC(0), i.e. X <= a1 + a2 (N + R_I).
  if (X <= a1 + a2 * (N + in.epi.R_I)) return 0.0;
  // Case (ii): MG(1) >= MC(1), i.e. (1-alpha) X >= a1 + a2 ((1-alpha) N + R_I).
  if ((1.0 - alpha) * X >= a1 + a2 * ((1.0 - alpha) * N + in.epi.R_I))
    return 1.0;
  // Case (iii): interior. MG(d) = MC(d) is linear in d with unique root
  // d* = [X - a1 - a2 (N + R_I)] / [alpha (X - a2 N)].
  const double num = X - a1 - a2 * (N + in.epi.R_I);
  const double den = alpha * (X - a2 * N);
  // Near-singular denominator: the closed form loses accuracy, but the root
  // is still unique (MG' < MC' whenever both case inequalities are strict),
  // so bisect on the payoff slope.
  if (std::abs(den) < 1e-9 * std::max(1.0, std::abs(X))) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (best_response_payoff_slope(mid, in) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }
  return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace nashsir

#endif  // NASHSIR_NASH_HPP
