#ifndef NASHSIR_MODEL_HPP
#define NASHSIR_MODEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nashsir {

/// Convention for the transition-rate placement in the carriage welfare
/// equation. `dynamics_consistent` attaches sigma to the sickness jump and
/// gamma to the clearance jump, matching the compartment transition rates;
/// `as_printed` swaps them.
enum class LcRateConvention { dynamics_consistent, as_printed };

/// Epidemiological and economic constants of one model instance.
struct ModelParams {
  double beta = 3.0;        // transmission rate (> 0)
  double sigma = 0.2;       // carriage -> sickness rate (> 0)
  double gamma = 0.1;       // clearance rate (> 0)
  double alpha = 0.5;       // maximal distancing effectiveness, in (0, 1]
  double delta_init = 0.01; // initial carriage mass, in (0, 1)
  double T = 100.0;         // vaccine arrival time (> 0, finite)
  double a0 = 1.0;          // isolated-activity benefit (> 0)
  double a1 = 1.0;          // public-activity benefit (> 0)
  double a2 = 1.0;          // social-activity benefit (> 0)
  LcRateConvention lc_rates = LcRateConvention::dynamics_consistent;
};

/// Validates every parameter constraint; throws std::invalid_argument naming
/// the first violated one.
inline const ModelParams& validate_params(const ModelParams& p) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) fail("beta must be >= 0 and finite");
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) fail("sigma must be > 0 and finite");
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) fail("gamma must be > 0 and finite");
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) fail("alpha must be in (0,1]");
  if (!(p.delta_init > 0.0 && p.delta_init < 1.0)) fail("delta_init must be in (0,1)");
  if (!(p.T > 0.0) || !std::isfinite(p.T)) fail("T must be > 0 and finite");
  if (!(p.a0 > 0.0)) fail("a0 must be > 0");
  if (!(p.a1 > 0.0)) fail("a1 must be > 0");
  if (!(p.a2 > 0.0)) fail("a2 must be > 0");
  return p;
}

/// Compartment masses at one instant. Always sums to 1 up to roundoff.
struct EpidemicState {
  double S = 0.0;
  double C = 0.0;
  double I = 0.0;
  double R_C = 0.0;
  double R_I = 0.0;

  double sum() const { return S + C + I + R_C + R_I; }
  /// Mass of never-sick agents (the N information state).
  double n_agents() const { return S + C + R_C; }
};

/// Continuation losses by epidemiological state.
struct WelfareState {
  double L_S = 0.0;
  double L_C = 0.0;
  double L_I = 0.0;
  double L_RC = 0.0;
  double L_RI = 0.0;

  /// Harm of susceptible exposure.
  double harm() const { return L_C - L_S; }
};

struct EpiDerivative {
  double dS = 0.0, dC = 0.0, dI = 0.0, dR_C = 0.0, dR_I = 0.0;
  double sum() const { return dS + dC + dI + dR_C + dR_I; }
};

struct WelfareDerivative {
  double dL_S = 0.0, dL_C = 0.0, dL_I = 0.0, dL_RC = 0.0, dL_RI = 0.0;
};

struct TrajectorySample {
  double t = 0.0;
  EpidemicState epi;
  WelfareState welfare;
  double d_N = 0.0;    // distancing intensity in [0,1]
  double A = 1.0;      // availability in [0,1]
  double gamma_E = 0.0; // aggregate flow economic loss
};

using Trajectory = std::vector<TrajectorySample>;

}  // namespace nashsir

#endif  // NASHSIR_MODEL_HPP
