#ifndef NASHSIR_SHOOTER_HPP
#define NASHSIR_SHOOTER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "nashsir/economy.hpp"
#include "nashsir/epi.hpp"
#include "nashsir/integrator.hpp"
#include "nashsir/model.hpp"
#include "nashsir/nash.hpp"
#include "nashsir/welfare.hpp"

namespace nashsir {

/// Proposed compartment masses at the vaccine arrival time. The fifth mass
/// R_C is pinned down by conservation.
struct FinalCondition {
  double S_T = 0.0;
  double C_T = 0.0;
  double I_T = 0.0;
  double R_I_T = 0.0;

  double r_c() const { return 1.0 - (S_T + C_T + I_T + R_I_T); }

  bool valid() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    return in01(S_T) && in01(C_T) && in01(I_T) && in01(R_I_T) && r_c() >= -1e-12;
  }

  EpidemicState to_state() const {
    EpidemicState e;
    e.S = S_T;
    e.C = C_T;
    e.I = I_T;
    e.R_C = std::max(0.0, r_c());
    e.R_I = R_I_T;
    return e;
  }
};

enum class Classification {
  Equilibrium,        // backward trace lands on the required initial state
  InvalidBoundary,    // a compartment went negative at an interior time
  WrongInitialState,  // trace reached t=0 but at the wrong initial state
  NonTerminating      // trace exceeded its step budget (diagnostic only)
};

struct CandidateResult {
  Classification classification = Classification::WrongInitialState;
  Trajectory traced;  // reindexed forward: t ascending from 0 to T
  // Deviation of the traced state at t=0 from (1-delta, delta, 0, 0, 0).
  std::array<double, 5> initial_residual{};
  double boundary_time = std::numeric_limits<double>::quiet_NaN();
  std::string diagnostic;

  double residual_norm() const {
    double m = 0.0;
    for (double r : initial_residual) m = std::max(m, std::abs(r));
    return m;
  }
};

struct TraceOptions {
  double match_tol = 1e-8;       // Equilibrium iff residual max-norm below this
  double boundary_slack = 1e-10; // tolerated negative compartment excursion
  bool record_trajectory = true;
  // Accepted-step budget as a multiple of the nominal step count; exceeding it
  // classifies the trace NonTerminating (can only trigger in adaptive mode).
  double step_budget_factor = 10.0;
};

namespace detail {

// Layout of the coupled backward system.
inline StateVec<10> pack(const EpidemicState& e, const WelfareState& w) {
  return {e.S, e.C, e.I, e.R_C, e.R_I, w.L_S, w.L_C, w.L_I, w.L_RC, w.L_RI};
}

inline EpidemicState unpack_epi(const StateVec<10>& y) {
  EpidemicState e;
  e.S = y[0]; e.C = y[1]; e.I = y[2]; e.R_C = y[3]; e.R_I = y[4];
  return e;
}

inline WelfareState unpack_welfare(const StateVec<10>& y) {
  WelfareState w;
  w.L_S = y[5]; w.L_C = y[6]; w.L_I = y[7]; w.L_RC = y[8]; w.L_RI = y[9];
  return w;
}

// RHS of the coupled system with d_N resolved to the instantaneous Nash
// equilibrium at every stage evaluation.
struct CoupledRhs {
  const ModelParams& p;

  StateVec<10> operator()(double /*t*/, const StateVec<10>& y) const {
    const EpidemicState e = unpack_epi(y);
    const WelfareState w = unpack_welfare(y);
    NashInputs in{e, w.harm(), p};
    const double d = equilibrium_distancing(in);
    const EpiDerivative de = epi_rhs(e, d, p);
    const WelfareDerivative dw = welfare_rhs(e, w, d, p);
    return {de.dS, de.dC, de.dI, de.dR_C, de.dR_I,
            dw.dL_S, dw.dL_C, dw.dL_I, dw.dL_RC, dw.dL_RI};
  }
};

inline TrajectorySample make_sample(double t, const StateVec<10>& y,
                                    const ModelParams& p) {
  TrajectorySample s;
  s.t = t;
  s.epi = unpack_epi(y);
  s.welfare = unpack_welfare(y);
  NashInputs in{s.epi, s.welfare.harm(), p};
  s.d_N = equilibrium_distancing(in);
  s.A = availability(s.epi, s.d_N, p.alpha);
  s.gamma_E = aggregate_flow_loss(s.epi, s.d_N, p);
  return s;
}

}  // namespace detail

/// Traces one candidate final condition backward from T to 0 through the
/// coupled epidemic + welfare system and classifies the outcome. The traced
/// trajectory is returned in forward time order.
inline CandidateResult trace_backward(const FinalCondition& fc,
                                      const ModelParams& p,
                                      const IntegratorConfig& cfg,
                                      const TraceOptions& opts = {}) {
  CandidateResult out;
  if (!fc.valid()) {
    out.classification = Classification::InvalidBoundary;
    out.boundary_time = p.T;
    out.diagnostic = "final condition outside the simplex";
    return out;
  }

  const EpidemicState epi_T = fc.to_state();
  const WelfareState w_T = terminal_welfare(epi_T, p);
  const StateVec<10> y_T = detail::pack(epi_T, w_T);
  detail::CoupledRhs rhs{p};

  const double nominal_steps = p.T / cfg.effective_step(p.T);
  const auto step_budget =
      static_cast<std::size_t>(opts.step_budget_factor * nominal_steps) + 1;

  bool hit_boundary = false, over_budget = false;
  double boundary_t = std::numeric_limits<double>::quiet_NaN();
  StateVec<10> y0{};
  std::size_t steps = 0;

  auto observe = [&](double t, const StateVec<10>& y) {
    for (double v : y) {
      if (!std::isfinite(v)) {
        hit_boundary = true;
        boundary_t = t;
        return false;
      }
    }
    const double mn = std::min({y[0], y[1], y[2], y[3], y[4]});
    if (mn < -opts.boundary_slack && t > 0.0) {
      hit_boundary = true;
      boundary_t = t;
      return false;
    }
    if (opts.record_trajectory) out.traced.push_back(detail::make_sample(t, y, p));
    y0 = y;
    if (++steps > step_budget) {
      over_budget = true;
      return false;
    }
    return true;
  };

  try {
    integrate<10>(rhs, y_T, p.T, 0.0, cfg, observe);
  } catch (const std::runtime_error& e) {
    out.classification = Classification::InvalidBoundary;
    out.boundary_time = boundary_t;
    out.diagnostic = e.what();
    out.traced.clear();
    return out;
  }

  if (hit_boundary) {
    out.classification = Classification::InvalidBoundary;
    out.boundary_time = boundary_t;
    out.traced.clear();
    return out;
  }
  if (over_budget) {
    out.classification = Classification::NonTerminating;
    out.diagnostic = "step budget exceeded";
    out.traced.clear();
    return out;
  }

  std::reverse(out.traced.begin(), out.traced.end());
  out.initial_residual = {y0[0] - (1.0 - p.delta_init), y0[1] - p.delta_init,
                          y0[2], y0[3], y0[4]};
  out.classification = out.residual_norm() < opts.match_tol
                           ? Classification::Equilibrium
                           : Classification::WrongInitialState;
  return out;
}

/// Two-sided fixed-point check of an Equilibrium candidate: re-simulates the
/// epidemic forward from (1-delta, delta, 0, 0, 0) under the traced d_N
/// schedule, then recomputes d_N pointwise from the forward states and the
/// traced welfare. Returns the max over samples of state mismatch and d_N
/// mismatch.
inline double verify_fixed_point(const CandidateResult& result,
                                 const ModelParams& p,
                                 const IntegratorConfig& cfg) {
  if (result.classification != Classification::Equilibrium)
    throw std::invalid_argument(
        "verify_fixed_point requires an Equilibrium-classified candidate");
  const Trajectory& tr = result.traced;
  if (tr.size() < 2)
    throw std::invalid_argument("verify_fixed_point: empty trajectory");

  // d_N schedule over the traced sample times, interpolated with a local
  // cubic so the schedule error matches the integrator's order (linear
  // interpolation alone would cap the round-trip accuracy at O(h^2)).
  auto d_at = [&](double t) {
    if (t <= tr.front().t) return tr.front().d_N;
    if (t >= tr.back().t) return tr.back().d_N;
    auto it = std::lower_bound(
        tr.begin(), tr.end(), t,
        [](const TrajectorySample& s, double tt) { return s.t < tt; });
    std::size_t i1 = static_cast<std::size_t>(it - tr.begin());
    std::size_t i0 = i1 - 1;
    // Four-point Lagrange stencil clamped to the range.
    std::size_t lo = (i0 == 0) ? 0 : i0 - 1;
    if (lo + 3 >= tr.size()) lo = tr.size() - 4;
    double result = 0.0;
    for (std::size_t a = lo; a < lo + 4; ++a) {
      double w = 1.0;
      for (std::size_t b = lo; b < lo + 4; ++b)
        if (b != a) w *= (t - tr[b].t) / (tr[a].t - tr[b].t);
      result += w * tr[a].d_N;
    }
    return std::clamp(result, 0.0, 1.0);
  };

  auto rhs = [&](double t, const StateVec<5>& y) {
    EpidemicState e;
    e.S = y[0]; e.C = y[1]; e.I = y[2]; e.R_C = y[3]; e.R_I = y[4];
    const EpiDerivative d = epi_rhs(e, d_at(t), p);
    return StateVec<5>{d.dS, d.dC, d.dI, d.dR_C, d.dR_I};
  };

  const EpidemicState e0 = initial_state(p);
  StateVec<5> y{e0.S, e0.C, e0.I, e0.R_C, e0.R_I};

  double worst = 0.0;
  std::size_t k = 0;  // next traced sample to compare against
  auto observe = [&](double t, const StateVec<5>& yy) {
    while (k < tr.size() && tr[k].t <= t + 1e-12) {
      if (std::abs(tr[k].t - t) < 1e-9) {
        const auto& s = tr[k];
        worst = std::max({worst, std::abs(yy[0] - s.epi.S),
                          std::abs(yy[1] - s.epi.C), std::abs(yy[2] - s.epi.I),
                          std::abs(yy[3] - s.epi.R_C),
                          std::abs(yy[4] - s.epi.R_I)});
        EpidemicState e;
        e.S = yy[0]; e.C = yy[1]; e.I = yy[2]; e.R_C = yy[3]; e.R_I = yy[4];
        NashInputs in{e, s.welfare.harm(), p};
        worst = std::max(worst, std::abs(equilibrium_distancing(in) - s.d_N));
      }
      ++k;
    }
    return true;
  };
  integrate<5>(rhs, y, 0.0, p.T, cfg, observe);
  return worst;
}

}  // namespace nashsir

#endif  // NASHSIR_SHOOTER_HPP
