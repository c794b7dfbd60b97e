#ifndef NASHSIR_SIMULATE_HPP
#define NASHSIR_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nashsir/economy.hpp"
#include "nashsir/epi.hpp"
#include "nashsir/integrator.hpp"
#include "nashsir/io.hpp"
#include "nashsir/model.hpp"
#include "nashsir/nash.hpp"
#include "nashsir/welfare.hpp"

namespace nashsir {

inline double policy_at(const std::vector<PolicySegment>& policy, double t) {
  double d = 0.0;
  for (const auto& seg : policy) {
    if (seg.t_start > t) break;
    d = seg.d;
  }
  return d;
}

/// Forward simulation of the epidemic over [0, T] under a fixed
/// piecewise-constant distancing policy (empty policy means no distancing).
/// Welfare fields in the returned samples are left at zero; this is the
/// behavior-exogenous system, not an equilibrium object.
inline Trajectory forward_simulate(const ModelParams& p,
                                   const std::vector<PolicySegment>& policy,
                                   const IntegratorConfig& cfg) {
  validate_params(p);
  auto rhs = [&](double t, const StateVec<5>& y) {
    EpidemicState e;
    e.S = y[0]; e.C = y[1]; e.I = y[2]; e.R_C = y[3]; e.R_I = y[4];
    const EpiDerivative d = epi_rhs(e, policy_at(policy, t), p);
    return StateVec<5>{d.dS, d.dC, d.dI, d.dR_C, d.dR_I};
  };
  const EpidemicState e0 = initial_state(p);
  Trajectory tr;
  integrate<5>(rhs, StateVec<5>{e0.S, e0.C, e0.I, e0.R_C, e0.R_I}, 0.0, p.T,
               cfg, [&](double t, const StateVec<5>& y) {
                 TrajectorySample s;
                 s.t = t;
                 s.epi.S = y[0]; s.epi.C = y[1]; s.epi.I = y[2];
                 s.epi.R_C = y[3]; s.epi.R_I = y[4];
                 s.d_N = policy_at(policy, t);
                 s.A = availability(s.epi, s.d_N, p.alpha);
                 s.gamma_E = aggregate_flow_loss(s.epi, s.d_N, p);
                 tr.push_back(s);
                 return true;
               });
  return tr;
}

struct VerifyReport {
  double state_residual = 0.0;  // forward re-simulation vs recorded states
  double d_residual = 0.0;      // recorded d_N vs pointwise best response
  bool ok(double tol = 1e-5) const {
    return state_residual < tol && d_residual < tol;
  }
};

/// Checks a recorded trajectory for the two equilibrium conditions:
/// (i) the states are regenerated by forward integration under the recorded
/// d_N schedule; (ii) the recorded d_N is the Nash distancing of the recorded
/// states, with the welfare processes reconstructed backward along the
/// recorded path from the closed-form terminal values.
inline VerifyReport verify_trajectory(const Trajectory& tr,
                                      const ModelParams& p,
                                      const IntegratorConfig& cfg) {
  if (tr.size() < 3) throw std::runtime_error("trajectory too short to verify");
  if (std::abs(tr.front().t) > 1e-9 || std::abs(tr.back().t - p.T) > 1e-9)
    throw std::runtime_error("trajectory does not span [0, T]");

  VerifyReport rep;

  // (i) Forward re-simulation under the recorded schedule.
  auto interp = [&](double t, auto field) {
    if (t <= tr.front().t) return field(tr.front());
    if (t >= tr.back().t) return field(tr.back());
    auto it = std::lower_bound(
        tr.begin(), tr.end(), t,
        [](const TrajectorySample& s, double tt) { return s.t < tt; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.t) / (hi.t - lo.t);
    return (1.0 - w) * field(lo) + w * field(hi);
  };
  auto d_of = [](const TrajectorySample& s) { return s.d_N; };
  auto rhs = [&](double t, const StateVec<5>& y) {
    EpidemicState e;
    e.S = y[0]; e.C = y[1]; e.I = y[2]; e.R_C = y[3]; e.R_I = y[4];
    const EpiDerivative d = epi_rhs(e, interp(t, d_of), p);
    return StateVec<5>{d.dS, d.dC, d.dI, d.dR_C, d.dR_I};
  };
  const EpidemicState e0 = initial_state(p);
  integrate<5>(rhs, StateVec<5>{e0.S, e0.C, e0.I, e0.R_C, e0.R_I}, 0.0, p.T,
               cfg, [&](double t, const StateVec<5>& y) {
                 const double vals[5] = {
                     interp(t, [](const TrajectorySample& s) { return s.epi.S; }),
                     interp(t, [](const TrajectorySample& s) { return s.epi.C; }),
                     interp(t, [](const TrajectorySample& s) { return s.epi.I; }),
                     interp(t, [](const TrajectorySample& s) { return s.epi.R_C; }),
                     interp(t, [](const TrajectorySample& s) { return s.epi.R_I; })};
                 for (int i = 0; i < 5; ++i)
                   rep.state_residual =
                       std::max(rep.state_residual, std::abs(y[i] - vals[i]));
                 return true;
               });

  // (ii) Welfare reconstruction backward along the recorded samples, then the
  // pointwise best-response check.
  const std::size_t n = tr.size();
  std::vector<WelfareState> W(n);
  W[n - 1] = terminal_welfare(tr[n - 1].epi, p);
  auto wd = [&](const EpidemicState& e, const WelfareState& w, double d) {
    return welfare_rhs(e, w, d, p);
  };
  auto mid = [](const EpidemicState& a, const EpidemicState& b) {
    EpidemicState m;
    m.S = 0.5 * (a.S + b.S); m.C = 0.5 * (a.C + b.C); m.I = 0.5 * (a.I + b.I);
    m.R_C = 0.5 * (a.R_C + b.R_C); m.R_I = 0.5 * (a.R_I + b.R_I);
    return m;
  };
  auto step_w = [](const WelfareState& w, double h, const WelfareDerivative& d) {
    WelfareState o;
    o.L_S = w.L_S + h * d.dL_S; o.L_C = w.L_C + h * d.dL_C;
    o.L_I = w.L_I + h * d.dL_I; o.L_RC = w.L_RC + h * d.dL_RC;
    o.L_RI = w.L_RI + h * d.dL_RI;
    return o;
  };
  for (std::size_t i = n - 1; i > 0; --i) {
    const double h = tr[i].t - tr[i - 1].t;  // stepping backward by -h
    const EpidemicState em = mid(tr[i].epi, tr[i - 1].epi);
    const double dm = 0.5 * (tr[i].d_N + tr[i - 1].d_N);
    const WelfareState& w = W[i];
    // RK4 on the reversed-time welfare system.
    auto neg = [](WelfareDerivative d) {
      d.dL_S = -d.dL_S; d.dL_C = -d.dL_C; d.dL_I = -d.dL_I;
      d.dL_RC = -d.dL_RC; d.dL_RI = -d.dL_RI;
      return d;
    };
    const auto k1 = neg(wd(tr[i].epi, w, tr[i].d_N));
    const auto k2 = neg(wd(em, step_w(w, h / 2, k1), dm));
    const auto k3 = neg(wd(em, step_w(w, h / 2, k2), dm));
    const auto k4 = neg(wd(tr[i - 1].epi, step_w(w, h, k3), tr[i - 1].d_N));
    WelfareState o = w;
    o.L_S += h / 6 * (k1.dL_S + 2 * k2.dL_S + 2 * k3.dL_S + k4.dL_S);
    o.L_C += h / 6 * (k1.dL_C + 2 * k2.dL_C + 2 * k3.dL_C + k4.dL_C);
    o.L_I += h / 6 * (k1.dL_I + 2 * k2.dL_I + 2 * k3.dL_I + k4.dL_I);
    o.L_RC += h / 6 * (k1.dL_RC + 2 * k2.dL_RC + 2 * k3.dL_RC + k4.dL_RC);
    o.L_RI += h / 6 * (k1.dL_RI + 2 * k2.dL_RI + 2 * k3.dL_RI + k4.dL_RI);
    W[i - 1] = o;
  }
  for (std::size_t i = 0; i < n; ++i) {
    NashInputs in{tr[i].epi, W[i].harm(), p};
    rep.d_residual = std::max(
        rep.d_residual, std::abs(equilibrium_distancing(in) - tr[i].d_N));
  }
  return rep;
}

}  // namespace nashsir

#endif  // NASHSIR_SIMULATE_HPP
