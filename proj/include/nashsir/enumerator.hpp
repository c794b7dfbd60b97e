#ifndef NASHSIR_ENUMERATOR_HPP
#define NASHSIR_ENUMERATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "nashsir/integrator.hpp"
#include "nashsir/model.hpp"
#include "nashsir/shooter.hpp"

namespace nashsir {

struct SearchConfig {
  int grid_points_per_dim = 12;
  int refine_max_iters = 60;
  double refine_damping = 0.5;   // initial Newton step fraction
  double dedup_tol = 1e-6;       // max-norm distance in final-condition space
  double screen_tol = 1e-2;      // residual threshold to enter refinement
  // Negative-compartment excursion tolerated during screening and refinement.
  // The residual map is discontinuous at the strict invalid-boundary cutoff;
  // a soft slack keeps it smooth near roots. Final acceptance always re-traces
  // with the strict cutoff.
  double boundary_slack = 1e-3;
  // Best valid grid candidates seeded into refinement even when their raw
  // residual misses screen_tol (backward traces amplify final-condition error
  // by several orders of magnitude, so true basins can screen badly).
  int seed_top_k = 30;
  double accept_tol = 1e-8;      // refined residual max-norm for acceptance
};

struct EquilibriumSummary {
  FinalCondition fc;
  double attack_rate = 0.0;
  double total_gamma_E = 0.0;
  double L_S0 = 0.0;
  double peak_I = 0.0;
  double t_peak = 0.0;
  double residual = 0.0;
};

struct EquilibriumRecord {
  FinalCondition fc;
  Trajectory trajectory;
  EquilibriumSummary summary;
  double fixed_point_residual = 0.0;
};

struct SearchDiagnostics {
  std::size_t candidates_traced = 0;
  std::size_t invalid_boundary = 0;
  std::size_t seeds_refined = 0;
  std::size_t refinement_failures = 0;
};

struct EquilibriumSet {
  std::vector<EquilibriumRecord> equilibria;
  SearchDiagnostics diagnostics;
};

namespace detail {

constexpr double kResidualSentinel = 1e6;

inline std::array<double, 4> residual4(const CandidateResult& r) {
  // C(0) deviation is implied by mass conservation; the square system uses
  // the other four components.
  return {r.initial_residual[0], r.initial_residual[2], r.initial_residual[3],
          r.initial_residual[4]};
}

inline double max_norm(const std::array<double, 4>& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2]),
                   std::abs(v[3])});
}

inline std::array<double, 4> fc_vec(const FinalCondition& fc) {
  return {fc.S_T, fc.C_T, fc.I_T, fc.R_I_T};
}

inline FinalCondition project_to_simplex(std::array<double, 4> v) {
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  const double s = v[0] + v[1] + v[2] + v[3];
  if (s > 1.0) {
    for (double& x : v) x /= s;
  }
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace detail

/// Residual of one candidate final condition: deviations of the backward
/// trace at t=0 from the required initial state, (S(0)-(1-delta), I(0),
/// R_C(0), R_I(0)). Invalid-boundary candidates get a large sentinel.
inline std::array<double, 4> residual(const FinalCondition& fc,
                                      const ModelParams& p,
                                      const IntegratorConfig& cfg,
                                      double boundary_slack = 1e-10,
                                      double* boundary_time = nullptr) {
  TraceOptions opts;
  opts.boundary_slack = boundary_slack;
  opts.record_trajectory = false;
  const CandidateResult r = trace_backward(fc, p, cfg, opts);
  if (r.classification == Classification::InvalidBoundary ||
      r.classification == Classification::NonTerminating) {
    if (boundary_time) *boundary_time = r.boundary_time;
    return {detail::kResidualSentinel, detail::kResidualSentinel,
            detail::kResidualSentinel, detail::kResidualSentinel};
  }
  return detail::residual4(r);
}

/// Attack rate, total economic loss, ex-ante susceptible loss, and sick-curve
/// peak for one traced equilibrium. The loss integral over [0,T] uses the
/// trajectory samples; the post-T tail is analytic (after the vaccine
/// A = 1 - I, so the flow loss is (a0+a1+2a2) I - a2 I^2 with I(t) known in
/// closed form).
inline EquilibriumSummary summarize_equilibrium(const FinalCondition& fc,
                                                const Trajectory& tr,
                                                double residual_norm,
                                                const ModelParams& p) {
  EquilibriumSummary s;
  s.fc = fc;
  s.residual = residual_norm;
  s.attack_rate = attack_rate(fc.to_state());
  s.L_S0 = tr.empty() ? 0.0 : tr.front().welfare.L_S;

  // Trajectory integral of gamma_E: Simpson on a uniform grid with an even
  // interval count, composite trapezoid otherwise.
  double integral = 0.0;
  const std::size_t n = tr.size();
  bool uniform = n >= 3;
  if (n >= 2) {
    const double h = tr[1].t - tr[0].t;
    for (std::size_t i = 1; i + 1 < n && uniform; ++i)
      if (std::abs((tr[i + 1].t - tr[i].t) - h) > 1e-9 * std::max(1.0, h))
        uniform = false;
    if (uniform && (n - 1) % 2 == 0) {
      for (std::size_t i = 0; i + 2 < n; i += 2)
        integral += h / 3.0 * (tr[i].gamma_E + 4.0 * tr[i + 1].gamma_E +
                               tr[i + 2].gamma_E);
    } else {
      for (std::size_t i = 0; i + 1 < n; ++i)
        integral += 0.5 * (tr[i + 1].t - tr[i].t) *
                    (tr[i].gamma_E + tr[i + 1].gamma_E);
    }
  }
  // Tail: with P = I_T + C_T, Q = -C_T, I(tau) = P e^{-g tau} + Q e^{-(s+g) tau}.
  const double g = p.gamma, sg = p.sigma + p.gamma;
  const double P = fc.I_T + fc.C_T, Q = -fc.C_T;
  const double int_I = P / g + Q / sg;
  const double int_I2 =
      P * P / (2.0 * g) + 2.0 * P * Q / (sg + g) + Q * Q / (2.0 * sg);
  s.total_gamma_E =
      integral + (p.a0 + p.a1 + 2.0 * p.a2) * int_I - p.a2 * int_I2;

  for (const auto& smp : tr) {
    if (smp.epi.I > s.peak_I) {
      s.peak_I = smp.epi.I;
      s.t_peak = smp.t;
    }
  }
  return s;
}

/// Finds all equilibrium epidemics reachable from a coarse grid over the
/// final-condition simplex: screen every grid point by backward-trace
/// residual, refine promising candidates by damped Newton with
/// finite-difference sensitivities, re-trace survivors under the strict
/// boundary rule, and deduplicate.
inline EquilibriumSet enumerate_equilibria(const ModelParams& p,
                                           const SearchConfig& search,
                                           const IntegratorConfig& cfg) {
  validate_params(p);
  EquilibriumSet out;
  auto& diag = out.diagnostics;

  auto soft_norm = [&](const std::array<double, 4>& v) {
    return detail::max_norm(v);
  };
  auto soft_residual = [&](const FinalCondition& fc) {
    return residual(fc, p, cfg, search.boundary_slack);
  };

  // --- Grid screen over {S,C,I,R_I >= 0, sum <= 1}. ---
  struct Seed {
    FinalCondition fc;
    double norm;
  };
  std::vector<Seed> screened;  // below screen_tol
  std::vector<Seed> best;      // top seed_top_k valid traces overall
  const int m = search.grid_points_per_dim;
  const double step = 1.0 / (m - 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const FinalCondition fc{i * step, j * step, k * step, l * step};
          if (fc.S_T + fc.C_T + fc.I_T + fc.R_I_T > 1.0 + 1e-12) continue;
          ++diag.candidates_traced;
          const auto r = soft_residual(fc);
          const double nr = soft_norm(r);
          if (nr >= detail::kResidualSentinel) {
            ++diag.invalid_boundary;
            continue;
          }
          if (nr < search.screen_tol) screened.push_back({fc, nr});
          best.push_back({fc, nr});
          std::sort(best.begin(), best.end(),
                    [](const Seed& a, const Seed& b) { return a.norm < b.norm; });
          if (best.size() > static_cast<std::size_t>(search.seed_top_k))
            best.pop_back();
        }

  std::vector<Seed> seeds = screened;
  for (const auto& b : best) seeds.push_back(b);

  // --- Damped Newton refinement with backtracking. ---
  std::vector<std::pair<FinalCondition, double>> accepted;  // fc, strict norm
  std::vector<CandidateResult> accepted_traces;
  for (const auto& seed : seeds) {
    ++diag.seeds_refined;
    auto x = detail::fc_vec(seed.fc);
    auto r = soft_residual(detail::project_to_simplex(x));
    double norm = soft_norm(r);
    // Polish well below the acceptance tolerance: the backward trace
    // amplifies final-condition error into the forward fixed-point check by
    // several orders of magnitude on strong-feedback parameterizations.
    const double polish_tol = std::min(search.accept_tol, 1e-12);
    for (int it = 0; it < search.refine_max_iters && norm >= polish_tol; ++it) {
      // Finite-difference Jacobian; fall back to the opposite difference
      // direction when a perturbed point crosses an invalid boundary.
      double J[4][4];
      const double fd = 1e-7;
      bool jac_ok = true;
      for (int c = 0; c < 4 && jac_ok; ++c) {
        bool col_ok = false;
        for (double dh : {fd, -fd}) {
          auto xp = x;
          xp[c] += dh;
          if (xp[c] < 0.0 || xp[c] > 1.0) continue;
          const auto rp = soft_residual(detail::project_to_simplex(xp));
          if (soft_norm(rp) >= detail::kResidualSentinel) continue;
          for (int row = 0; row < 4; ++row)
            J[row][c] = (rp[row] - r[row]) / dh;
          col_ok = true;
          break;
        }
        if (!col_ok) jac_ok = false;
      }
      if (!jac_ok) break;
      // Solve J dx = -r by Gaussian elimination with partial pivoting.
      double A[4][5];
      for (int row = 0; row < 4; ++row) {
        for (int c = 0; c < 4; ++c) A[row][c] = J[row][c];
        A[row][4] = -r[row];
      }
      bool singular = false;
      for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int row = c + 1; row < 4; ++row)
          if (std::abs(A[row][c]) > std::abs(A[piv][c])) piv = row;
        if (std::abs(A[piv][c]) < 1e-300) {
          singular = true;
          break;
        }
        std::swap(A[c], A[piv]);
        for (int row = c + 1; row < 4; ++row) {
          const double f = A[row][c] / A[c][c];
          for (int cc = c; cc < 5; ++cc) A[row][cc] -= f * A[c][cc];
        }
      }
      if (singular) break;
      std::array<double, 4> dx{};
      for (int row = 3; row >= 0; --row) {
        double v = A[row][4];
        for (int c = row + 1; c < 4; ++c) v -= A[row][c] * dx[c];
        dx[row] = v / A[row][row];
      }
      // Backtracking line search from the damped full step.
      bool improved = false;
      for (double lam = search.refine_damping; lam > 1e-9; lam *= 0.5) {
        auto xn = x;
        for (int c = 0; c < 4; ++c) xn[c] += lam * dx[c];
        const FinalCondition fcn = detail::project_to_simplex(xn);
        const auto rn = soft_residual(fcn);
        const double nn = soft_norm(rn);
        if (nn < norm) {
          x = detail::fc_vec(fcn);
          r = rn;
          norm = nn;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (norm >= search.accept_tol) {
      ++diag.refinement_failures;
      continue;
    }
    // Strict re-trace for final acceptance (same step count as refinement).
    TraceOptions strict;
    strict.match_tol = search.accept_tol;
    const FinalCondition fc_final = detail::project_to_simplex(x);
    CandidateResult final_trace = trace_backward(fc_final, p, cfg, strict);
    if (final_trace.classification != Classification::Equilibrium) {
      ++diag.refinement_failures;
      continue;
    }
    accepted.emplace_back(fc_final, final_trace.residual_norm());
    accepted_traces.push_back(std::move(final_trace));
  }

  // --- Deduplicate, keeping the lowest-residual representative. ---
  std::vector<std::size_t> order(accepted.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return accepted[a].second < accepted[b].second;
  });
  for (std::size_t idx : order) {
    const auto& [fc, norm] = accepted[idx];
    bool dup = false;
    for (const auto& rec : out.equilibria) {
      const auto a = detail::fc_vec(fc), b = detail::fc_vec(rec.fc);
      double dist = 0.0;
      for (int c = 0; c < 4; ++c) dist = std::max(dist, std::abs(a[c] - b[c]));
      if (dist < search.dedup_tol) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    EquilibriumRecord rec;
    rec.fc = fc;
    rec.fixed_point_residual = verify_fixed_point(accepted_traces[idx], p, cfg);
    rec.trajectory = std::move(accepted_traces[idx].traced);
    rec.summary = summarize_equilibrium(fc, rec.trajectory, norm, p);
    out.equilibria.push_back(std::move(rec));
  }
  // Deterministic report order: by attack rate, then final condition.
  std::sort(out.equilibria.begin(), out.equilibria.end(),
            [](const EquilibriumRecord& a, const EquilibriumRecord& b) {
              if (a.summary.attack_rate != b.summary.attack_rate)
                return a.summary.attack_rate < b.summary.attack_rate;
              return detail::fc_vec(a.fc) < detail::fc_vec(b.fc);
            });
  return out;
}

}  // namespace nashsir

#endif  // NASHSIR_ENUMERATOR_HPP
