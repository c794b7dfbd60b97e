#ifndef NASHSIR_INTEGRATOR_HPP
#define NASHSIR_INTEGRATOR_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nashsir {

template <std::size_t N>
using StateVec = std::array<double, N>;

enum class IntegratorMethod { fixed_step_rk4, adaptive_rk45 };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::fixed_step_rk4;
  double step_size = 0.0;   // <= 0 means span / 5000
  double rel_tol = 1e-8;    // adaptive only
  double abs_tol = 1e-10;   // adaptive only

  double effective_step(double span) const {
    return step_size > 0.0 ? step_size : span / 5000.0;
  }
};

namespace detail {

template <std::size_t N>
inline StateVec<N> axpy(const StateVec<N>& y, double a, const StateVec<N>& k) {
  StateVec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + a * k[i];
  return out;
}

// One classical RK4 step: y(t) -> y(t + h).
template <std::size_t N, typename Rhs>
inline StateVec<N> rk4_step(Rhs& rhs, const StateVec<N>& y, double t, double h) {
  const StateVec<N> k1 = rhs(t, y);
  const StateVec<N> k2 = rhs(t + h / 2, axpy(y, h / 2, k1));
  const StateVec<N> k3 = rhs(t + h / 2, axpy(y, h / 2, k2));
  const StateVec<N> k4 = rhs(t + h, axpy(y, h, k3));
  StateVec<N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

// Dormand-Prince 5(4) embedded pair. Returns (y5, err_norm_scale).
template <std::size_t N, typename Rhs>
inline std::pair<StateVec<N>, double> dopri_step(Rhs& rhs, const StateVec<N>& y,
                                                 double t, double h,
                                                 double rel_tol, double abs_tol) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  const StateVec<N> k1 = rhs(t, y);
  const StateVec<N> k2 = rhs(t + c2 * h, axpy(y, h / 5, k1));
  StateVec<N> tmp;
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (3.0 / 40 * k1[i] + 9.0 / 40 * k2[i]);
  const StateVec<N> k3 = rhs(t + c3 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (44.0 / 45 * k1[i] - 56.0 / 15 * k2[i] + 32.0 / 9 * k3[i]);
  const StateVec<N> k4 = rhs(t + c4 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (19372.0 / 6561 * k1[i] - 25360.0 / 2187 * k2[i] +
                         64448.0 / 6561 * k3[i] - 212.0 / 729 * k4[i]);
  const StateVec<N> k5 = rhs(t + c5 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (9017.0 / 3168 * k1[i] - 355.0 / 33 * k2[i] +
                         46732.0 / 5247 * k3[i] + 49.0 / 176 * k4[i] -
                         5103.0 / 18656 * k5[i]);
  const StateVec<N> k6 = rhs(t + h, tmp);
  StateVec<N> y5;
  for (std::size_t i = 0; i < N; ++i)
    y5[i] = y[i] + h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] +
                        125.0 / 192 * k4[i] - 2187.0 / 6784 * k5[i] +
                        11.0 / 84 * k6[i]);
  const StateVec<N> k7 = rhs(t + h, y5);
  // 4th-order embedded solution for the error estimate.
  double err = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double y4i = y[i] + h * (5179.0 / 57600 * k1[i] + 7571.0 / 16695 * k3[i] +
                                   393.0 / 640 * k4[i] - 92097.0 / 339200 * k5[i] +
                                   187.0 / 2100 * k6[i] + 1.0 / 40 * k7[i]);
    const double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
    const double e = (y5[i] - y4i) / sc;
    err += e * e;
  }
  return {y5, std::sqrt(err / N)};
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 < t0 runs the same scheme in
/// reversed time with negated RHS). The observer is called with (t, y) at t0
/// and after every accepted step; returning false aborts the run.
/// Throws std::runtime_error on adaptive step underflow.
template <std::size_t N, typename Rhs, typename Observer>
void integrate(Rhs&& rhs, const StateVec<N>& y0, double t0, double t1,
               const IntegratorConfig& cfg, Observer&& observe) {
  const double span = std::abs(t1 - t0);
  if (span == 0.0) throw std::invalid_argument("integrate: t0 == t1");
  const double dir = t1 > t0 ? 1.0 : -1.0;
  // Reversed time: integrate tau in [0, span] with y'(tau) = dir * rhs(...).
  auto f = [&](double tau, const StateVec<N>& y) {
    StateVec<N> d = rhs(t0 + dir * tau, y);
    if (dir < 0) {
      for (auto& v : d) v = -v;
    }
    return d;
  };

  StateVec<N> y = y0;
  if (!observe(t0, y)) return;

  if (cfg.method == IntegratorMethod::fixed_step_rk4) {
    const double h0 = cfg.effective_step(span);
    const auto n = static_cast<std::size_t>(std::ceil(span / h0 - 1e-12));
    const double h = span / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double tau = static_cast<double>(i) * h;
      y = detail::rk4_step(f, y, tau, h);
      const double t_next =
          (i + 1 == n) ? t1 : t0 + dir * static_cast<double>(i + 1) * h;
      if (!observe(t_next, y)) return;
    }
    return;
  }

  // Adaptive Dormand-Prince 5(4).
  double tau = 0.0;
  double h = cfg.effective_step(span);
  const double h_min = span * 1e-14;
  while (tau < span) {
    if (h < h_min)
      throw std::runtime_error("integrate: adaptive step underflow");
    if (tau + h > span) h = span - tau;
    auto [y_next, err] = detail::dopri_step(f, y, tau, h, cfg.rel_tol, cfg.abs_tol);
    if (err <= 1.0) {
      tau += h;
      y = y_next;
      const double t_now = (tau >= span) ? t1 : t0 + dir * tau;
      if (!observe(t_now, y)) return;
    }
    const double fac =
        err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::min(5.0, std::max(0.2, fac));
  }
}

/// Convenience wrapper collecting every accepted sample.
template <std::size_t N, typename Rhs>
std::vector<std::pair<double, StateVec<N>>> integrate_collect(
    Rhs&& rhs, const StateVec<N>& y0, double t0, double t1,
    const IntegratorConfig& cfg) {
  std::vector<std::pair<double, StateVec<N>>> out;
  integrate<N>(std::forward<Rhs>(rhs), y0, t0, t1, cfg,
               [&](double t, const StateVec<N>& y) {
                 out.emplace_back(t, y);
                 return true;
               });
  return out;
}

}  // namespace nashsir

#endif  // NASHSIR_INTEGRATOR_HPP
