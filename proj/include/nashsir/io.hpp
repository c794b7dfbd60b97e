#ifndef NASHSIR_IO_HPP
#define NASHSIR_IO_HPP

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "nashsir/enumerator.hpp"
#include "nashsir/integrator.hpp"
#include "nashsir/model.hpp"
#include "nashsir/shooter.hpp"

namespace nashsir {

/// Shortest decimal representation that round-trips exactly through a double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("not a number: '" + s + "'");
  return v;
}

inline constexpr const char* kTrajectoryHeader =
    "t,S,C,I,R_C,R_I,d_N,A,gamma_E";

inline std::string trajectory_to_csv(const Trajectory& tr, int stride = 1) {
  if (stride < 1) stride = 1;
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (i % stride != 0 && i + 1 != tr.size()) continue;
    const auto& s = tr[i];
    out += format_double(s.t);
    for (double v : {s.epi.S, s.epi.C, s.epi.I, s.epi.R_C, s.epi.R_I, s.d_N,
                     s.A, s.gamma_E}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline Trajectory trajectory_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader)
    throw std::runtime_error("bad trajectory header");
  Trajectory tr;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      cells.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (cells.size() != 9) throw std::runtime_error("bad trajectory row");
    TrajectorySample s;
    s.t = parse_double(cells[0]);
    s.epi.S = parse_double(cells[1]);
    s.epi.C = parse_double(cells[2]);
    s.epi.I = parse_double(cells[3]);
    s.epi.R_C = parse_double(cells[4]);
    s.epi.R_I = parse_double(cells[5]);
    s.d_N = parse_double(cells[6]);
    s.A = parse_double(cells[7]);
    s.gamma_E = parse_double(cells[8]);
    tr.push_back(s);
  }
  return tr;
}

/// One step of a piecewise-constant distancing policy: d applies from t_start
/// until the next segment's start (or T).
struct PolicySegment {
  double t_start = 0.0;
  double d = 0.0;
};

struct OutputConfig {
  std::string directory = ".";
  bool csv = true;
  bool json = true;
  int stride = 1;
};

struct RunConfig {
  ModelParams model;
  IntegratorConfig integrator;
  SearchConfig search;
  std::vector<PolicySegment> policy;  // empty means d_N = 0 throughout
  OutputConfig output;
};

namespace detail {

inline void read_if(const nlohmann::json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}
inline void read_if(const nlohmann::json& j, const char* key, int& out) {
  if (j.contains(key)) out = j.at(key).get<int>();
}
inline void read_if(const nlohmann::json& j, const char* key, bool& out) {
  if (j.contains(key)) out = j.at(key).get<bool>();
}
inline void read_if(const nlohmann::json& j, const char* key,
                    std::string& out) {
  if (j.contains(key)) out = j.at(key).get<std::string>();
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("model")) {
    const auto& m = j.at("model");
    detail::read_if(m, "beta", cfg.model.beta);
    detail::read_if(m, "sigma", cfg.model.sigma);
    detail::read_if(m, "gamma", cfg.model.gamma);
    detail::read_if(m, "alpha", cfg.model.alpha);
    detail::read_if(m, "delta_init", cfg.model.delta_init);
    detail::read_if(m, "T", cfg.model.T);
    detail::read_if(m, "a0", cfg.model.a0);
    detail::read_if(m, "a1", cfg.model.a1);
    detail::read_if(m, "a2", cfg.model.a2);
    if (m.contains("lc_rate_convention")) {
      const auto s = m.at("lc_rate_convention").get<std::string>();
      if (s == "dynamics-consistent")
        cfg.model.lc_rates = LcRateConvention::dynamics_consistent;
      else if (s == "as-printed")
        cfg.model.lc_rates = LcRateConvention::as_printed;
      else
        throw std::runtime_error("unknown lc_rate_convention: " + s);
    }
  }
  if (j.contains("integrator")) {
    const auto& it = j.at("integrator");
    if (it.contains("method")) {
      const auto s = it.at("method").get<std::string>();
      if (s == "fixed_step_rk4")
        cfg.integrator.method = IntegratorMethod::fixed_step_rk4;
      else if (s == "adaptive_rk45")
        cfg.integrator.method = IntegratorMethod::adaptive_rk45;
      else
        throw std::runtime_error("unknown integrator method: " + s);
    }
    detail::read_if(it, "step_size", cfg.integrator.step_size);
    detail::read_if(it, "rel_tol", cfg.integrator.rel_tol);
    detail::read_if(it, "abs_tol", cfg.integrator.abs_tol);
  }
  if (j.contains("search")) {
    const auto& s = j.at("search");
    detail::read_if(s, "grid_points_per_dim", cfg.search.grid_points_per_dim);
    detail::read_if(s, "refine_max_iters", cfg.search.refine_max_iters);
    detail::read_if(s, "refine_damping", cfg.search.refine_damping);
    detail::read_if(s, "dedup_tol", cfg.search.dedup_tol);
    detail::read_if(s, "screen_tol", cfg.search.screen_tol);
    detail::read_if(s, "boundary_slack", cfg.search.boundary_slack);
    detail::read_if(s, "seed_top_k", cfg.search.seed_top_k);
    detail::read_if(s, "accept_tol", cfg.search.accept_tol);
  }
  if (j.contains("policy")) {
    double prev = -1.0;
    for (const auto& seg : j.at("policy")) {
      PolicySegment ps;
      ps.t_start = seg.at("t_start").get<double>();
      ps.d = seg.at("d").get<double>();
      if (ps.d < 0.0 || ps.d > 1.0)
        throw std::runtime_error("policy d values must lie in [0,1]");
      if (ps.t_start <= prev)
        throw std::runtime_error("policy segments must have increasing t_start");
      prev = ps.t_start;
      cfg.policy.push_back(ps);
    }
    if (!cfg.policy.empty() && cfg.policy.front().t_start != 0.0)
      throw std::runtime_error("policy must start at t = 0");
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    detail::read_if(o, "directory", cfg.output.directory);
    detail::read_if(o, "csv", cfg.output.csv);
    detail::read_if(o, "json", cfg.output.json);
    detail::read_if(o, "stride", cfg.output.stride);
  }
  validate_params(cfg.model);
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  return parse_run_config(j);
}

inline nlohmann::json params_to_json(const ModelParams& p) {
  return {{"beta", p.beta},
          {"sigma", p.sigma},
          {"gamma", p.gamma},
          {"alpha", p.alpha},
          {"delta_init", p.delta_init},
          {"T", p.T},
          {"a0", p.a0},
          {"a1", p.a1},
          {"a2", p.a2},
          {"lc_rate_convention",
           p.lc_rates == LcRateConvention::dynamics_consistent
               ? "dynamics-consistent"
               : "as-printed"}};
}

/// Manifest describing one enumeration run. Schema version 1.
inline nlohmann::json manifest_json(const EquilibriumSet& set,
                                    const ModelParams& p) {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& rec : set.equilibria) {
    eqs.push_back(
        {{"final_condition",
          {{"S_T", rec.fc.S_T},
           {"C_T", rec.fc.C_T},
           {"I_T", rec.fc.I_T},
           {"R_I_T", rec.fc.R_I_T},
           {"R_C_T", rec.fc.r_c()}}},
         {"attack_rate", rec.summary.attack_rate},
         {"total_gamma_E", rec.summary.total_gamma_E},
         {"L_S0", rec.summary.L_S0},
         {"peak_I", rec.summary.peak_I},
         {"t_peak", rec.summary.t_peak},
         {"residual", rec.summary.residual},
         {"fixed_point_residual", rec.fixed_point_residual},
         {"fixed_point_verified", rec.fixed_point_residual < 1e-5}});
  }
  return {{"schema_version", 1},
          {"params", params_to_json(p)},
          {"count", set.equilibria.size()},
          {"equilibria", eqs},
          {"diagnostics",
           {{"candidates_traced", set.diagnostics.candidates_traced},
            {"invalid_boundary", set.diagnostics.invalid_boundary},
            {"seeds_refined", set.diagnostics.seeds_refined},
            {"refinement_failures", set.diagnostics.refinement_failures}}}};
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << body;
}

}  // namespace nashsir

#endif  // NASHSIR_IO_HPP
