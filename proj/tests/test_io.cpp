#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nashsir/io.hpp"
#include "nashsir/simulate.hpp"

using namespace nashsir;

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double v = std::ldexp(u(rng), (k % 120) - 60);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(parse_double(format_double(0.0)) == 0.0);
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK_THROWS_AS(parse_double("abc"), std::runtime_error);
  CHECK_THROWS_AS(parse_double("1.5x"), std::runtime_error);
  CHECK_THROWS_AS(parse_double(""), std::runtime_error);
}

namespace {

Trajectory tiny_trajectory() {
  Trajectory tr;
  for (int i = 0; i <= 10; ++i) {
    TrajectorySample s;
    s.t = 0.1 * i;
    s.epi.S = 0.9 - 0.01 * i;
    s.epi.C = 0.05;
    s.epi.I = 0.01 * i;
    s.epi.R_C = 0.02;
    s.epi.R_I = 0.03;
    s.d_N = 0.5 / (1.0 + i);
    s.A = 0.8 + 0.001 * i;
    s.gamma_E = 0.1 * i * i;
    tr.push_back(s);
  }
  return tr;
}

}  // namespace

TEST_CASE("trajectory CSV emit and parse") {
  const Trajectory tr = tiny_trajectory();

  SUBCASE("header is the exact published schema") {
    const std::string csv = trajectory_to_csv(tr);
    CHECK(csv.substr(0, csv.find('\n')) == "t,S,C,I,R_C,R_I,d_N,A,gamma_E");
  }

  SUBCASE("emit-parse round trip is byte-identical") {
    const std::string csv = trajectory_to_csv(tr);
    std::istringstream in(csv);
    const Trajectory back = trajectory_from_csv(in);
    REQUIRE(back.size() == tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK(back[i].t == tr[i].t);
      CHECK(back[i].epi.S == tr[i].epi.S);
      CHECK(back[i].epi.C == tr[i].epi.C);
      CHECK(back[i].epi.I == tr[i].epi.I);
      CHECK(back[i].epi.R_C == tr[i].epi.R_C);
      CHECK(back[i].epi.R_I == tr[i].epi.R_I);
      CHECK(back[i].d_N == tr[i].d_N);
      CHECK(back[i].A == tr[i].A);
      CHECK(back[i].gamma_E == tr[i].gamma_E);
    }
    CHECK(trajectory_to_csv(back) == csv);
  }

  SUBCASE("stride keeps the first and last samples") {
    const std::string csv = trajectory_to_csv(tr, 4);
    std::istringstream in(csv);
    const Trajectory back = trajectory_from_csv(in);
    REQUIRE(back.size() == 4);  // i = 0, 4, 8, 10
    CHECK(back.front().t == tr.front().t);
    CHECK(back.back().t == tr.back().t);
  }

  SUBCASE("nonpositive stride behaves like 1") {
    CHECK(trajectory_to_csv(tr, 0) == trajectory_to_csv(tr, 1));
    CHECK(trajectory_to_csv(tr, -3) == trajectory_to_csv(tr, 1));
  }

  SUBCASE("bad header is rejected") {
    std::istringstream in("time,S,C,I,R_C,R_I,d_N,A,gamma_E\n0,1,0,0,0,0,0,1,0\n");
    CHECK_THROWS_AS(trajectory_from_csv(in), std::runtime_error);
  }

  SUBCASE("short row is rejected") {
    std::istringstream in(std::string("t,S,C,I,R_C,R_I,d_N,A,gamma_E\n") +
                          "0,1,0,0\n");
    CHECK_THROWS_AS(trajectory_from_csv(in), std::runtime_error);
  }

  SUBCASE("non-numeric cell is rejected") {
    std::istringstream in(std::string("t,S,C,I,R_C,R_I,d_N,A,gamma_E\n") +
                          "0,1,0,0,0,oops,0,1,0\n");
    CHECK_THROWS_AS(trajectory_from_csv(in), std::runtime_error);
  }
}

TEST_CASE("run config parsing") {
  SUBCASE("empty object yields validated defaults") {
    const RunConfig cfg = parse_run_config(nlohmann::json::object());
    CHECK(cfg.model.beta == doctest::Approx(ModelParams{}.beta));
    CHECK(cfg.policy.empty());
    CHECK(cfg.output.stride == 1);
    CHECK(cfg.integrator.method == IntegratorMethod::fixed_step_rk4);
  }

  SUBCASE("all sections override defaults") {
    const auto j = nlohmann::json::parse(R"({
      "model": {"beta": 3.5, "sigma": 0.4, "gamma": 0.3, "alpha": 0.7,
                "delta_init": 0.02, "T": 12.0, "a0": 1.5, "a1": 0.5,
                "a2": 2.5, "lc_rate_convention": "as-printed"},
      "integrator": {"method": "adaptive_rk45", "step_size": 0.01,
                     "rel_tol": 1e-9, "abs_tol": 1e-11},
      "search": {"grid_points_per_dim": 7, "seed_top_k": 11,
                 "accept_tol": 1e-9},
      "policy": [{"t_start": 0.0, "d": 0.2}, {"t_start": 5.0, "d": 0.8}],
      "output": {"directory": "/tmp/x", "csv": false, "stride": 10}
    })");
    const RunConfig cfg = parse_run_config(j);
    CHECK(cfg.model.beta == 3.5);
    CHECK(cfg.model.a2 == 2.5);
    CHECK(cfg.model.lc_rates == LcRateConvention::as_printed);
    CHECK(cfg.integrator.method == IntegratorMethod::adaptive_rk45);
    CHECK(cfg.integrator.rel_tol == 1e-9);
    CHECK(cfg.search.grid_points_per_dim == 7);
    CHECK(cfg.search.seed_top_k == 11);
    REQUIRE(cfg.policy.size() == 2);
    CHECK(cfg.policy[1].t_start == 5.0);
    CHECK(cfg.policy[1].d == 0.8);
    CHECK(cfg.output.directory == "/tmp/x");
    CHECK_FALSE(cfg.output.csv);
    CHECK(cfg.output.stride == 10);
  }

  SUBCASE("unknown keys are ignored") {
    const auto j = nlohmann::json::parse(
        R"({"_notes": ["text"], "model": {"beta": 1.0, "custom": 3}})");
    CHECK(parse_run_config(j).model.beta == 1.0);
  }

  SUBCASE("model validation errors propagate") {
    auto j = nlohmann::json::parse(R"({"model": {"alpha": 0.0}})");
    CHECK_THROWS_AS(parse_run_config(j), std::invalid_argument);
    j = nlohmann::json::parse(R"({"model": {"delta_init": 1.0}})");
    CHECK_THROWS_AS(parse_run_config(j), std::invalid_argument);
    j = nlohmann::json::parse(R"({"model": {"beta": -1.0}})");
    CHECK_THROWS_AS(parse_run_config(j), std::invalid_argument);
  }

  SUBCASE("policy must start at zero with increasing times and d in [0,1]") {
    auto j = nlohmann::json::parse(
        R"({"policy": [{"t_start": 1.0, "d": 0.5}]})");
    CHECK_THROWS_AS(parse_run_config(j), std::runtime_error);
    j = nlohmann::json::parse(
        R"({"policy": [{"t_start": 0.0, "d": 0.5},
                       {"t_start": 0.0, "d": 0.6}]})");
    CHECK_THROWS_AS(parse_run_config(j), std::runtime_error);
    j = nlohmann::json::parse(R"({"policy": [{"t_start": 0.0, "d": 1.5}]})");
    CHECK_THROWS_AS(parse_run_config(j), std::runtime_error);
  }

  SUBCASE("unknown enum strings are rejected") {
    auto j = nlohmann::json::parse(
        R"({"model": {"lc_rate_convention": "sideways"}})");
    CHECK_THROWS_AS(parse_run_config(j), std::runtime_error);
    j = nlohmann::json::parse(R"({"integrator": {"method": "euler"}})");
    CHECK_THROWS_AS(parse_run_config(j), std::runtime_error);
  }

  SUBCASE("missing file errors out") {
    CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"),
                    std::runtime_error);
  }
}

TEST_CASE("manifest schema") {
  ModelParams p;
  p.beta = 0.0;
  p.sigma = 0.2;
  p.gamma = 0.1;
  p.alpha = 0.5;
  p.delta_init = 0.05;
  p.T = 10.0;
  IntegratorConfig cfg;
  SearchConfig search;
  search.grid_points_per_dim = 6;
  const EquilibriumSet set = enumerate_equilibria(p, search, cfg);
  REQUIRE(set.equilibria.size() == 1);

  const nlohmann::json m = manifest_json(set, p);
  CHECK(m.at("schema_version") == 1);
  CHECK(m.at("count") == 1);
  CHECK(m.at("params").at("beta") == 0.0);
  CHECK(m.at("params").at("lc_rate_convention") == "dynamics-consistent");
  REQUIRE(m.at("equilibria").size() == 1);
  const auto& e = m.at("equilibria").at(0);
  const auto& fc = e.at("final_condition");
  CHECK(fc.at("S_T").get<double>() ==
        doctest::Approx(1.0 - p.delta_init).epsilon(1e-8));
  const double mass = fc.at("S_T").get<double>() + fc.at("C_T").get<double>() +
                      fc.at("I_T").get<double>() + fc.at("R_C_T").get<double>() +
                      fc.at("R_I_T").get<double>();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.at("attack_rate").get<double>() ==
        doctest::Approx(p.delta_init).epsilon(1e-6));
  CHECK(e.at("residual").get<double>() < 1e-8);
  CHECK(e.at("fixed_point_verified").get<bool>());
  CHECK(e.contains("total_gamma_E"));
  CHECK(e.contains("L_S0"));
  CHECK(e.contains("peak_I"));
  CHECK(e.contains("t_peak"));
  const auto& d = m.at("diagnostics");
  CHECK(d.at("candidates_traced").get<long>() > 0);
  CHECK(d.contains("invalid_boundary"));
  CHECK(d.contains("seeds_refined"));
  CHECK(d.contains("refinement_failures"));

  // The manifest is stable JSON: dump and re-parse reproduce it.
  CHECK(nlohmann::json::parse(m.dump()) == m);
}

TEST_CASE("policy_at lookup") {
  std::vector<PolicySegment> policy{{0.0, 0.1}, {2.0, 0.6}, {5.0, 0.3}};
  CHECK(policy_at(policy, 0.0) == 0.1);
  CHECK(policy_at(policy, 1.99) == 0.1);
  CHECK(policy_at(policy, 2.0) == 0.6);
  CHECK(policy_at(policy, 4.0) == 0.6);
  CHECK(policy_at(policy, 7.0) == 0.3);
  CHECK(policy_at({}, 3.0) == 0.0);
}
