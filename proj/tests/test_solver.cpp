#include <doctest.h>

#include <random>

#include "pddagp/cxmat.hpp"
#include "pddagp/solver.hpp"
#include "test_util.hpp"

using namespace pddagp;
using testutil::random_psd;

namespace {

ScenarioConfig tiny_scenario() {
  ScenarioConfig cfg;
  cfg.n_s = 16;
  cfg.seed = 5;
  return cfg;
}

bool trace_equal(const std::vector<TraceRow>& a, const std::vector<TraceRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].outer != b[i].outer || a[i].inner != b[i].inner) return false;
    if (a[i].aug != b[i].aug || a[i].wsr != b[i].wsr || a[i].f != b[i].f)
      return false;
    if (a[i].rho != b[i].rho || a[i].mu != b[i].mu) return false;
    if (a[i].step_x != b[i].step_x || a[i].step_phi != b[i].step_phi)
      return false;
  }
  return true;
}

}  // namespace

using testutil::waterfilling_capacity;

TEST_SUITE("solver") {

TEST_CASE("line_search on a concave quadratic") {
  // value(step) = -(6 step - 3)^2: maximizer at 0.5, acceptance region [0, 1]
  auto value_at = [](double s) { return -(6.0 * s - 3.0) * (6.0 * s - 3.0); };
  const double current = value_at(0.0);
  const LineSearchOutcome out = line_search(value_at, current, 8.0, 2.0, 0.5, 30);
  CHECK(out.accepted);
  CHECK(out.step == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out.value >= current);
  // the accepted step sits within one shrink factor of the region edge
  CHECK(out.step >= 0.5 * 1.0);
}

TEST_CASE("line_search returns zero when nothing improves") {
  auto value_at = [](double s) { return -s; };
  const LineSearchOutcome out = line_search(value_at, 0.0, 1.0, 2.0, 0.5, 30);
  CHECK(!out.accepted);
  CHECK(out.step == 0.0);
}

TEST_CASE("line_search accepts a plateau") {
  auto value_at = [](double) { return 7.0; };
  const LineSearchOutcome out = line_search(value_at, 7.0, 1.0, 2.0, 0.5, 30);
  CHECK(out.accepted);
  CHECK(out.step == doctest::Approx(2.0));
}

TEST_CASE("update_tau closed form") {
  CHECK(update_tau(1.5, 0.0, 0.1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(update_tau(0.5, 0.0, 1.0) == 0.0);

  // grid oracle on the tau-dependent part of the augmented objective
  std::mt19937_64 rng(301);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double p_h = 3.0 * u(rng);
    const double mu = -0.5 + 2.0 * u(rng);
    const double rho = 0.05 + 0.95 * u(rng);
    auto neg_penalty = [&](double tau) {
      const double f = 1.0 + tau - p_h;
      return -(mu * f + 0.5 / rho * f * f);
    };
    double best_tau = 0.0, best = neg_penalty(0.0);
    for (int k = 1; k <= 100000; ++k) {
      const double tau = 1e-4 * k;
      const double v = neg_penalty(tau);
      if (v > best) {
        best = v;
        best_tau = tau;
      }
    }
    CHECK(std::abs(update_tau(p_h, mu, rho) - best_tau) <= 1e-3);
  }
}

TEST_CASE("factor_precoders") {
  CHECK(frob_dist(kernels::matmul_nh(factor_precoders(CMatrix::identity(3)),
                                     factor_precoders(CMatrix::identity(3))),
                  CMatrix::identity(3)) <= 1e-12);
  const CMatrix zero(3, 3);
  CHECK(factor_precoders(zero).frob_norm() == 0.0);

  std::mt19937_64 rng(303);
  for (int rep = 0; rep < 20; ++rep) {
    const CMatrix x = random_psd(rng, 4, 2.5);
    const CMatrix f = factor_precoders(x);
    CHECK(frob_dist(kernels::matmul_nh(f, f), x) <= 1e-9);
  }

  CMatrix neg(2, 2);
  neg(0, 0) = -1.0;
  CHECK_THROWS_AS(factor_precoders(neg), NonPsdError);
}

TEST_CASE("solve is deterministic") {
  const ScenarioConfig cfg = tiny_scenario();
  const ChannelSet ch = generate_channels(cfg);
  SolverConfig scfg;
  const SolveReport a = solve(ch, cfg, scfg);
  const SolveReport b = solve(ch, cfg, scfg);
  CHECK(trace_equal(a.trace, b.trace));
  CHECK(a.feasible == b.feasible);
  CHECK(a.wsr_nats == b.wsr_nats);
}

TEST_CASE("trace is monotone within each penalty phase") {
  const ScenarioConfig cfg = tiny_scenario();
  const ChannelSet ch = generate_channels(cfg);
  const SolveReport rep = solve(ch, cfg, SolverConfig{});
  REQUIRE(!rep.trace.empty());
  for (std::size_t i = 1; i < rep.trace.size(); ++i) {
    if (rep.trace[i].outer != rep.trace[i - 1].outer) continue;
    CHECK(rep.trace[i].aug >=
          rep.trace[i - 1].aug - 1e-12 * (1.0 + std::abs(rep.trace[i - 1].aug)));
  }
}

TEST_CASE("penalty schedule follows rho0 * kappa^k") {
  const ScenarioConfig cfg = tiny_scenario();
  const ChannelSet ch = generate_channels(cfg);
  SolverConfig scfg;
  const SolveReport rep = solve(ch, cfg, scfg);
  double expect = scfg.rho0;
  int last_outer = 1;
  for (const TraceRow& t : rep.trace) {
    if (t.outer != last_outer) {
      // rho shrinks by exactly kappa at each boundary
      expect *= scfg.kappa;
      last_outer = t.outer;
    }
    CHECK(t.rho == expect);
  }
}

TEST_CASE("final iterate satisfies the feasible-set invariants") {
  const ScenarioConfig cfg = tiny_scenario();
  const ChannelSet ch = generate_channels(cfg);
  const SolveReport rep = solve(ch, cfg, SolverConfig{});
  const double p_b = power_budget_w(cfg);
  double trace = 0.0;
  for (const CMatrix& x : rep.final.x) {
    trace += x.trace().real();
    CHECK(herm_eig(x).eigenvalues.front() >= -1e-9);
  }
  CHECK(trace <= p_b * (1.0 + 1e-6));
  for (const cxd& v : rep.final.phi)
    CHECK(std::abs(std::abs(v) - 1.0) <= 1e-9);
  if (rep.feasible) {
    CHECK(rep.harvested_norm >= 1.0 - 1e-3);
    CHECK(std::abs(rep.trace.back().f) <= 1e-3);
  }
}

TEST_CASE("unreachable harvest threshold is reported infeasible") {
  ScenarioConfig cfg = tiny_scenario();
  cfg.p_th_mw = 0.2e6;  // six orders beyond reach
  const ChannelSet ch = generate_channels(cfg);
  SolverConfig scfg;
  const SolveReport rep = solve(ch, cfg, scfg);
  CHECK(!rep.feasible);
  CHECK(rep.exit_reason == "outer_cap");
  CHECK(rep.outer_rounds == scfg.outer_max);
}

TEST_CASE("three receivers solve end to end") {
  ScenarioConfig cfg = tiny_scenario();
  cfg.m_i = 3;
  const ChannelSet ch = generate_channels(cfg);
  const SolveReport rep = solve(ch, cfg, SolverConfig{});
  CHECK(rep.final.x.size() == 3);
  CHECK(rep.trace.size() >= 3);
  double total = 0.0;
  for (const CMatrix& x : rep.final.x) total += x.trace().real();
  CHECK(total <= power_budget_w(cfg) * (1.0 + 1e-6));
  if (rep.feasible) CHECK(rep.harvested_norm >= 1.0 - 1e-3);
}

TEST_CASE("gradient overflow surfaces as numerical breakdown") {
  ScenarioConfig cfg = tiny_scenario();
  cfg.omega = {1e308, 1e308};
  const ChannelSet ch = generate_channels(cfg);
  CHECK_THROWS_AS(solve(ch, cfg, SolverConfig{}), NumericalBreakdownError);
}

TEST_CASE("dead channels: zero rate, infeasible") {
  ScenarioConfig cfg = tiny_scenario();
  ChannelSet ch = generate_channels(cfg);
  auto zero_all = [](std::vector<CMatrix>& v) {
    for (CMatrix& m : v) m = CMatrix(m.rows(), m.cols());
  };
  ch.h_s = CMatrix(ch.h_s.rows(), ch.h_s.cols());
  zero_all(ch.h_i);
  zero_all(ch.h_e);
  zero_all(ch.g_i);
  zero_all(ch.g_e);
  const SolveReport rep = solve(ch, cfg, SolverConfig{});
  CHECK(!rep.feasible);
  CHECK(rep.wsr_nats == 0.0);
}

TEST_CASE("single user without the harvest constraint reaches capacity") {
  ScenarioConfig cfg;
  cfg.m_i = 1;
  cfg.n_s = 12;
  SolverConfig scfg;
  scfg.harvest_constraint = false;
  scfg.epsilon = 1e-8;
  scfg.inner_max = 20000;
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    const ChannelSet ch = generate_channels(cfg, seed);
    const SolveReport rep = solve(ch, cfg, scfg);
    REQUIRE(rep.feasible);
    const EffectiveChannels eff = effective_channels(ch, rep.final.phi);
    const double cap = waterfilling_capacity(eff.z[0], power_budget_w(cfg));
    CHECK(rep.wsr_nats == doctest::Approx(cap).epsilon(1e-3));
    CHECK(rep.wsr_nats <= cap * (1.0 + 1e-9));  // capacity upper-bounds it
  }
}

TEST_CASE("report serialization round trips the trace") {
  const ScenarioConfig cfg = tiny_scenario();
  const ChannelSet ch = generate_channels(cfg);
  const SolveReport rep = solve(ch, cfg, SolverConfig{});
  const nlohmann::json j = report_to_json(rep);
  CHECK(j["feasible"] == rep.feasible);
  CHECK(j["trace"].size() == rep.trace.size());
  const std::string csv = trace_to_csv(rep.trace);
  CHECK(csv.rfind("outer,inner,aug_obj_nats,wsr_nats,f,rho,mu,step_x,step_phi\n",
                  0) == 0);
  // one line per row plus the header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == rep.trace.size() + 1);
}

}  // TEST_SUITE
