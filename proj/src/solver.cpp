#include "pddagp/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "pddagp/cxmat.hpp"

namespace pddagp {

void validate(const SolverConfig& s) {
  auto bad = [](const std::string& what) { throw ConfigError("solver: " + what); };
  if (!(s.rho0 > 0.0)) bad("rho0 must be positive");
  if (!(s.kappa > 0.0 && s.kappa < 1.0)) bad("kappa must lie in (0, 1)");
  if (!(s.epsilon > 0.0)) bad("epsilon must be positive");
  if (!(s.delta_x0 > 0.0 && s.delta_phi0 > 0.0)) bad("initial steps must be positive");
  if (!(s.ls_shrink > 0.0 && s.ls_shrink < 1.0)) bad("ls_shrink must lie in (0, 1)");
  if (!(s.ls_grow >= 1.0)) bad("ls_grow must be >= 1");
  if (s.ls_max < 0) bad("ls_max must be >= 0");
  if (s.inner_max < 1 || s.outer_max < 1) bad("iteration caps must be >= 1");
}

SolverConfig solver_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("solver: expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"mu0",       "rho0",      "kappa",
                                  "epsilon",   "delta_x0",  "delta_phi0",
                                  "ls_shrink", "ls_grow",   "ls_max",
                                  "inner_max", "outer_max", "harvest_constraint"};
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw ConfigError("solver: unknown field '" + it.key() + "'");
  }
  SolverConfig s;
  try {
    if (j.contains("mu0")) s.mu0 = j["mu0"].get<double>();
    if (j.contains("rho0")) s.rho0 = j["rho0"].get<double>();
    if (j.contains("kappa")) s.kappa = j["kappa"].get<double>();
    if (j.contains("epsilon")) s.epsilon = j["epsilon"].get<double>();
    if (j.contains("delta_x0")) s.delta_x0 = j["delta_x0"].get<double>();
    if (j.contains("delta_phi0")) s.delta_phi0 = j["delta_phi0"].get<double>();
    if (j.contains("ls_shrink")) s.ls_shrink = j["ls_shrink"].get<double>();
    if (j.contains("ls_grow")) s.ls_grow = j["ls_grow"].get<double>();
    if (j.contains("ls_max")) s.ls_max = j["ls_max"].get<int>();
    if (j.contains("inner_max")) s.inner_max = j["inner_max"].get<int>();
    if (j.contains("outer_max")) s.outer_max = j["outer_max"].get<int>();
    if (j.contains("harvest_constraint"))
      s.harvest_constraint = j["harvest_constraint"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  validate(s);
  return s;
}

nlohmann::json solver_to_json(const SolverConfig& s) {
  return {{"mu0", s.mu0},
          {"rho0", s.rho0},
          {"kappa", s.kappa},
          {"epsilon", s.epsilon},
          {"delta_x0", s.delta_x0},
          {"delta_phi0", s.delta_phi0},
          {"ls_shrink", s.ls_shrink},
          {"ls_grow", s.ls_grow},
          {"ls_max", s.ls_max},
          {"inner_max", s.inner_max},
          {"outer_max", s.outer_max},
          {"harvest_constraint", s.harvest_constraint}};
}

double update_tau(double p_h, double mu, double rho) {
  return std::max(0.0, p_h - 1.0 - mu * rho);
}

CMatrix factor_precoders(const CMatrix& x) {
  const HermEig e = herm_eig(x);
  for (double v : e.eigenvalues)
    if (v < -1e-9) throw NonPsdError("factor_precoders: negative eigenvalue");
  CMatrix f = e.eigenvectors;
  for (std::size_t j = 0; j < e.eigenvalues.size(); ++j) {
    const double s = std::sqrt(std::max(e.eigenvalues[j], 0.0));
    for (std::size_t i = 0; i < f.rows(); ++i) f(i, j) *= s;
  }
  return f;
}

namespace {

// Re-derive f and the penalized objective from cached wsr/harvested scalars;
// keeps every code path's arithmetic identical.
void finish_eval(Evaluation& ev, double tau, const PenaltyState& pen,
                 bool harvest_on) {
  if (harvest_on) {
    ev.f = 1.0 + tau - ev.harvested;
    ev.aug = ev.wsr - (pen.mu * ev.f + 0.5 / pen.rho * ev.f * ev.f);
  } else {
    ev.f = 0.0;
    ev.aug = ev.wsr;
  }
}

}  // namespace

SolveReport solve(const ChannelSet& ch, const ScenarioConfig& cfg_in,
                  const SolverConfig& scfg, const SolveOptions& opts) {
  validate(cfg_in);
  validate(scfg);
  const auto t0 = std::chrono::steady_clock::now();

  // Materialize default weights once so the per-candidate evaluations stay
  // allocation-free.
  ScenarioConfig cfg = cfg_in;
  cfg.omega = cfg_in.omega_or_default();
  cfg.alpha = cfg_in.alpha_or_default();

  const bool harvest = scfg.harvest_constraint;
  const double p_b = power_budget_w(cfg);
  const double eps = scfg.epsilon;

  DesignPoint d = DesignPoint::initial(cfg);
  if (opts.initial_phi) {
    if (opts.initial_phi->size() != cfg.n_s)
      throw DimensionMismatchError("solve: initial phi length != n_s");
    d.phi = *opts.initial_phi;
  }
  PenaltyState pen{scfg.mu0, scfg.rho0};

  EffectiveChannels eff = effective_channels(ch, d.phi, opts.exec);
  Evaluation ev = evaluate(eff, d, pen, cfg, harvest);

  double step_x = scfg.delta_x0;
  double step_phi = scfg.delta_phi0;
  const bool do_phi = opts.optimize_phases && cfg.n_s > 0;

  SolveReport rep;
  rep.exit_reason = "outer_cap";
  rep.trace.reserve(256);

  // Line-search scratch: the last evaluated candidate is the accepted one.
  std::vector<CMatrix> cand_x;
  Evaluation cand_ev;
  std::vector<cxd> cand_phi;
  EffectiveChannels cand_eff;

  try {
    for (int outer = 1; outer <= scfg.outer_max; ++outer) {
      double aug_prev = ev.aug;
      for (int r = 1; r <= scfg.inner_max; ++r) {
        // X update: ascend, project onto the trace-budget PSD set.
        const GradX gx = grad_x(eff, d, pen, cfg, harvest, ev.f);
        auto eval_x = [&](double s) {
          std::vector<CMatrix> moved(d.x.size());
          for (std::size_t m = 0; m < d.x.size(); ++m) {
            CMatrix step = gx.g[m];
            step *= s;
            moved[m] = hermitianize(d.x[m] + step);
          }
          cand_x = project_covariances(moved, p_b);
          DesignPoint dc{cand_x, d.phi, d.tau};
          cand_ev = evaluate(eff, dc, pen, cfg, harvest);
          return cand_ev.aug;
        };
        const LineSearchOutcome lx = line_search(eval_x, ev.aug, step_x,
                                                 scfg.ls_grow, scfg.ls_shrink,
                                                 scfg.ls_max);
        if (lx.accepted) {
          d.x = std::move(cand_x);
          ev = cand_ev;
          step_x = lx.step;
        }

        // phi update: ascend, rescale onto the unit-modulus torus.
        double accepted_phi_step = 0.0;
        if (do_phi) {
          const GradPhi gp = grad_phi(ch, eff, d, pen, cfg, harvest, ev.f);
          auto eval_phi = [&](double s) {
            std::vector<cxd> moved(d.phi.size());
            for (std::size_t n = 0; n < d.phi.size(); ++n)
              moved[n] = d.phi[n] + s * gp.g[n];
            cand_phi = project_phases(moved);
            cand_eff = effective_channels(ch, cand_phi, opts.exec);
            DesignPoint dc{d.x, cand_phi, d.tau};
            cand_ev = evaluate(cand_eff, dc, pen, cfg, harvest);
            return cand_ev.aug;
          };
          const LineSearchOutcome lp = line_search(eval_phi, ev.aug, step_phi,
                                                   scfg.ls_grow, scfg.ls_shrink,
                                                   scfg.ls_max);
          if (lp.accepted) {
            d.phi = std::move(cand_phi);
            eff = std::move(cand_eff);
            ev = cand_ev;
            step_phi = lp.step;
            accepted_phi_step = lp.step;
          }
        }

        // Slack update, the closed-form maximizer over tau >= 0.
        if (harvest) {
          d.tau = update_tau(ev.harvested, pen.mu, pen.rho);
          finish_eval(ev, d.tau, pen, harvest);
        }

        ++rep.total_inner;
        rep.trace.push_back({outer, r, ev.aug, ev.wsr, ev.f, pen.rho, pen.mu,
                             lx.accepted ? lx.step : 0.0, accepted_phi_step});
        if (!std::isfinite(ev.aug))
          throw NumericalBreakdownError("solve: objective became non-finite");

        const double denom = std::max(std::abs(aug_prev), 1e-12);
        const bool inner_done = std::abs(ev.aug - aug_prev) / denom < eps;
        aug_prev = ev.aug;
        if (inner_done) break;
      }

      rep.outer_rounds = outer;
      // Outer test: the penalty gap must close and the residual itself must
      // be small enough to certify the harvest constraint at reporting
      // tolerance.
      const double gap =
          std::abs(ev.aug - ev.wsr) / std::max(std::abs(ev.aug), 1e-12);
      if (gap < eps && std::abs(ev.f) <= eps) {
        rep.exit_reason = "converged";
        break;
      }
      if (outer == scfg.outer_max) break;

      pen.mu += ev.f / pen.rho;
      pen.rho *= scfg.kappa;
      finish_eval(ev, d.tau, pen, harvest);
    }
  } catch (const NonFiniteError& e) {
    throw NumericalBreakdownError(std::string("solve: ") + e.what());
  } catch (const NotPositiveDefiniteError& e) {
    throw NumericalBreakdownError(std::string("solve: ") + e.what());
  } catch (const SpectrumBelowOneError& e) {
    throw NumericalBreakdownError(std::string("solve: ") + e.what());
  }

  rep.final = std::move(d);
  rep.wsr_nats = ev.wsr;
  rep.harvested_norm = ev.harvested;
  rep.feasible = rep.exit_reason == "converged" &&
                 (!harvest || ev.harvested >= 1.0 - 1e-3);
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return rep;
}

namespace {

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json data = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      data.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

}  // namespace

nlohmann::json report_to_json(const SolveReport& rep) {
  nlohmann::json j;
  j["feasible"] = rep.feasible;
  j["exit_reason"] = rep.exit_reason;
  j["wsr_nats"] = rep.wsr_nats;
  j["wsr_bits"] = rep.wsr_nats / std::log(2.0);
  j["harvested_norm"] = rep.harvested_norm;
  j["tau"] = rep.final.tau;
  j["outer_rounds"] = rep.outer_rounds;
  j["total_inner"] = rep.total_inner;
  j["wall_time_ms"] = rep.wall_time_ms;
  nlohmann::json xs = nlohmann::json::array();
  for (const CMatrix& x : rep.final.x) xs.push_back(matrix_to_json(x));
  j["x"] = std::move(xs);
  nlohmann::json phi = nlohmann::json::array();
  for (const cxd& v : rep.final.phi) phi.push_back({v.real(), v.imag()});
  j["phi"] = std::move(phi);
  nlohmann::json tr = nlohmann::json::array();
  for (const TraceRow& t : rep.trace)
    tr.push_back({t.outer, t.inner, t.aug, t.wsr, t.f, t.rho, t.mu, t.step_x,
                  t.step_phi});
  j["trace"] = std::move(tr);
  return j;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::string out = "outer,inner,aug_obj_nats,wsr_nats,f,rho,mu,step_x,step_phi\n";
  char buf[320];
  for (const TraceRow& t : trace) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t.outer,
                  t.inner, t.aug, t.wsr, t.f, t.rho, t.mu, t.step_x, t.step_phi);
    out += buf;
  }
  return out;
}

}  // namespace pddagp
