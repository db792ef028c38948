#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pddagp/gradients.hpp"
#include "pddagp/model.hpp"
#include "pddagp/objective.hpp"
#include "pddagp/projections.hpp"

namespace pddagp {

struct SolverConfig {
  double mu0 = 0.0;
  double rho0 = 1.0;  // must be positive: the update rules divide by rho
  double kappa = 0.1;
  double epsilon = 1e-3;
  double delta_x0 = 1.0;
  double delta_phi0 = 1.0;
  double ls_shrink = 0.5;
  double ls_grow = 2.0;
  int ls_max = 30;
  int inner_max = 2000;
  int outer_max = 30;
  // When false the harvest constraint is dropped entirely: f == 0, tau == 0
  // and the solve maximizes the weighted sum rate alone.
  bool harvest_constraint = true;
};

void validate(const SolverConfig& scfg);
SolverConfig solver_from_json(const nlohmann::json& j);
nlohmann::json solver_to_json(const SolverConfig& scfg);

struct TraceRow {
  int outer = 0;
  int inner = 0;
  double aug = 0.0;
  double wsr = 0.0;
  double f = 0.0;
  double rho = 0.0;
  double mu = 0.0;
  double step_x = 0.0;
  double step_phi = 0.0;
};

struct SolveReport {
  DesignPoint final;
  bool feasible = false;
  double wsr_nats = 0.0;
  double harvested_norm = 0.0;
  std::vector<TraceRow> trace;
  double wall_time_ms = 0.0;
  std::string exit_reason;  // "converged" | "outer_cap"
  int outer_rounds = 0;
  int total_inner = 0;
};

nlohmann::json report_to_json(const SolveReport& rep);
std::string trace_to_csv(const std::vector<TraceRow>& trace);

struct SolveOptions {
  bool optimize_phases = true;
  std::optional<std::vector<cxd>> initial_phi;
  kernels::Exec exec = kernels::Exec::serial;
};

// Alternating projected gradient ascent on (X, phi) inside a penalty dual
// decomposition outer loop. Infeasibility is reported, not thrown.
SolveReport solve(const ChannelSet& ch, const ScenarioConfig& cfg,
                  const SolverConfig& scfg, const SolveOptions& opts = {});

// Monotone backtracking with warm start: tries grow * warm_step and halves
// until the objective stops decreasing. value_at(step) must evaluate the
// projected candidate; the last call before acceptance is the accepted one,
// so callers can cache the candidate state inside the closure.
struct LineSearchOutcome {
  double step = 0.0;
  double value = 0.0;
  bool accepted = false;
};

template <class Eval>
LineSearchOutcome line_search(Eval&& value_at, double current_value,
                              double warm_step, double grow, double shrink,
                              int max_halvings) {
  double trial = grow * warm_step;
  for (int j = 0; j <= max_halvings; ++j, trial *= shrink) {
    const double v = value_at(trial);
    if (v >= current_value) return {trial, v, true};
  }
  return {0.0, current_value, false};
}

// Closed-form maximizer of the augmented objective over the slack.
double update_tau(double p_h, double mu, double rho);

// F with F F^H = x, from the eigensystem of x.
CMatrix factor_precoders(const CMatrix& x);

}  // namespace pddagp
