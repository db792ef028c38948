#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pddagp/model.hpp"
#include "pddagp/solver.hpp"

namespace pddagp {

enum class SweepAxis { n_s, p_th_mw, er_center_x, p_b_dbm };

SweepAxis axis_from_string(const std::string& s);
std::string axis_to_string(SweepAxis a);
ScenarioConfig apply_axis(ScenarioConfig cfg, SweepAxis axis, double value);

struct SweepSpec {
  SweepAxis axis = SweepAxis::n_s;
  std::vector<double> values;
  std::size_t trials = 100;
  ScenarioConfig base;
  std::uint64_t seed = 1;
  SolverConfig solver;
  // Wall-clock means are inherently run-dependent; reproducibility checks
  // disable them so repeated sweeps emit byte-identical CSV.
  bool measure_time = true;
};

SweepSpec sweep_from_json(const nlohmann::json& j);
nlohmann::json sweep_to_json(const SweepSpec& spec);

struct MethodResult {
  bool feasible = false;
  double wsr_nats = 0.0;
  double wall_ms = 0.0;
};

struct TrialRecord {
  std::size_t value_idx = 0;
  std::size_t trial_idx = 0;
  std::uint64_t seed = 0;
  std::uint64_t channel_hash = 0;           // hash each method's input saw
  std::uint64_t channel_hash_random = 0;
  std::uint64_t channel_hash_noirs = 0;
  MethodResult pddagp;
  MethodResult random_phase;
  MethodResult no_irs;
};

struct SweepRow {
  double axis_value = 0.0;
  double mean_wsr_bits = 0.0;
  double std_wsr_bits = 0.0;
  double feas_rate = 0.0;
  double mean_ms = 0.0;
  double base_random_phase_bits = 0.0;
  double base_no_irs_bits = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<TrialRecord> trials;  // row-major: value index, then trial
};

// Runs the solver and both trivial baselines on identical channels for every
// (axis value, trial) pair; trials execute in an OpenMP pool and aggregate in
// trial order.
SweepResult run_sweep(const SweepSpec& spec);

std::string sweep_to_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows);

enum class Baseline { random_phase, no_irs };

// random_phase: freeze phi at uniformly random phases and optimize X only.
// no_irs: zero the reflected links, then optimize X only.
SolveReport run_baseline(const ChannelSet& ch, const ScenarioConfig& cfg,
                         const SolverConfig& scfg, Baseline which,
                         std::uint64_t phase_seed);

// Deterministic counter-based child seeds.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t counter);

std::uint64_t channel_hash(const ChannelSet& ch);

struct GradCheckDims {
  std::size_t n_b = 3;
  std::size_t n_i = 2;
  std::size_t n_e = 2;
  std::size_t n_s = 4;
  std::size_t m_i = 2;
  std::size_t m_e = 2;
};

struct GradCheckReport {
  int cases = 0;
  int failures = 0;
  double max_err_x = 0.0;    // |fd - <g,dir>| / max(|fd|, 1e-9/1e-5)
  double max_err_phi = 0.0;
  bool pass = false;
};

// Finite-difference validation of both closed-form gradients on random
// small instances; the acceptance gate for the gradient formulas.
GradCheckReport check_gradients(const GradCheckDims& dims, std::uint64_t seed,
                                int cases);

struct TimingPoint {
  std::size_t n_s = 0;
  double us_per_inner = 0.0;
  int inner_iterations = 0;
};

struct TimingReport {
  std::vector<TimingPoint> points;
  double exponent_b = 0.0;  // least-squares slope of log time vs log n_s
};

// Per-inner-iteration cost as a function of the surface size.
TimingReport timing_scan(const std::vector<std::size_t>& ns_values,
                         const ScenarioConfig& base, const SolverConfig& scfg,
                         std::uint64_t seed, int reps = 3);

}  // namespace pddagp
