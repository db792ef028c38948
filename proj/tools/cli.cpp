#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pddagp/harness.hpp"

namespace {

using namespace pddagp;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Weighted sum-rate maximization for IRS-assisted SWIPT-MIMO "
               "broadcasting via penalty dual decomposition with alternating "
               "gradient projection"};
  app.require_subcommand(1);

  std::string scenario_path, solver_path, spec_path, out_path;
  bool parallel_kernels = false;

  CLI::App* c_solve = app.add_subcommand("solve", "solve one scenario");
  c_solve->add_option("--scenario", scenario_path, "scenario JSON")->required();
  c_solve->add_option("--solver", solver_path, "solver JSON");
  c_solve->add_option("--out", out_path, "report .json or trace .csv")->required();
  c_solve->add_flag("--parallel-kernels", parallel_kernels,
                    "use the OpenMP kernels inside the solve");

  CLI::App* c_trace = app.add_subcommand(
      "trace", "solve one scenario and emit the convergence trace");
  c_trace->add_option("--scenario", scenario_path, "scenario JSON")->required();
  c_trace->add_option("--solver", solver_path, "solver JSON");
  c_trace->add_option("--out", out_path, "trace CSV path")->required();

  CLI::App* c_sweep = app.add_subcommand("sweep", "Monte Carlo sweep");
  c_sweep->add_option("--spec", spec_path, "sweep spec JSON")->required();
  c_sweep->add_option("--out", out_path, "output CSV path")->required();

  int cases = 50;
  std::uint64_t seed = 1;
  CLI::App* c_grad =
      app.add_subcommand("check-grad", "finite-difference gradient validation");
  c_grad->add_option("--cases", cases, "number of random instances");
  c_grad->add_option("--seed", seed, "master seed");

  std::string ns_csv = "100,200,400";
  int reps = 3;
  CLI::App* c_timing =
      app.add_subcommand("timing", "per-iteration cost vs surface size");
  c_timing->add_option("--ns", ns_csv, "comma-separated surface sizes");
  c_timing->add_option("--seed", seed, "channel seed");
  c_timing->add_option("--reps", reps, "repetitions per size");
  c_timing->add_option("--scenario", scenario_path, "scenario JSON");

  CLI11_PARSE(app, argc, argv);

  if (c_solve->parsed() || c_trace->parsed()) {
    const ScenarioConfig cfg = scenario_from_json(load_json(scenario_path));
    const SolverConfig scfg = solver_path.empty()
                                  ? SolverConfig{}
                                  : solver_from_json(load_json(solver_path));
    SolveOptions opts;
    if (parallel_kernels) opts.exec = kernels::Exec::parallel;
    const ChannelSet ch = generate_channels(cfg);
    const SolveReport rep = solve(ch, cfg, scfg, opts);
    if (c_trace->parsed() || ends_with(out_path, ".csv"))
      write_file(out_path, trace_to_csv(rep.trace));
    else
      write_file(out_path, report_to_json(rep).dump(2) + "\n");
    std::printf("%s: wsr = %.6f bits/s/Hz, harvested = %.4f, %d outer rounds, "
                "%d inner iterations, %.1f ms\n",
                rep.feasible ? "feasible" : "INFEASIBLE",
                rep.wsr_nats / std::log(2.0), rep.harvested_norm,
                rep.outer_rounds, rep.total_inner, rep.wall_time_ms);
    return 0;
  }

  if (c_sweep->parsed()) {
    const SweepSpec spec = sweep_from_json(load_json(spec_path));
    const SweepResult res = run_sweep(spec);
    write_file(out_path, sweep_to_csv(spec, res.rows));
    for (const SweepRow& r : res.rows)
      std::printf("%s=%g: mean %.4f bits/s/Hz (feasible %.0f%%), random-phase "
                  "%.4f, no-IRS %.4f\n",
                  axis_to_string(spec.axis).c_str(), r.axis_value,
                  r.mean_wsr_bits, 100.0 * r.feas_rate,
                  r.base_random_phase_bits, r.base_no_irs_bits);
    return 0;
  }

  if (c_grad->parsed()) {
    const GradCheckReport rep = check_gradients(GradCheckDims{}, seed, cases);
    std::printf("gradient check: %d cases, max rel err X = %.3e, phi = %.3e\n",
                rep.cases, rep.max_err_x, rep.max_err_phi);
    std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
    return rep.pass ? 0 : 3;
  }

  if (c_timing->parsed()) {
    std::vector<std::size_t> ns;
    std::stringstream ss(ns_csv);
    for (std::string tok; std::getline(ss, tok, ',');)
      ns.push_back(std::stoul(tok));
    const ScenarioConfig base = scenario_path.empty()
                                    ? ScenarioConfig{}
                                    : scenario_from_json(load_json(scenario_path));
    const TimingReport rep = timing_scan(ns, base, SolverConfig{}, seed, reps);
    for (const TimingPoint& p : rep.points)
      std::printf("n_s = %4zu: %8.2f us/inner-iteration (%d iterations)\n",
                  p.n_s, p.us_per_inner, p.inner_iterations);
    std::printf("fitted scaling exponent b = %.3f\n", rep.exponent_b);
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pddagp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const pddagp::InsufficientPointsError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
