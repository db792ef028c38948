#include "pddagp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <limits>
#include <random>

#include "pddagp/cxmat.hpp"
#include "pddagp/gradients.hpp"

namespace pddagp {

SweepAxis axis_from_string(const std::string& s) {
  if (s == "n_s") return SweepAxis::n_s;
  if (s == "p_th_mw") return SweepAxis::p_th_mw;
  if (s == "er_center_x") return SweepAxis::er_center_x;
  if (s == "p_b_dbm") return SweepAxis::p_b_dbm;
  throw ConfigError("sweep: unknown axis '" + s + "'");
}

std::string axis_to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::n_s: return "n_s";
    case SweepAxis::p_th_mw: return "p_th_mw";
    case SweepAxis::er_center_x: return "er_center_x";
    case SweepAxis::p_b_dbm: return "p_b_dbm";
  }
  throw InternalError("axis_to_string");
}

ScenarioConfig apply_axis(ScenarioConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::n_s: {
      if (value < 0.0 || value != std::floor(value))
        throw ConfigError("sweep: n_s values must be non-negative integers");
      cfg.n_s = static_cast<std::size_t>(value);
      break;
    }
    case SweepAxis::p_th_mw: cfg.p_th_mw = value; break;
    case SweepAxis::er_center_x: cfg.er_center_x = value; break;
    case SweepAxis::p_b_dbm: cfg.p_b_dbm = value; break;
  }
  return cfg;
}

SweepSpec sweep_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sweep: expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"axis", "values",  "trials",      "base",
                                  "seed", "solver",  "measure_time"};
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw ConfigError("sweep: unknown field '" + it.key() + "'");
  }
  SweepSpec s;
  try {
    if (j.contains("axis")) s.axis = axis_from_string(j["axis"].get<std::string>());
    if (j.contains("values")) s.values = j["values"].get<std::vector<double>>();
    if (j.contains("trials")) s.trials = j["trials"].get<std::size_t>();
    if (j.contains("base")) s.base = scenario_from_json(j["base"]);
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("solver")) s.solver = solver_from_json(j["solver"]);
    if (j.contains("measure_time")) s.measure_time = j["measure_time"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  if (s.values.empty()) throw ConfigError("sweep: values must be non-empty");
  if (s.trials < 1) throw ConfigError("sweep: trials must be >= 1");
  return s;
}

nlohmann::json sweep_to_json(const SweepSpec& s) {
  return {{"axis", axis_to_string(s.axis)},
          {"values", s.values},
          {"trials", s.trials},
          {"base", scenario_to_json(s.base)},
          {"seed", s.seed},
          {"solver", solver_to_json(s.solver)},
          {"measure_time", s.measure_time}};
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

void hash_bytes(std::uint64_t& h, const void* p, std::size_t n) {
  const unsigned char* b = static_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ULL;
  }
}

void hash_matrix(std::uint64_t& h, const CMatrix& m) {
  const std::size_t r = m.rows(), c = m.cols();
  hash_bytes(h, &r, sizeof r);
  hash_bytes(h, &c, sizeof c);
  hash_bytes(h, m.data(), r * c * sizeof(cxd));
}

}  // namespace

std::uint64_t channel_hash(const ChannelSet& ch) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  hash_matrix(h, ch.h_s);
  for (const CMatrix& m : ch.h_i) hash_matrix(h, m);
  for (const CMatrix& m : ch.h_e) hash_matrix(h, m);
  for (const CMatrix& m : ch.g_i) hash_matrix(h, m);
  for (const CMatrix& m : ch.g_e) hash_matrix(h, m);
  return h;
}

SolveReport run_baseline(const ChannelSet& ch, const ScenarioConfig& cfg,
                         const SolverConfig& scfg, Baseline which,
                         std::uint64_t phase_seed) {
  SolveOptions opts;
  opts.optimize_phases = false;
  if (which == Baseline::random_phase) {
    std::mt19937_64 rng(phase_seed);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
    std::vector<cxd> phi(cfg.n_s);
    for (cxd& v : phi) v = std::polar(1.0, uphase(rng));
    opts.initial_phi = std::move(phi);
    return solve(ch, cfg, scfg, opts);
  }
  // no_irs: kill the reflected path, keep the direct links.
  ChannelSet dead = ch;
  for (CMatrix& g : dead.g_i) g = CMatrix(g.rows(), g.cols());
  for (CMatrix& g : dead.g_e) g = CMatrix(g.rows(), g.cols());
  return solve(dead, cfg, scfg, opts);
}

namespace {

constexpr std::uint64_t kPhaseSeedTag = 0x52503031ULL;  // baseline phase draws

struct TrialOutcome {
  TrialRecord rec;
  std::exception_ptr error;
};

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep: values must be non-empty");
  if (spec.trials < 1) throw ConfigError("sweep: trials must be >= 1");
  validate(spec.solver);

  std::vector<ScenarioConfig> cfgs;
  cfgs.reserve(spec.values.size());
  for (double v : spec.values) {
    ScenarioConfig c = apply_axis(spec.base, spec.axis, v);
    validate(c);
    cfgs.push_back(std::move(c));
  }

  const std::size_t nv = spec.values.size();
  const std::size_t nt = spec.trials;
  std::vector<TrialOutcome> outcomes(nv * nt);

  const auto jobs = static_cast<std::int64_t>(nv * nt);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t job = 0; job < jobs; ++job) {
    TrialOutcome& out = outcomes[(std::size_t)job];
    try {
      const std::size_t vi = (std::size_t)job / nt;
      const std::size_t ti = (std::size_t)job % nt;
      const ScenarioConfig& cfg = cfgs[vi];
      // Trial seeds depend on the trial index only, so axis values share
      // channel realizations wherever dimensions allow a paired comparison.
      const std::uint64_t seed = child_seed(spec.seed, ti);
      const ChannelSet ch = generate_channels(cfg, seed);
      const std::uint64_t h = channel_hash(ch);

      TrialRecord rec;
      rec.value_idx = vi;
      rec.trial_idx = ti;
      rec.seed = seed;
      rec.channel_hash = h;

      SolveReport main = solve(ch, cfg, spec.solver);
      rec.pddagp = {main.feasible, main.wsr_nats, main.wall_time_ms};

      rec.channel_hash_random = channel_hash(ch);
      SolveReport rp = run_baseline(ch, cfg, spec.solver, Baseline::random_phase,
                                    child_seed(seed, kPhaseSeedTag));
      rec.random_phase = {rp.feasible, rp.wsr_nats, rp.wall_time_ms};

      rec.channel_hash_noirs = channel_hash(ch);
      SolveReport ni =
          run_baseline(ch, cfg, spec.solver, Baseline::no_irs, /*unused*/ 0);
      rec.no_irs = {ni.feasible, ni.wsr_nats, ni.wall_time_ms};

      out.rec = std::move(rec);
    } catch (...) {
      out.error = std::current_exception();
    }
  }

  for (const TrialOutcome& o : outcomes)
    if (o.error) std::rethrow_exception(o.error);

  SweepResult res;
  res.trials.reserve(outcomes.size());
  for (TrialOutcome& o : outcomes) res.trials.push_back(std::move(o.rec));

  const double ln2 = std::log(2.0);
  for (std::size_t vi = 0; vi < nv; ++vi) {
    SweepRow row;
    row.axis_value = spec.values[vi];
    double sum = 0.0, sum2 = 0.0, ms = 0.0;
    double sum_rp = 0.0, sum_ni = 0.0;
    std::size_t n_feas = 0, n_rp = 0, n_ni = 0;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const TrialRecord& r = res.trials[vi * nt + ti];
      if (r.pddagp.feasible) {
        const double bits = r.pddagp.wsr_nats / ln2;
        sum += bits;
        sum2 += bits * bits;
        ms += r.pddagp.wall_ms;
        ++n_feas;
      }
      if (r.random_phase.feasible) {
        sum_rp += r.random_phase.wsr_nats / ln2;
        ++n_rp;
      }
      if (r.no_irs.feasible) {
        sum_ni += r.no_irs.wsr_nats / ln2;
        ++n_ni;
      }
    }
    row.feas_rate = double(n_feas) / double(nt);
    if (n_feas > 0) {
      row.mean_wsr_bits = sum / double(n_feas);
      const double var =
          n_feas > 1
              ? std::max(0.0, (sum2 - sum * sum / double(n_feas)) / double(n_feas - 1))
              : 0.0;
      row.std_wsr_bits = std::sqrt(var);
      row.mean_ms = spec.measure_time ? ms / double(n_feas) : 0.0;
    } else {
      row.mean_wsr_bits = std::nan("");
      row.std_wsr_bits = std::nan("");
      row.mean_ms = 0.0;
    }
    row.base_random_phase_bits = n_rp > 0 ? sum_rp / double(n_rp) : std::nan("");
    row.base_no_irs_bits = n_ni > 0 ? sum_ni / double(n_ni) : std::nan("");
    res.rows.push_back(row);
  }
  return res;
}

std::string sweep_to_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  (void)spec;
  std::string out =
      "axis_value,mean_wsr_bits,std_wsr_bits,feas_rate,mean_ms,"
      "base_random_phase_bits,base_no_irs_bits\n";
  char buf[256];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.axis_value, r.mean_wsr_bits, r.std_wsr_bits, r.feas_rate,
                  r.mean_ms, r.base_random_phase_bits, r.base_no_irs_bits);
    out += buf;
  }
  return out;
}

namespace {

ScenarioConfig gradcheck_scenario(const GradCheckDims& d) {
  ScenarioConfig cfg;
  cfg.n_b = d.n_b;
  cfg.n_i = d.n_i;
  cfg.n_e = d.n_e;
  cfg.n_s = d.n_s;
  cfg.m_i = d.m_i;
  cfg.m_e = d.m_e;
  // Unit-scale synthetic channels; pick the noise/threshold pair so the
  // normalized harvest term is O(1) and actually exercises the penalty path.
  cfg.noise_psd_dbm_hz = -30.0;
  cfg.bandwidth_hz = 1.0;  // sigma^2 = 1e-6 W = 1e-3 mW
  cfg.p_th_mw = 2e-3;      // p_tilde = 2
  cfg.eta = 0.5;
  return cfg;
}

CMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(2.0));
  CMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = cxd(g(rng), g(rng));
  return m;
}

CMatrix random_psd(std::mt19937_64& rng, std::size_t n, double trace_target) {
  CMatrix w = random_matrix(rng, n, n);
  CMatrix x = hermitianize(kernels::matmul_nh(w, w));
  const double t = x.trace().real();
  x *= trace_target / t;
  return x;
}

CMatrix random_hermitian_unit(std::mt19937_64& rng, std::size_t n) {
  CMatrix w = random_matrix(rng, n, n);
  CMatrix h = hermitianize(w);
  const double f = h.frob_norm();
  h *= 1.0 / f;
  return h;
}

}  // namespace

GradCheckReport check_gradients(const GradCheckDims& dims, std::uint64_t seed,
                                int cases) {
  const ScenarioConfig cfg = gradcheck_scenario(dims);
  const double step = 1e-6;
  GradCheckReport rep;
  rep.cases = cases;

  for (int c = 0; c < cases; ++c) {
    std::mt19937_64 rng(child_seed(seed, (std::uint64_t)c));
    ChannelSet ch;
    ch.h_s = random_matrix(rng, cfg.n_s, cfg.n_b);
    for (std::size_t m = 0; m < cfg.m_i; ++m) {
      ch.h_i.push_back(random_matrix(rng, cfg.n_i, cfg.n_b));
      ch.g_i.push_back(random_matrix(rng, cfg.n_i, cfg.n_s));
    }
    for (std::size_t l = 0; l < cfg.m_e; ++l) {
      ch.h_e.push_back(random_matrix(rng, cfg.n_e, cfg.n_b));
      ch.g_e.push_back(random_matrix(rng, cfg.n_e, cfg.n_s));
    }
    ch.normalized = true;

    std::uniform_real_distribution<double> u(0.0, 1.0);
    DesignPoint d;
    const bool zero_power = (c % 10 == 9);  // keep a few degenerate points in
    for (std::size_t m = 0; m < cfg.m_i; ++m)
      d.x.push_back(zero_power ? CMatrix(cfg.n_b, cfg.n_b)
                               : random_psd(rng, cfg.n_b, 0.5 + 2.0 * u(rng)));
    d.phi.resize(cfg.n_s);
    for (cxd& v : d.phi) v = std::polar(1.0, 2.0 * M_PI * u(rng));
    d.tau = u(rng);
    PenaltyState pen{u(rng), 0.1 + 0.9 * u(rng)};

    const EffectiveChannels eff = effective_channels(ch, d.phi);
    const GradX gx = grad_x(eff, d, pen, cfg);
    const GradPhi gp = grad_phi(ch, eff, d, pen, cfg);

    for (std::size_t m = 0; m < cfg.m_i; ++m) {
      const CMatrix dir = random_hermitian_unit(rng, cfg.n_b);
      auto obj = [&](const CMatrix& xm) {
        DesignPoint dd = d;
        dd.x[m] = xm;
        return evaluate(eff, dd, pen, cfg).aug;
      };
      const double fd = fd_oracle(obj, d.x[m], dir, step);
      double ip = 0.0;
      for (std::size_t i = 0; i < cfg.n_b; ++i)
        for (std::size_t j = 0; j < cfg.n_b; ++j)
          ip += (std::conj(gx.g[m](i, j)) * dir(i, j)).real();
      const double err = std::abs(fd - ip);
      const double rel = err / std::max(std::abs(fd), 1e-9 / 1e-5);
      rep.max_err_x = std::max(rep.max_err_x, rel);
      if (err > std::max(1e-5 * std::abs(fd), 1e-9)) ++rep.failures;
    }

    {
      std::vector<cxd> dir(cfg.n_s);
      double n2 = 0.0;
      for (cxd& v : dir) {
        v = cxd(u(rng) - 0.5, u(rng) - 0.5);
        n2 += std::norm(v);
      }
      for (cxd& v : dir) v /= std::sqrt(n2);
      auto obj = [&](const std::vector<cxd>& phi) {
        const EffectiveChannels e2 = effective_channels(ch, phi);
        DesignPoint dd = d;
        dd.phi = phi;
        return evaluate(e2, dd, pen, cfg).aug;
      };
      // finite difference on the unconstrained phi space
      std::vector<cxd> hi = d.phi, lo = d.phi;
      for (std::size_t n = 0; n < cfg.n_s; ++n) {
        hi[n] += step * dir[n];
        lo[n] -= step * dir[n];
      }
      const double fd = (obj(hi) - obj(lo)) / (2.0 * step);
      cxd ipc = 0.0;
      for (std::size_t n = 0; n < cfg.n_s; ++n) ipc += std::conj(gp.g[n]) * dir[n];
      const double ip = 2.0 * ipc.real();
      const double err = std::abs(fd - ip);
      const double rel = err / std::max(std::abs(fd), 1e-9 / 1e-5);
      rep.max_err_phi = std::max(rep.max_err_phi, rel);
      if (err > std::max(1e-5 * std::abs(fd), 1e-9)) ++rep.failures;
    }
  }
  rep.pass = rep.failures == 0;
  return rep;
}

TimingReport timing_scan(const std::vector<std::size_t>& ns_values,
                         const ScenarioConfig& base, const SolverConfig& scfg,
                         std::uint64_t seed, int reps) {
  if (ns_values.size() < 3)
    throw InsufficientPointsError("timing_scan: need at least 3 surface sizes");
  const auto [mn, mx] = std::minmax_element(ns_values.begin(), ns_values.end());
  if (*mn == 0 || double(*mx) / double(*mn) < 4.0)
    throw InsufficientPointsError("timing_scan: sizes must span at least 4x");
  if (reps < 1) throw ConfigError("timing_scan: reps must be >= 1");

  // Homogeneous workload: one penalty phase with a short fixed iteration
  // budget keeps every surface size inside the productive ascent window,
  // where line searches behave alike and per-iteration cost is comparable.
  SolverConfig tcfg = scfg;
  tcfg.epsilon = 1e-300;
  tcfg.inner_max = 50;
  tcfg.outer_max = 1;
  const int n_seeds = 3;

  TimingReport rep;
  for (std::size_t k = 0; k < ns_values.size(); ++k) {
    ScenarioConfig cfg = base;
    cfg.n_s = ns_values[k];
    std::vector<ChannelSet> sets;
    for (int s = 0; s < n_seeds; ++s)
      sets.push_back(generate_channels(cfg, child_seed(seed, (std::uint64_t)s)));
    for (const ChannelSet& ch : sets) solve(ch, cfg, tcfg);  // warm-up
    // best-of-reps suppresses scheduler noise, which is strictly additive
    double best = std::numeric_limits<double>::infinity();
    int iters = 0;
    for (int r = 0; r < reps; ++r) {
      double ms = 0.0;
      iters = 0;
      for (const ChannelSet& ch : sets) {
        const SolveReport s = solve(ch, cfg, tcfg);
        ms += s.wall_time_ms;
        iters += s.total_inner;
      }
      best = std::min(best, 1000.0 * ms / std::max(1, iters));
    }
    rep.points.push_back({ns_values[k], best, iters});
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = double(rep.points.size());
  for (const TimingPoint& p : rep.points) {
    const double x = std::log(double(p.n_s));
    const double y = std::log(p.us_per_inner);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.exponent_b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

}  // namespace pddagp
