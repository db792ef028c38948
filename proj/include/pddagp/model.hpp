#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pddagp/cmatrix.hpp"
#include "pddagp/kernels.hpp"

namespace pddagp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double dist(const Vec2& a, const Vec2& b);

// Distance-power law PL(d) = c0 * (d / 1 m)^-alpha, per link class.
struct PathLoss {
  double c0_db = -30.0;
  double alpha_bs_irs = 2.2;
  double alpha_irs_ir = 2.2;
  double alpha_irs_er = 2.2;
  double alpha_bs_ir = 3.6;
  double alpha_bs_er = 3.6;
};

// Rician K factors, linear scale; 0 means Rayleigh.
struct Fading {
  double k_bs_irs = 1.9952623149688795;  // 3 dB
  double k_irs_ir = 1.9952623149688795;
  double k_irs_er = 1.9952623149688795;
  double k_bs_ir = 0.0;
  double k_bs_er = 0.0;
};

struct ScenarioConfig {
  std::size_t n_b = 4;    // BS antennas
  std::size_t n_i = 2;    // antennas per information receiver
  std::size_t n_e = 2;    // antennas per energy receiver
  std::size_t n_s = 100;  // reflecting elements (0 = no surface)
  std::size_t m_i = 2;    // information receivers
  std::size_t m_e = 4;    // energy receivers

  double p_b_dbm = 40.0;  // transmit power budget
  double p_th_mw = 0.2;   // harvested-power threshold
  double eta = 0.5;       // harvesting efficiency

  std::vector<double> omega;  // rate weights, defaults to ones(m_i)
  std::vector<double> alpha;  // harvest weights, defaults to ones(m_e)

  double noise_psd_dbm_hz = -160.0;
  double bandwidth_hz = 1e6;

  Vec2 bs_pos{0.0, 0.0};
  Vec2 irs_pos{5.0, 2.0};
  Vec2 ir_center{400.0, 0.0};
  double ir_radius = 4.0;
  double er_center_x = 5.0;
  double er_radius = 1.0;

  PathLoss pathloss;
  Fading fading;

  std::uint64_t seed = 1;

  std::vector<double> omega_or_default() const;
  std::vector<double> alpha_or_default() const;
};

// Borrow the weight vector when present, fill the scratch with ones when
// not; keeps the per-evaluation path allocation-free once a scenario has
// materialized weights.
inline const std::vector<double>& weights_or(const std::vector<double>& w,
                                             std::vector<double>& scratch,
                                             std::size_t n) {
  if (!w.empty()) return w;
  scratch.assign(n, 1.0);
  return scratch;
}

void validate(const ScenarioConfig& cfg);

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

// Noise power sigma^2 in watts.
double noise_power(const ScenarioConfig& cfg);
// Power budget in watts.
double power_budget_w(const ScenarioConfig& cfg);
// P_th / sigma^2, dimensionless.
double p_tilde(const ScenarioConfig& cfg);

// All five channel matrices of one realization. The BS-side matrices are
// divided by the noise standard deviation exactly once (normalize()).
struct ChannelSet {
  CMatrix h_s;                 // n_s x n_b
  std::vector<CMatrix> h_i;    // m_i of n_i x n_b
  std::vector<CMatrix> h_e;    // m_e of n_e x n_b
  std::vector<CMatrix> g_i;    // m_i of n_i x n_s
  std::vector<CMatrix> g_e;    // m_e of n_e x n_s
  bool normalized = false;

  void normalize(double sigma);
};

// Deterministic per seed: receiver placements, then per-link Rician draws.
ChannelSet generate_channels(const ScenarioConfig& cfg, std::uint64_t seed);

inline ChannelSet generate_channels(const ScenarioConfig& cfg) {
  return generate_channels(cfg, cfg.seed);
}

// Direct-plus-reflected composites for the current phase vector.
struct EffectiveChannels {
  std::vector<CMatrix> z;   // per IR, n_i x n_b
  std::vector<CMatrix> xi;  // per ER, n_e x n_b
};

EffectiveChannels effective_channels(const ChannelSet& ch,
                                     const std::vector<cxd>& phi,
                                     kernels::Exec ex = kernels::Exec::serial);

}  // namespace pddagp
