#pragma once

#include <vector>

#include "pddagp/cmatrix.hpp"
#include "pddagp/model.hpp"

namespace pddagp {

// Optimization state: transmit covariances, phase vector, slack.
struct DesignPoint {
  std::vector<CMatrix> x;  // m_i blocks, n_b x n_b, Hermitian PSD
  std::vector<cxd> phi;    // n_s, unit modulus on the feasible set
  double tau = 0.0;

  static DesignPoint initial(const ScenarioConfig& cfg);
};

struct PenaltyState {
  double mu = 0.0;
  double rho = 1.0;
};

// Sum of the transmit covariances.
CMatrix covariance_sum(const DesignPoint& d);

// Per-receiver achievable rate in nats.
double rate_m(const EffectiveChannels& eff, const DesignPoint& d, std::size_t m);

// Weighted sum rate in nats.
double wsr(const EffectiveChannels& eff, const DesignPoint& d,
           const std::vector<double>& omega);

// Weighted harvested power normalized by the threshold; the harvest
// constraint reads harvested_power_norm >= 1.
double harvested_power_norm(const EffectiveChannels& eff, const DesignPoint& d,
                            const ScenarioConfig& cfg);

// f = 1 + tau - harvested_power_norm
double residual_f(const EffectiveChannels& eff, const DesignPoint& d,
                  const ScenarioConfig& cfg);

// Augmented objective: wsr - (mu*f + 0.5/rho * f^2).
double aug_objective(const EffectiveChannels& eff, const DesignPoint& d,
                     const PenaltyState& pen, const ScenarioConfig& cfg);

// One pass producing all the scalars the solver needs per evaluation.
struct Evaluation {
  double wsr = 0.0;
  double harvested = 0.0;
  double f = 0.0;
  double aug = 0.0;
};

// harvest_on=false drops the harvest constraint: f is identically zero and
// the augmented objective reduces to the weighted sum rate.
Evaluation evaluate(const EffectiveChannels& eff, const DesignPoint& d,
                    const PenaltyState& pen, const ScenarioConfig& cfg,
                    bool harvest_on = true);

}  // namespace pddagp
