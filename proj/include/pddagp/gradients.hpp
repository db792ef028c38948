#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "pddagp/model.hpp"
#include "pddagp/objective.hpp"

namespace pddagp {

struct GradX {
  std::vector<CMatrix> g;  // per IR, n_b x n_b, Hermitian
};

struct GradPhi {
  std::vector<cxd> g;  // n_s
};

// Closed-form gradient of the augmented objective w.r.t. each transmit
// covariance block. Gradients are taken w.r.t. the conjugated variable, so
// the ascent update is X + delta * g with no extra scaling.
GradX grad_x(const EffectiveChannels& eff, const DesignPoint& d,
             const PenaltyState& pen, const ScenarioConfig& cfg,
             bool harvest_on = true,
             double f_hint = std::numeric_limits<double>::quiet_NaN());

// Closed-form gradient w.r.t. the phase vector.
GradPhi grad_phi(const ChannelSet& ch, const EffectiveChannels& eff,
                 const DesignPoint& d, const PenaltyState& pen,
                 const ScenarioConfig& cfg, bool harvest_on = true,
                 double f_hint = std::numeric_limits<double>::quiet_NaN());

// Central difference of a scalar objective along a direction; the test-side
// reference for the closed forms above. Point only needs + and scalar *.
template <class Obj, class Point>
double fd_oracle(Obj&& obj, const Point& point, const Point& direction,
                 double step) {
  if (!(step > 0.0)) throw ConfigError("fd_oracle: step must be positive");
  const Point hi = point + step * direction;
  const Point lo = point + (-step) * direction;
  return (obj(hi) - obj(lo)) / (2.0 * step);
}

}  // namespace pddagp
