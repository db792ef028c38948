#include "pddagp/objective.hpp"

#include "pddagp/cxmat.hpp"

namespace pddagp {

DesignPoint DesignPoint::initial(const ScenarioConfig& cfg) {
  DesignPoint d;
  d.x.assign(cfg.m_i, CMatrix(cfg.n_b, cfg.n_b));
  d.phi.assign(cfg.n_s, cxd(1.0, 0.0));
  d.tau = 0.0;
  return d;
}

CMatrix covariance_sum(const DesignPoint& d) {
  CMatrix s = d.x.at(0);
  for (std::size_t m = 1; m < d.x.size(); ++m) s += d.x[m];
  return s;
}

namespace {

// I + Z * S * Z^H, hermitianized against drift.
CMatrix capacity_core(const CMatrix& z, const CMatrix& s) {
  CMatrix zs = kernels::matmul(z, s);
  CMatrix m = kernels::matmul_nh(zs, z);
  m += CMatrix::identity(z.rows());
  return hermitianize(m);
}

// Re tr(Xi * S * Xi^H) without forming the outer product.
double trace_quad(const CMatrix& xi, const CMatrix& s) {
  CMatrix t = kernels::matmul(xi, s);
  double acc = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const cxd v = t(i, j) * std::conj(xi(i, j));
      acc += v.real();
    }
  return acc;
}

}  // namespace

double rate_m(const EffectiveChannels& eff, const DesignPoint& d, std::size_t m) {
  const CMatrix sigma = covariance_sum(d);
  const CMatrix sigma_m = sigma - d.x.at(m);
  const CMatrix a = capacity_core(eff.z.at(m), sigma);
  const CMatrix b = capacity_core(eff.z.at(m), sigma_m);
  return logdet_psd(a) - logdet_psd(b);
}

double wsr(const EffectiveChannels& eff, const DesignPoint& d,
           const std::vector<double>& omega) {
  double s = 0.0;
  for (std::size_t m = 0; m < d.x.size(); ++m) s += omega.at(m) * rate_m(eff, d, m);
  return s;
}

double harvested_power_norm(const EffectiveChannels& eff, const DesignPoint& d,
                            const ScenarioConfig& cfg) {
  std::vector<double> scratch;
  const std::vector<double>& alpha = weights_or(cfg.alpha, scratch, cfg.m_e);
  const CMatrix sigma = covariance_sum(d);
  double s = 0.0;
  for (std::size_t l = 0; l < eff.xi.size(); ++l)
    s += alpha.at(l) * trace_quad(eff.xi[l], sigma);
  return cfg.eta / p_tilde(cfg) * s;
}

double residual_f(const EffectiveChannels& eff, const DesignPoint& d,
                  const ScenarioConfig& cfg) {
  return 1.0 + d.tau - harvested_power_norm(eff, d, cfg);
}

double aug_objective(const EffectiveChannels& eff, const DesignPoint& d,
                     const PenaltyState& pen, const ScenarioConfig& cfg) {
  const double f = residual_f(eff, d, cfg);
  return wsr(eff, d, cfg.omega_or_default()) -
         (pen.mu * f + 0.5 / pen.rho * f * f);
}

Evaluation evaluate(const EffectiveChannels& eff, const DesignPoint& d,
                    const PenaltyState& pen, const ScenarioConfig& cfg,
                    bool harvest_on) {
  Evaluation ev;
  std::vector<double> w_scratch, a_scratch;
  const std::vector<double>& omega = weights_or(cfg.omega, w_scratch, cfg.m_i);
  const std::vector<double>& alpha = weights_or(cfg.alpha, a_scratch, cfg.m_e);
  const CMatrix sigma = covariance_sum(d);
  for (std::size_t m = 0; m < d.x.size(); ++m) {
    const CMatrix sigma_m = sigma - d.x[m];
    const CMatrix a = capacity_core(eff.z.at(m), sigma);
    const CMatrix b = capacity_core(eff.z.at(m), sigma_m);
    ev.wsr += omega[m] * (logdet_psd(a) - logdet_psd(b));
  }
  double s = 0.0;
  for (std::size_t l = 0; l < eff.xi.size(); ++l)
    s += alpha[l] * trace_quad(eff.xi[l], sigma);
  ev.harvested = cfg.eta / p_tilde(cfg) * s;
  if (harvest_on) {
    ev.f = 1.0 + d.tau - ev.harvested;
    ev.aug = ev.wsr - (pen.mu * ev.f + 0.5 / pen.rho * ev.f * ev.f);
  } else {
    ev.f = 0.0;
    ev.aug = ev.wsr;
  }
  return ev;
}

}  // namespace pddagp
