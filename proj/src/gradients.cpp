#include "pddagp/gradients.hpp"

#include "pddagp/cxmat.hpp"

#include <cmath>

namespace pddagp {

namespace {

// Z * X * Z^H, hermitianized.
CMatrix sandwich(const CMatrix& z, const CMatrix& x) {
  return hermitianize(kernels::matmul_nh(kernels::matmul(z, x), z));
}

// B^{-1/2} * (I + B^{-1/2} T B^{-1/2})^{-1} * B^{-1/2} for Hermitian PSD T.
// With B = I this collapses to (I + T)^{-1}.
CMatrix whitened_inverse(const CMatrix& b, const CMatrix& t,
                         bool b_is_identity) {
  if (b_is_identity) {
    CMatrix c = t;
    c += CMatrix::identity(c.rows());
    return inv_pd(hermitianize(c));
  }
  const CMatrix binv2 = inv_sqrt_psd(b);
  CMatrix c = kernels::matmul(kernels::matmul(binv2, t), binv2);
  c += CMatrix::identity(c.rows());
  const CMatrix cinv = inv_pd(hermitianize(c));
  return kernels::matmul(kernels::matmul(binv2, cinv), binv2);
}

}  // namespace

GradX grad_x(const EffectiveChannels& eff, const DesignPoint& d,
             const PenaltyState& pen, const ScenarioConfig& cfg,
             bool harvest_on, double f_hint) {
  std::vector<double> w_scratch, a_scratch;
  const std::vector<double>& omega = weights_or(cfg.omega, w_scratch, cfg.m_i);
  const std::vector<double>& alpha = weights_or(cfg.alpha, a_scratch, cfg.m_e);
  const std::size_t mi = d.x.size();
  const std::size_t nb = d.x.at(0).rows();

  // T[k][i] = Z_k X_i Z_k^H; every B-type matrix is I plus a subset sum.
  std::vector<std::vector<CMatrix>> t(mi, std::vector<CMatrix>(mi));
  for (std::size_t k = 0; k < mi; ++k)
    for (std::size_t i = 0; i < mi; ++i) t[k][i] = sandwich(eff.z.at(k), d.x[i]);

  auto subset_count = [&](std::size_t skip1, std::size_t skip2) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < mi; ++i)
      if (i != skip1 && i != skip2) ++n;
    return n;
  };
  auto subset_b = [&](std::size_t k, std::size_t skip1, std::size_t skip2) {
    CMatrix b = CMatrix::identity(eff.z[k].rows());
    for (std::size_t i = 0; i < mi; ++i) {
      if (i == skip1 || i == skip2) continue;
      b += t[k][i];
    }
    return hermitianize(b);
  };

  // Penalty direction: common to every block.
  CMatrix harvest_dir(nb, nb);
  double scale = 0.0;
  if (harvest_on) {
    for (std::size_t l = 0; l < eff.xi.size(); ++l) {
      CMatrix gram = kernels::matmul_hn(eff.xi[l], eff.xi[l]);
      gram *= alpha.at(l);
      harvest_dir += gram;
    }
    harvest_dir = hermitianize(harvest_dir);
    harvest_dir *= cfg.eta / p_tilde(cfg);
    const double f = std::isnan(f_hint) ? residual_f(eff, d, cfg) : f_hint;
    scale = pen.mu + f / pen.rho;
  }

  GradX out;
  out.g.assign(mi, CMatrix(nb, nb));
  for (std::size_t m = 0; m < mi; ++m) {
    CMatrix acc(nb, nb);
    for (std::size_t k = 0; k < mi; ++k) {
      if (k == m) {
        const bool empty = subset_count(m, m) == 0;
        const CMatrix b = empty ? CMatrix() : subset_b(m, m, m);
        const CMatrix w = whitened_inverse(b, t[m][m], empty);
        CMatrix term =
            kernels::matmul(kernels::matmul_hn(eff.z[m], w), eff.z[m]);
        term *= omega[k];
        acc += term;
      } else {
        // d/dX_m of ln|A_k| - ln|B_k|: both determinants depend on X_m.
        const bool bar_empty = subset_count(m, m) == 0;
        const bool hat_empty = subset_count(m, k) == 0;
        const CMatrix b_bar = bar_empty ? CMatrix() : subset_b(k, m, m);
        const CMatrix b_hat = hat_empty ? CMatrix() : subset_b(k, m, k);
        CMatrix w = whitened_inverse(b_bar, t[k][m], bar_empty);
        w -= whitened_inverse(b_hat, t[k][m], hat_empty);
        CMatrix term = kernels::matmul(kernels::matmul_hn(eff.z[k], w), eff.z[k]);
        term *= omega[k];
        acc += term;
      }
    }
    if (harvest_on) {
      CMatrix pterm = harvest_dir;
      pterm *= scale;
      acc += pterm;
    }
    out.g[m] = hermitianize(acc);
  }
  return out;
}

GradPhi grad_phi(const ChannelSet& ch, const EffectiveChannels& eff,
                 const DesignPoint& d, const PenaltyState& pen,
                 const ScenarioConfig& cfg, bool harvest_on, double f_hint) {
  std::vector<double> w_scratch, a_scratch;
  const std::vector<double>& omega = weights_or(cfg.omega, w_scratch, cfg.m_i);
  const std::vector<double>& alpha = weights_or(cfg.alpha, a_scratch, cfg.m_e);
  const std::size_t ns = ch.h_s.rows();
  const CMatrix sigma = covariance_sum(d);

  std::vector<cxd> g(ns, cxd(0.0, 0.0));
  for (std::size_t m = 0; m < eff.z.size(); ++m) {
    const CMatrix& z = eff.z[m];
    const CMatrix sigma_m = sigma - d.x.at(m);
    CMatrix a = sandwich(z, sigma);
    a += CMatrix::identity(z.rows());
    CMatrix b = sandwich(z, sigma_m);
    b += CMatrix::identity(z.rows());
    const CMatrix zs = kernels::matmul(z, sigma);
    const CMatrix zsm = kernels::matmul(z, sigma_m);
    CMatrix dm = kernels::matmul(inv_pd(hermitianize(a)), zs);
    dm -= kernels::matmul(inv_pd(hermitianize(b)), zsm);
    const std::vector<cxd> v = kernels::vecd_sandwich(ch.g_i[m], dm, ch.h_s);
    for (std::size_t n = 0; n < ns; ++n) g[n] += omega[m] * v[n];
  }

  if (harvest_on) {
    const double f = std::isnan(f_hint) ? residual_f(eff, d, cfg) : f_hint;
    const double scale = (pen.mu + f / pen.rho) * cfg.eta / p_tilde(cfg);
    for (std::size_t l = 0; l < eff.xi.size(); ++l) {
      const CMatrix xs = kernels::matmul(eff.xi[l], sigma);
      const std::vector<cxd> v = kernels::vecd_sandwich(ch.g_e[l], xs, ch.h_s);
      for (std::size_t n = 0; n < ns; ++n) g[n] += scale * alpha.at(l) * v[n];
    }
  }

  return GradPhi{std::move(g)};
}

}  // namespace pddagp
