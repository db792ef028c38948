#include <doctest.h>

#include <random>

#include "pddagp/gradients.hpp"
#include "pddagp/harness.hpp"
#include "test_util.hpp"

using namespace pddagp;
using testutil::random_matrix;
using testutil::random_psd;
using testutil::random_unit_phases;

namespace {

ScenarioConfig toy_cfg(std::size_t n_b, std::size_t n_i, std::size_t n_e,
                       std::size_t n_s, std::size_t m_i, std::size_t m_e) {
  ScenarioConfig cfg;
  cfg.n_b = n_b;
  cfg.n_i = n_i;
  cfg.n_e = n_e;
  cfg.n_s = n_s;
  cfg.m_i = m_i;
  cfg.m_e = m_e;
  cfg.noise_psd_dbm_hz = -30.0;
  cfg.bandwidth_hz = 1.0;
  cfg.p_th_mw = 2e-3;  // p_tilde = 2
  cfg.eta = 0.5;
  return cfg;
}

ChannelSet toy_channels(std::mt19937_64& rng, const ScenarioConfig& cfg) {
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
  return ch;
}

double re_inner(const CMatrix& g, const CMatrix& dir) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      s += (std::conj(g(i, j)) * dir(i, j)).real();
  return s;
}

}  // namespace

TEST_SUITE("gradients") {

TEST_CASE("fd_oracle basics") {
  // exact for quadratics up to roundoff
  auto quad = [](double t) { return 3.0 * t * t - 2.0 * t + 1.0; };
  CHECK(fd_oracle(quad, 0.7, 1.0, 1e-4) ==
        doctest::Approx(3.0 * 2.0 * 0.7 - 2.0).epsilon(1e-10));
  auto constant = [](double) { return 5.0; };
  CHECK(fd_oracle(constant, 1.0, 1.0, 1e-6) == 0.0);
  CHECK_THROWS_AS(fd_oracle(constant, 1.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("zero-power point: rate gradient is Z^H Z, phi gradient vanishes") {
  std::mt19937_64 rng(61);
  ScenarioConfig cfg = toy_cfg(3, 2, 2, 4, 1, 1);
  cfg.alpha = {1e-30};  // effectively unweighted ER (weights must be positive)
  const ChannelSet ch = toy_channels(rng, cfg);
  DesignPoint d = DesignPoint::initial(cfg);
  const EffectiveChannels eff = effective_channels(ch, d.phi);
  const PenaltyState pen{0.5, 1.0};

  // B = C = I at X = 0, so the m=k sandwich collapses to Z^H Z.
  const GradX gx = grad_x(eff, d, pen, cfg);
  const CMatrix expect = kernels::matmul_hn(eff.z[0], eff.z[0]);
  CHECK(frob_dist(gx.g[0], expect) <= 1e-9 * (1.0 + expect.frob_norm()));

  // with X = 0 the objective does not depend on phi at all
  const GradPhi gp = grad_phi(ch, eff, d, pen, cfg);
  for (const cxd& v : gp.g) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("decoupled surface: no phi gradient") {
  std::mt19937_64 rng(67);
  ScenarioConfig cfg = toy_cfg(3, 2, 2, 4, 2, 1);
  cfg.alpha = {1e-30};
  ChannelSet ch = toy_channels(rng, cfg);
  for (CMatrix& g : ch.g_i) g = CMatrix(g.rows(), g.cols());
  const DesignPoint d{{random_psd(rng, 3, 1.0), random_psd(rng, 3, 1.0)},
                      random_unit_phases(rng, 4),
                      0.0};
  const EffectiveChannels eff = effective_channels(ch, d.phi);
  const GradPhi gp = grad_phi(ch, eff, d, PenaltyState{0.3, 0.5}, cfg);
  for (const cxd& v : gp.g) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("single receiver never exercises the cross branch") {
  std::mt19937_64 rng(71);
  const ScenarioConfig cfg = toy_cfg(3, 2, 2, 4, 1, 2);
  const ChannelSet ch = toy_channels(rng, cfg);
  const DesignPoint d{{random_psd(rng, 3, 1.5)}, random_unit_phases(rng, 4), 0.2};
  const EffectiveChannels eff = effective_channels(ch, d.phi);
  const PenaltyState pen{0.4, 0.8};
  const GradX gx = grad_x(eff, d, pen, cfg);

  // by hand: sandwich for m=k plus the common harvest term
  const CMatrix z = eff.z[0];
  CMatrix b = hermitianize(kernels::matmul_nh(kernels::matmul(z, CMatrix(3, 3)), z));
  b += CMatrix::identity(2);
  const CMatrix binv2 = inv_sqrt_psd(b);
  CMatrix c = kernels::matmul(
      kernels::matmul(binv2, hermitianize(kernels::matmul_nh(
                                 kernels::matmul(z, d.x[0]), z))),
      binv2);
  c += CMatrix::identity(2);
  const CMatrix w = kernels::matmul(kernels::matmul(binv2, inv_pd(hermitianize(c))), binv2);
  CMatrix expect = kernels::matmul(kernels::matmul_hn(z, w), z);
  const double f = residual_f(eff, d, cfg);
  CMatrix harvest(3, 3);
  for (std::size_t l = 0; l < cfg.m_e; ++l)
    harvest += kernels::matmul_hn(eff.xi[l], eff.xi[l]);
  harvest *= (pen.mu + f / pen.rho) * cfg.eta / p_tilde(cfg);
  expect += harvest;
  expect = hermitianize(expect);
  CHECK(frob_dist(gx.g[0], expect) <= 1e-9 * (1.0 + expect.frob_norm()));
}

TEST_CASE("finite-difference agreement, 50 random instances") {
  const GradCheckReport rep = check_gradients(GradCheckDims{}, 20250801, 50);
  CAPTURE(rep.max_err_x);
  CAPTURE(rep.max_err_phi);
  CHECK(rep.failures == 0);
  CHECK(rep.max_err_x <= 1e-5);
  CHECK(rep.max_err_phi <= 1e-5);
}

TEST_CASE("finite-difference agreement with three receivers") {
  // with three covariance blocks the cross-rate gradient subtracts a
  // non-identity whitening matrix; two-receiver suites never reach it
  GradCheckDims dims;
  dims.m_i = 3;
  const GradCheckReport rep = check_gradients(dims, 777, 15);
  CAPTURE(rep.max_err_x);
  CHECK(rep.failures == 0);
  CHECK(rep.max_err_x <= 1e-5);
  CHECK(rep.max_err_phi <= 1e-5);
}

TEST_CASE("gradient blocks are Hermitian") {
  std::mt19937_64 rng(73);
  const ScenarioConfig cfg = toy_cfg(3, 2, 2, 4, 2, 2);
  for (int rep = 0; rep < 20; ++rep) {
    const ChannelSet ch = toy_channels(rng, cfg);
    DesignPoint d{{random_psd(rng, 3, 1.0), random_psd(rng, 3, 2.0)},
                  random_unit_phases(rng, 4),
                  0.1};
    const EffectiveChannels eff = effective_channels(ch, d.phi);
    const GradX gx = grad_x(eff, d, PenaltyState{0.2, 0.6}, cfg);
    for (const CMatrix& g : gx.g)
      CHECK(frob_dist(g, g.adjoint()) <= 1e-9 * (1.0 + g.frob_norm()));
  }
}

TEST_CASE("huge rho reduces to the pure-rate gradient") {
  std::mt19937_64 rng(79);
  const ScenarioConfig cfg = toy_cfg(3, 2, 2, 4, 2, 2);
  const ChannelSet ch = toy_channels(rng, cfg);
  const DesignPoint d{{random_psd(rng, 3, 1.0), random_psd(rng, 3, 1.0)},
                      random_unit_phases(rng, 4),
                      0.0};
  const EffectiveChannels eff = effective_channels(ch, d.phi);
  const GradX relaxed = grad_x(eff, d, PenaltyState{0.0, 1e12}, cfg);
  const GradX pure = grad_x(eff, d, PenaltyState{0.0, 1.0}, cfg, false);
  for (std::size_t m = 0; m < cfg.m_i; ++m)
    CHECK(frob_dist(relaxed.g[m], pure.g[m]) <=
          1e-6 * (1.0 + pure.g[m].frob_norm()));
}

TEST_CASE("relabeling receivers permutes gradient blocks") {
  std::mt19937_64 rng(83);
  const ScenarioConfig cfg = toy_cfg(3, 2, 2, 4, 2, 2);
  ChannelSet ch = toy_channels(rng, cfg);
  DesignPoint d{{random_psd(rng, 3, 1.0), random_psd(rng, 3, 2.0)},
                random_unit_phases(rng, 4),
                0.3};
  const PenaltyState pen{0.5, 0.4};
  const EffectiveChannels eff = effective_channels(ch, d.phi);
  const GradX gx = grad_x(eff, d, pen, cfg);

  ChannelSet swapped = ch;
  std::swap(swapped.h_i[0], swapped.h_i[1]);
  std::swap(swapped.g_i[0], swapped.g_i[1]);
  DesignPoint ds = d;
  std::swap(ds.x[0], ds.x[1]);
  const EffectiveChannels effs = effective_channels(swapped, ds.phi);
  const GradX gxs = grad_x(effs, ds, pen, cfg);
  CHECK(frob_dist(gx.g[0], gxs.g[1]) <= 1e-10 * (1.0 + gx.g[0].frob_norm()));
  CHECK(frob_dist(gx.g[1], gxs.g[0]) <= 1e-10 * (1.0 + gx.g[1].frob_norm()));
}

TEST_CASE("all-scalar case matches hand calculus") {
  // Everything 1x1: R = ln(1 + |z|^2 x), P = (eta/pt) a |xi|^2 x.
  const ScenarioConfig cfg = toy_cfg(1, 1, 1, 1, 1, 1);
  std::mt19937_64 rng(89);
  const ChannelSet ch = toy_channels(rng, cfg);
  DesignPoint d;
  d.x = {CMatrix::identity(1)};
  d.x[0] *= 0.8;
  d.phi = random_unit_phases(rng, 1);
  d.tau = 0.25;
  const PenaltyState pen{0.3, 0.7};
  const EffectiveChannels eff = effective_channels(ch, d.phi);

  const cxd z = eff.z[0](0, 0);
  const cxd xi = eff.xi[0](0, 0);
  const double x = 0.8;
  const double eop = cfg.eta / p_tilde(cfg);
  const double p_h = eop * std::norm(xi) * x;
  const double f = 1.0 + d.tau - p_h;

  const double dr_dx = std::norm(z) / (1.0 + std::norm(z) * x);
  const double dp_dx = eop * std::norm(xi);
  const double expect_x = dr_dx + (pen.mu + f / pen.rho) * dp_dx;
  const GradX gx = grad_x(eff, d, pen, cfg);
  CHECK(gx.g[0](0, 0).real() == doctest::Approx(expect_x).epsilon(1e-10));
  CHECK(std::abs(gx.g[0](0, 0).imag()) <= 1e-14);

  // phi gradient: conj(g) * A^{-1} z x * conj(h_s) for the rate part plus
  // the scaled conj(g_e) * xi x * conj(h_s) harvest part.
  const cxd g_i = ch.g_i[0](0, 0), g_e = ch.g_e[0](0, 0), hs = ch.h_s(0, 0);
  const cxd rate_part =
      std::conj(g_i) * (z * x / (1.0 + std::norm(z) * x)) * std::conj(hs);
  const cxd harvest_part =
      (pen.mu + f / pen.rho) * eop * std::conj(g_e) * (xi * x) * std::conj(hs);
  const GradPhi gp = grad_phi(ch, eff, d, pen, cfg);
  CHECK(std::abs(gp.g[0] - (rate_part + harvest_part)) <= 1e-10);
}

TEST_CASE("directional derivatives against the oracle, both blocks") {
  // X blocks pair with Re tr(g^H D); the phi block carries the Wirtinger
  // factor two. 50-case quantified suite.
  std::mt19937_64 rng(97);
  const ScenarioConfig cfg = toy_cfg(3, 2, 2, 4, 2, 2);
  const double step = 1e-6;
  for (int rep = 0; rep < 50; ++rep) {
    const ChannelSet ch = toy_channels(rng, cfg);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DesignPoint d{{random_psd(rng, 3, 0.5 + u(rng)), random_psd(rng, 3, 0.5 + u(rng))},
                  random_unit_phases(rng, 4),
                  u(rng)};
    const PenaltyState pen{u(rng), 0.1 + u(rng)};
    const EffectiveChannels eff = effective_channels(ch, d.phi);
    const GradX gx = grad_x(eff, d, pen, cfg);

    for (std::size_t m = 0; m < cfg.m_i; ++m) {
      CMatrix dir = hermitianize(random_matrix(rng, 3, 3));
      dir *= 1.0 / dir.frob_norm();
      auto obj = [&](const CMatrix& xm) {
        DesignPoint dd = d;
        dd.x[m] = xm;
        return evaluate(eff, dd, pen, cfg).aug;
      };
      const double fd = fd_oracle(obj, d.x[m], dir, step);
      const double ip = re_inner(gx.g[m], dir);
      CHECK(std::abs(fd - ip) <= 1e-5 * (1.0 + std::abs(fd)));
    }

    const GradPhi gp = grad_phi(ch, eff, d, pen, cfg);
    std::vector<cxd> dir(cfg.n_s);
    double n2 = 0.0;
    for (cxd& v : dir) {
      v = cxd(u(rng) - 0.5, u(rng) - 0.5);
      n2 += std::norm(v);
    }
    for (cxd& v : dir) v /= std::sqrt(n2);
    auto obj = [&](double t) {
      std::vector<cxd> p = d.phi;
      for (std::size_t n = 0; n < cfg.n_s; ++n) p[n] += t * dir[n];
      const EffectiveChannels e2 = effective_channels(ch, p);
      DesignPoint dd = d;
      dd.phi = p;
      return evaluate(e2, dd, pen, cfg).aug;
    };
    const double fd = (obj(step) - obj(-step)) / (2.0 * step);
    cxd ipc = 0.0;
    for (std::size_t n = 0; n < cfg.n_s; ++n) ipc += std::conj(gp.g[n]) * dir[n];
    const double ip = 2.0 * ipc.real();
    CHECK(std::abs(fd - ip) <= 1e-5 * (1.0 + std::abs(fd)));
  }
}

}  // TEST_SUITE
