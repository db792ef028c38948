#include "pddagp/projections.hpp"

#include <algorithm>
#include <cmath>

#include "pddagp/cxmat.hpp"

namespace pddagp {

double water_level(std::vector<double> lambda, double budget) {
  if (!(budget > 0.0)) throw ConfigError("water_level: budget must be positive");
  double clamped_sum = 0.0;
  for (double v : lambda) clamped_sum += std::max(v, 0.0);
  if (clamped_sum <= budget) return 0.0;

  std::sort(lambda.begin(), lambda.end(), std::greater<double>());
  double prefix = 0.0;
  double nu = 0.0;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    prefix += lambda[k];
    const double cand = (prefix - budget) / double(k + 1);
    if (k + 1 == lambda.size() || lambda[k + 1] <= cand) {
      nu = cand;
      break;
    }
  }
  return nu;
}

std::vector<CMatrix> project_covariances(const std::vector<CMatrix>& x,
                                         double p_b) {
  if (!(p_b > 0.0))
    throw ConfigError("project_covariances: budget must be positive");

  std::vector<HermEig> eigs;
  eigs.reserve(x.size());
  std::vector<double> lams;
  double min_lam = 0.0;
  double total = 0.0;
  for (const CMatrix& m : x) {
    eigs.push_back(herm_eig(m));  // rejects non-Hermitian input
    for (double v : eigs.back().eigenvalues) {
      lams.push_back(v);
      min_lam = std::min(min_lam, v);
      total += std::max(v, 0.0);
    }
  }

  // Already-feasible inputs pass through bitwise, which also makes the
  // projection exactly idempotent.
  const double scale = 1.0 + std::abs(total);
  if (min_lam >= -1e-12 * scale && total <= p_b * (1.0 + 1e-12)) return x;

  const double nu = water_level(lams, p_b);

  std::vector<CMatrix> out;
  out.reserve(x.size());
  for (const HermEig& e : eigs) {
    std::vector<double> lam = e.eigenvalues;
    for (double& v : lam) v = std::max(v - nu, 0.0);
    CMatrix scaled = e.eigenvectors;
    for (std::size_t j = 0; j < lam.size(); ++j)
      for (std::size_t i = 0; i < scaled.rows(); ++i) scaled(i, j) *= lam[j];
    out.push_back(hermitianize(kernels::matmul_nh(scaled, e.eigenvectors)));
  }
  return out;
}

std::vector<cxd> project_phases(const std::vector<cxd>& phi) {
  std::vector<cxd> out(phi.size());
  for (std::size_t n = 0; n < phi.size(); ++n) {
    const double r = std::abs(phi[n]);
    out[n] = r > 0.0 ? phi[n] / r : cxd(1.0, 0.0);
  }
  return out;
}

}  // namespace pddagp
