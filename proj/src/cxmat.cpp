#include "pddagp/cxmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace pddagp {

namespace {

void require_square(const CMatrix& m, const char* who) {
  if (m.rows() != m.cols())
    throw NotSquareError(std::string(who) + ": matrix not square");
}

void require_finite(const CMatrix& m, const char* who) {
  if (!m.is_finite())
    throw NonFiniteError(std::string(who) + ": non-finite entries");
}

double herm_defect(const CMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const cxd d = m(i, j) - std::conj(m(j, i));
      s += std::norm(d);
    }
  return std::sqrt(s);
}

}  // namespace

CMatrix hermitianize(const CMatrix& m) {
  require_square(m, "hermitianize");
  const std::size_t n = m.rows();
  CMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = cxd(m(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const cxd v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

std::vector<cxd> vecd(const CMatrix& m) {
  require_square(m, "vecd");
  std::vector<cxd> d(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) d[i] = m(i, i);
  return d;
}

namespace {

template <class EigenMat>
HermEig eig_with(const CMatrix& h) {
  const std::size_t n = h.rows();
  EigenMat em(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) em((Eigen::Index)i, (Eigen::Index)j) = h(i, j);
  Eigen::SelfAdjointEigenSolver<EigenMat> solver;
  solver.compute(em);
  HermEig e;
  e.eigenvalues.resize(n);
  e.eigenvectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    e.eigenvalues[k] = solver.eigenvalues()((Eigen::Index)k);  // ascending
    for (std::size_t i = 0; i < n; ++i)
      e.eigenvectors(i, k) = solver.eigenvectors()((Eigen::Index)i, (Eigen::Index)k);
  }
  return e;
}

}  // namespace

HermEig herm_eig(const CMatrix& m) {
  require_square(m, "herm_eig");
  require_finite(m, "herm_eig");
  const double fro = m.frob_norm();
  if (herm_defect(m) > 1e-8 * fro)
    throw NonHermitianError("herm_eig: symmetry check failed");

  const std::size_t n = m.rows();
  if (n == 1) {
    HermEig e;
    e.eigenvalues = {m(0, 0).real()};
    e.eigenvectors = CMatrix::identity(1);
    return e;
  }
  const CMatrix h = hermitianize(m);
  // Fixed-size instantiations keep the antenna-sized decompositions in the
  // projection hot path off the heap.
  switch (n) {
    case 2: return eig_with<Eigen::Matrix<cxd, 2, 2>>(h);
    case 3: return eig_with<Eigen::Matrix<cxd, 3, 3>>(h);
    case 4: return eig_with<Eigen::Matrix<cxd, 4, 4>>(h);
    default: return eig_with<Eigen::MatrixXcd>(h);
  }
}

CMatrix reconstruct(const HermEig& e) {
  const std::size_t n = e.eigenvalues.size();
  CMatrix scaled = e.eigenvectors;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= e.eigenvalues[j];
  return kernels::matmul_nh(scaled, e.eigenvectors);
}

namespace {

CMatrix rebuild_with(const HermEig& e, const std::vector<double>& lam) {
  CMatrix scaled = e.eigenvectors;
  for (std::size_t j = 0; j < lam.size(); ++j)
    for (std::size_t i = 0; i < scaled.rows(); ++i) scaled(i, j) *= lam[j];
  return hermitianize(kernels::matmul_nh(scaled, e.eigenvectors));
}

}  // namespace

namespace {

// Eigenvalues of a 2x2 Hermitian block without the eigenvector machinery;
// the hot path works on 2x2 interference covariances.
struct Eig2 {
  double lo;
  double hi;
};

Eig2 eig2(const CMatrix& m) {
  const double a = m(0, 0).real(), d = m(1, 1).real();
  const double mid = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
  return {mid - r, mid + r};
}

bool small_hermitian(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() > 2) return false;
  if (!m.is_finite()) throw NonFiniteError("cxmat: non-finite entries");
  return herm_defect(m) <= 1e-8 * m.frob_norm();
}

}  // namespace

CMatrix inv_sqrt_psd(const CMatrix& m) {
  if (small_hermitian(m)) {
    if (m.rows() == 1) {
      const double a = m(0, 0).real();
      if (a < 1.0 - 1e-6)
        throw SpectrumBelowOneError("inv_sqrt_psd: eigenvalue below one");
      CMatrix s(1, 1);
      s(0, 0) = 1.0 / std::sqrt(a);
      return s;
    }
    const Eig2 e = eig2(m);
    if (e.lo < 1.0 - 1e-6)
      throw SpectrumBelowOneError("inv_sqrt_psd: eigenvalue below one");
    // f(M) = alpha I + beta M with f matched at both eigenvalues
    const double flo = 1.0 / std::sqrt(e.lo), fhi = 1.0 / std::sqrt(e.hi);
    double alpha, beta;
    if (e.hi - e.lo > 1e-12 * (1.0 + e.hi)) {
      beta = (fhi - flo) / (e.hi - e.lo);
      alpha = flo - beta * e.lo;
    } else {
      const double mid = 0.5 * (e.lo + e.hi);
      beta = -0.5 / (mid * std::sqrt(mid));
      alpha = 1.0 / std::sqrt(mid) - beta * mid;
    }
    CMatrix s(2, 2);
    s(0, 0) = alpha + beta * m(0, 0).real();
    s(1, 1) = alpha + beta * m(1, 1).real();
    s(0, 1) = beta * m(0, 1);
    s(1, 0) = std::conj(s(0, 1));
    return s;
  }
  HermEig e = herm_eig(m);
  std::vector<double> lam = e.eigenvalues;
  for (double v : lam)
    if (v < 1.0 - 1e-6)
      throw SpectrumBelowOneError("inv_sqrt_psd: eigenvalue below one");
  for (double& v : lam) v = 1.0 / std::sqrt(v);
  return rebuild_with(e, lam);
}

CMatrix inv_pd(const CMatrix& m) {
  if (small_hermitian(m)) {
    if (m.rows() == 1) {
      const double a = m(0, 0).real();
      if (a <= 0.0)
        throw NotPositiveDefiniteError("inv_pd: non-positive eigenvalue");
      CMatrix s(1, 1);
      s(0, 0) = 1.0 / a;
      return s;
    }
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const double det = a * d - std::norm(m(0, 1));
    if (det <= 0.0 || a + d <= 0.0)
      throw NotPositiveDefiniteError("inv_pd: non-positive eigenvalue");
    CMatrix s(2, 2);
    s(0, 0) = d / det;
    s(1, 1) = a / det;
    s(0, 1) = -m(0, 1) / det;
    s(1, 0) = std::conj(s(0, 1));
    return s;
  }
  HermEig e = herm_eig(m);
  std::vector<double> lam = e.eigenvalues;
  for (double v : lam)
    if (v <= 0.0)
      throw NotPositiveDefiniteError("inv_pd: non-positive eigenvalue");
  for (double& v : lam) v = 1.0 / v;
  return rebuild_with(e, lam);
}

double logdet_psd(const CMatrix& m) {
  if (small_hermitian(m)) {
    if (m.rows() == 1) {
      const double a = m(0, 0).real();
      if (a <= 0.0)
        throw NotPositiveDefiniteError("logdet_psd: non-positive eigenvalue");
      return std::log(a);
    }
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const double det = a * d - std::norm(m(0, 1));
    if (det <= 0.0 || a + d <= 0.0)
      throw NotPositiveDefiniteError("logdet_psd: non-positive eigenvalue");
    return std::log(det);
  }
  HermEig e = herm_eig(m);
  double s = 0.0;
  for (double v : e.eigenvalues) {
    if (v <= 0.0)
      throw NotPositiveDefiniteError("logdet_psd: non-positive eigenvalue");
    s += std::log(v);
  }
  return s;
}

}  // namespace pddagp
