#include "pddagp/kernels.hpp"

#include <cstdint>

namespace pddagp::kernels {

namespace {

void check_mul(std::size_t ak, std::size_t bk, const char* who) {
  if (ak != bk)
    throw DimensionMismatchError(std::string(who) + ": inner dims differ");
}

}  // namespace

CMatrix matmul(const CMatrix& a, const CMatrix& b, Exec ex) {
  check_mul(a.cols(), b.rows(), "matmul");
  const std::int64_t m = (std::int64_t)a.rows(), n = (std::int64_t)b.cols();
  const std::size_t kk = a.cols();
  CMatrix c(a.rows(), b.cols());
  if (ex == Exec::serial) {
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        cxd s = 0.0;
        for (std::size_t k = 0; k < kk; ++k) s += a(i, k) * b(k, j);
        c(i, j) = s;
      }
  } else {
#pragma omp parallel for collapse(2) schedule(static)
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        cxd s = 0.0;
        for (std::size_t k = 0; k < kk; ++k) s += a(i, k) * b(k, j);
        c(i, j) = s;
      }
  }
  return c;
}

CMatrix matmul_nh(const CMatrix& a, const CMatrix& b, Exec ex) {
  check_mul(a.cols(), b.cols(), "matmul_nh");
  const std::int64_t m = (std::int64_t)a.rows(), n = (std::int64_t)b.rows();
  const std::size_t kk = a.cols();
  CMatrix c(a.rows(), b.rows());
  if (ex == Exec::serial) {
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        cxd s = 0.0;
        for (std::size_t k = 0; k < kk; ++k) s += a(i, k) * std::conj(b(j, k));
        c(i, j) = s;
      }
  } else {
#pragma omp parallel for collapse(2) schedule(static)
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        cxd s = 0.0;
        for (std::size_t k = 0; k < kk; ++k) s += a(i, k) * std::conj(b(j, k));
        c(i, j) = s;
      }
  }
  return c;
}

CMatrix matmul_hn(const CMatrix& a, const CMatrix& b, Exec ex) {
  check_mul(a.rows(), b.rows(), "matmul_hn");
  const std::int64_t m = (std::int64_t)a.cols(), n = (std::int64_t)b.cols();
  const std::size_t kk = a.rows();
  CMatrix c(a.cols(), b.cols());
  if (ex == Exec::serial) {
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        cxd s = 0.0;
        for (std::size_t k = 0; k < kk; ++k) s += std::conj(a(k, i)) * b(k, j);
        c(i, j) = s;
      }
  } else {
#pragma omp parallel for collapse(2) schedule(static)
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        cxd s = 0.0;
        for (std::size_t k = 0; k < kk; ++k) s += std::conj(a(k, i)) * b(k, j);
        c(i, j) = s;
      }
  }
  return c;
}

CMatrix scale_rows(const std::vector<cxd>& phi, const CMatrix& h, Exec ex) {
  if (phi.size() != h.rows())
    throw DimensionMismatchError("scale_rows: phi length != rows");
  const std::int64_t m = (std::int64_t)h.rows();
  const std::size_t n = h.cols();
  CMatrix c(h.rows(), h.cols());
  if (ex == Exec::serial) {
    for (std::int64_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = phi[i] * h(i, j);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = phi[i] * h(i, j);
  }
  return c;
}

CMatrix compose_reflected(const CMatrix& direct, const CMatrix& g,
                          const std::vector<cxd>& phi, const CMatrix& hs,
                          Exec ex) {
  if (g.cols() != phi.size() || phi.size() != hs.rows() ||
      direct.rows() != g.rows() || direct.cols() != hs.cols())
    throw DimensionMismatchError("compose_reflected: inconsistent shapes");
  const std::int64_t m = (std::int64_t)direct.rows(),
                     n = (std::int64_t)direct.cols();
  const std::size_t ns = phi.size();
  CMatrix c(direct.rows(), direct.cols());
  if (ex == Exec::serial) {
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        cxd s = direct(i, j);
        for (std::size_t k = 0; k < ns; ++k) s += g(i, k) * phi[k] * hs(k, j);
        c(i, j) = s;
      }
  } else {
#pragma omp parallel for collapse(2) schedule(static)
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        cxd s = direct(i, j);
        for (std::size_t k = 0; k < ns; ++k) s += g(i, k) * phi[k] * hs(k, j);
        c(i, j) = s;
      }
  }
  return c;
}

std::vector<cxd> vecd_sandwich(const CMatrix& g, const CMatrix& d,
                               const CMatrix& hs, Exec ex) {
  if (g.rows() != d.rows() || d.cols() != hs.cols())
    throw DimensionMismatchError("vecd_sandwich: inconsistent shapes");
  if (g.cols() != hs.rows())
    throw DimensionMismatchError("vecd_sandwich: surface dims differ");
  const std::int64_t ns = (std::int64_t)g.cols();
  const std::size_t ni = g.rows(), nb = d.cols();
  std::vector<cxd> out((std::size_t)ns);
  if (ex == Exec::serial) {
    for (std::int64_t n = 0; n < ns; ++n) {
      cxd acc = 0.0;
      for (std::size_t i = 0; i < ni; ++i) {
        cxd row = 0.0;
        for (std::size_t j = 0; j < nb; ++j)
          row += d(i, j) * std::conj(hs(n, j));
        acc += std::conj(g(i, n)) * row;
      }
      out[(std::size_t)n] = acc;
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t n = 0; n < ns; ++n) {
      cxd acc = 0.0;
      for (std::size_t i = 0; i < ni; ++i) {
        cxd row = 0.0;
        for (std::size_t j = 0; j < nb; ++j)
          row += d(i, j) * std::conj(hs(n, j));
        acc += std::conj(g(i, n)) * row;
      }
      out[(std::size_t)n] = acc;
    }
  }
  return out;
}

}  // namespace pddagp::kernels
