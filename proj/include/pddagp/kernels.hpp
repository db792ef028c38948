#pragma once

#include <vector>

#include "pddagp/cmatrix.hpp"

namespace pddagp::kernels {

// Execution policy for the inner kernels. The OpenMP variants assign each
// output element to exactly one thread and keep the accumulation order of
// every element identical to the serial reference, so results are bitwise
// equal for any thread count. One solve stays on Exec::serial; sweeps
// parallelize across Monte Carlo trials instead.
enum class Exec { serial, parallel };

// c = a * b
CMatrix matmul(const CMatrix& a, const CMatrix& b, Exec ex = Exec::serial);
// c = a * b^H
CMatrix matmul_nh(const CMatrix& a, const CMatrix& b, Exec ex = Exec::serial);
// c = a^H * b
CMatrix matmul_hn(const CMatrix& a, const CMatrix& b, Exec ex = Exec::serial);

// diag(phi) * h
CMatrix scale_rows(const std::vector<cxd>& phi, const CMatrix& h,
                   Exec ex = Exec::serial);

// direct + g * diag(phi) * hs, fused over the surface dimension
CMatrix compose_reflected(const CMatrix& direct, const CMatrix& g,
                          const std::vector<cxd>& phi, const CMatrix& hs,
                          Exec ex = Exec::serial);

// out[n] = (g^H * d * hs^H)[n, n], without forming the n_s x n_s product
std::vector<cxd> vecd_sandwich(const CMatrix& g, const CMatrix& d,
                               const CMatrix& hs, Exec ex = Exec::serial);

}  // namespace pddagp::kernels
