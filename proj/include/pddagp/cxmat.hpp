#pragma once

#include <vector>

#include "pddagp/cmatrix.hpp"
#include "pddagp/kernels.hpp"

namespace pddagp {

struct HermEig {
  std::vector<double> eigenvalues;  // ascending
  CMatrix eigenvectors;             // unitary, columns match eigenvalues
};

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
// Input must satisfy ||M - M^H|| <= 1e-8 ||M||; eigenvalues come back
// ascending and M = U diag(lambda) U^H holds to ~n*eps.
HermEig herm_eig(const CMatrix& m);

// S with S*M*S = I for Hermitian M whose spectrum is >= 1 (every B-type
// matrix here is I + PSD). A spectrum below 1 - 1e-6 signals a caller bug.
CMatrix inv_sqrt_psd(const CMatrix& m);

// Inverse of a Hermitian positive-definite matrix via its eigensystem.
CMatrix inv_pd(const CMatrix& m);

// ln det of a Hermitian positive-definite matrix, in nats.
double logdet_psd(const CMatrix& m);

// Main diagonal as a column vector.
std::vector<cxd> vecd(const CMatrix& m);

// (M + M^H) / 2
CMatrix hermitianize(const CMatrix& m);

CMatrix reconstruct(const HermEig& e);

}  // namespace pddagp
