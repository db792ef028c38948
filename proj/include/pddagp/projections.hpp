#pragma once

#include <vector>

#include "pddagp/cmatrix.hpp"

namespace pddagp {

// Water level nu >= 0 with sum_i max(lambda_i - nu, 0) == budget whenever the
// clamped sum exceeds the budget, else 0. Exact breakpoint scan, no
// iteration tolerance.
double water_level(std::vector<double> lambda, double budget);

// Euclidean projection onto {X_m >= 0, sum_m tr(X_m) <= p_b}: blocks are
// eigendecomposed, the concatenated eigenvalue vector is projected jointly
// (the budget couples the blocks), and each block is rebuilt with its own
// eigenvectors. Inputs must be Hermitian.
std::vector<CMatrix> project_covariances(const std::vector<CMatrix>& x,
                                         double p_b);

// Radial scaling onto the unit-modulus set; zero entries map to 1.
std::vector<cxd> project_phases(const std::vector<cxd>& phi);

}  // namespace pddagp
