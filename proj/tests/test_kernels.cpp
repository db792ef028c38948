#include <doctest.h>

#include <random>

#include "pddagp/kernels.hpp"
#include "test_util.hpp"

using namespace pddagp;
using kernels::Exec;
using testutil::random_matrix;
using testutil::random_unit_phases;

TEST_SUITE("kernels") {

TEST_CASE("parallel kernels match serial bitwise") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 12; ++rep) {
    const std::size_t m = 1 + rep % 5, k = 1 + (rep * 7) % 33, n = 1 + rep % 7;
    const CMatrix a = random_matrix(rng, m, k);
    const CMatrix b = random_matrix(rng, k, n);
    CHECK(kernels::matmul(a, b, Exec::serial) == kernels::matmul(a, b, Exec::parallel));

    const CMatrix c = random_matrix(rng, n, k);
    CHECK(kernels::matmul_nh(a, c, Exec::serial) ==
          kernels::matmul_nh(a, c, Exec::parallel));

    const CMatrix d = random_matrix(rng, m, n);
    CHECK(kernels::matmul_hn(a, d, Exec::serial) ==
          kernels::matmul_hn(a, d, Exec::parallel));

    const std::vector<cxd> phi = random_unit_phases(rng, k);
    const CMatrix hs = random_matrix(rng, k, n);
    CHECK(kernels::scale_rows(phi, hs, Exec::serial) ==
          kernels::scale_rows(phi, hs, Exec::parallel));

    const CMatrix direct = random_matrix(rng, m, n);
    const CMatrix g = random_matrix(rng, m, k);
    CHECK(kernels::compose_reflected(direct, g, phi, hs, Exec::serial) ==
          kernels::compose_reflected(direct, g, phi, hs, Exec::parallel));

    const CMatrix dm = random_matrix(rng, m, n);
    CHECK(kernels::vecd_sandwich(g, dm, hs.adjoint().adjoint(), Exec::serial) ==
          kernels::vecd_sandwich(g, dm, hs, Exec::parallel));
  }
}

TEST_CASE("matmul against index-loop oracle") {
  std::mt19937_64 rng(103);
  const CMatrix a = random_matrix(rng, 3, 4);
  const CMatrix b = random_matrix(rng, 4, 2);
  const CMatrix c = kernels::matmul(a, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      cxd s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
      CHECK(std::abs(c(i, j) - s) == 0.0);
    }
}

TEST_CASE("adjoint variants agree with explicit adjoints") {
  std::mt19937_64 rng(107);
  const CMatrix a = random_matrix(rng, 3, 5);
  const CMatrix b = random_matrix(rng, 4, 5);
  CHECK(frob_dist(kernels::matmul_nh(a, b), kernels::matmul(a, b.adjoint())) <
        1e-13);
  const CMatrix c = random_matrix(rng, 3, 4);
  CHECK(frob_dist(kernels::matmul_hn(a, c), kernels::matmul(a.adjoint(), c)) <
        1e-13);
}

TEST_CASE("compose_reflected equals unfused product chain") {
  std::mt19937_64 rng(109);
  const std::size_t ni = 2, ns = 6, nb = 3;
  const CMatrix direct = random_matrix(rng, ni, nb);
  const CMatrix g = random_matrix(rng, ni, ns);
  const CMatrix hs = random_matrix(rng, ns, nb);
  const std::vector<cxd> phi = random_unit_phases(rng, ns);
  const CMatrix fused = kernels::compose_reflected(direct, g, phi, hs);
  const CMatrix chain =
      direct + kernels::matmul(g, kernels::scale_rows(phi, hs));
  CHECK(frob_dist(fused, chain) < 1e-13);
}

TEST_CASE("vecd_sandwich equals diagonal of the full product") {
  std::mt19937_64 rng(113);
  const std::size_t ni = 3, ns = 5, nb = 4;
  const CMatrix g = random_matrix(rng, ni, ns);
  const CMatrix d = random_matrix(rng, ni, nb);
  const CMatrix hs = random_matrix(rng, ns, nb);
  const std::vector<cxd> got = kernels::vecd_sandwich(g, d, hs);
  const CMatrix full =
      kernels::matmul_nh(kernels::matmul(g.adjoint(), d), hs);
  for (std::size_t n = 0; n < ns; ++n)
    CHECK(std::abs(got[n] - full(n, n)) <= 1e-13);
}

TEST_CASE("zero-sized surface degenerates cleanly") {
  std::mt19937_64 rng(127);
  const CMatrix direct = random_matrix(rng, 2, 3);
  const CMatrix g(2, 0);
  const CMatrix hs(0, 3);
  const std::vector<cxd> phi;
  CHECK(frob_dist(kernels::compose_reflected(direct, g, phi, hs), direct) == 0.0);
  CHECK(kernels::vecd_sandwich(g, direct, hs).empty());
}

TEST_CASE("dimension mismatches are rejected") {
  CHECK_THROWS_AS(kernels::matmul(CMatrix(2, 3), CMatrix(2, 3)),
                  DimensionMismatchError);
  CHECK_THROWS_AS(kernels::scale_rows(std::vector<cxd>(2), CMatrix(3, 1)),
                  DimensionMismatchError);
}

}  // TEST_SUITE
