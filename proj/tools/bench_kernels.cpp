// Compares the serial reference kernels against their OpenMP variants, and
// serial vs thread-pooled Monte Carlo solves. Results are bitwise identical
// by construction; this target measures the speedup.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "pddagp/harness.hpp"
#include "pddagp/kernels.hpp"

using namespace pddagp;
using kernels::Exec;

namespace {

CMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(2.0));
  CMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = cxd(g(rng), g(rng));
  return m;
}

template <class F>
double time_ms(F&& fn, int reps) {
  fn();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.3f ms %10.3f ms %7.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  std::printf("threads: %d\n\n", omp_get_max_threads());
  std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

  std::mt19937_64 rng(1);

  {
    const CMatrix a = random_matrix(rng, 384, 384);
    const CMatrix b = random_matrix(rng, 384, 384);
    volatile double sink = 0.0;
    const double ts = time_ms([&] { sink = sink + kernels::matmul(a, b, Exec::serial)(0, 0).real(); }, 5);
    const double tp = time_ms([&] { sink = sink + kernels::matmul(a, b, Exec::parallel)(0, 0).real(); }, 5);
    row("matmul 384x384", ts, tp);
  }

  {
    const std::size_t ns = 131072, nb = 16, ni = 8;
    const CMatrix direct = random_matrix(rng, ni, nb);
    const CMatrix g = random_matrix(rng, ni, ns);
    const CMatrix hs = random_matrix(rng, ns, nb);
    std::vector<cxd> phi(ns);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    for (cxd& v : phi) v = std::polar(1.0, u(rng));

    volatile double sink = 0.0;
    const double ts = time_ms(
        [&] { sink = sink + kernels::compose_reflected(direct, g, phi, hs, Exec::serial)(0, 0).real(); }, 5);
    const double tp = time_ms(
        [&] { sink = sink + kernels::compose_reflected(direct, g, phi, hs, Exec::parallel)(0, 0).real(); }, 5);
    row("compose_reflected n_s=128k", ts, tp);

    const CMatrix d = random_matrix(rng, ni, nb);
    const double vs = time_ms(
        [&] { sink = sink + kernels::vecd_sandwich(g, d, hs, Exec::serial)[0].real(); }, 5);
    const double vp = time_ms(
        [&] { sink = sink + kernels::vecd_sandwich(g, d, hs, Exec::parallel)[0].real(); }, 5);
    row("vecd_sandwich n_s=128k", vs, vp);
  }

  {
    // End-to-end: a batch of independent solves, serial loop vs OpenMP pool.
    ScenarioConfig cfg;
    cfg.n_s = 32;
    SolverConfig scfg;
    scfg.inner_max = 300;
    const int batch = 8;
    std::vector<ChannelSet> sets;
    for (int t = 0; t < batch; ++t)
      sets.push_back(generate_channels(cfg, child_seed(99, t)));

    std::vector<double> wsr_serial(batch), wsr_parallel(batch);
    const double ts = time_ms(
        [&] {
          for (int t = 0; t < batch; ++t)
            wsr_serial[t] = solve(sets[t], cfg, scfg).wsr_nats;
        },
        1);
    const double tp = time_ms(
        [&] {
#pragma omp parallel for schedule(dynamic)
          for (int t = 0; t < batch; ++t)
            wsr_parallel[t] = solve(sets[t], cfg, scfg).wsr_nats;
        },
        1);
    row("8 independent solves", ts, tp);
    for (int t = 0; t < batch; ++t)
      if (wsr_serial[t] != wsr_parallel[t]) {
        std::printf("MISMATCH at trial %d\n", t);
        return 1;
      }
    std::printf("\nbatch results bitwise identical across pool sizes\n");
  }
  return 0;
}
