// Times the serial reference kernels against their OpenMP variants on the
// solver's hot shapes, plus an end-to-end dispatch solve in both modes.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hgp/case_io.hpp"
#include "hgp/dispatch.hpp"

using namespace hgp;
using linalg::Exec;
using linalg::Matrix;
using linalg::Vector;

namespace {

double seconds(auto fn, int reps) {
  // one warm-up, then best of reps
  fn();
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    best = std::min(best, dt.count());
  }
  return best;
}

Matrix random_quasidefinite(std::size_t n, std::size_t p, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  Matrix m(n + p, n + p);
  for (std::size_t i = 0; i < n + p; ++i)
    for (std::size_t j = i; j < n + p; ++j) {
      const double v = 0.1 * dist(rng);
      m(i, j) = v;
      m(j, i) = v;
    }
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 10.0 + std::abs(dist(rng));
  for (std::size_t i = n; i < n + p; ++i) m(i, i) = -10.0 - std::abs(dist(rng));
  return m;
}

void bench_pair(const char* label, auto serial_fn, auto parallel_fn, int reps) {
  const double ts = seconds(serial_fn, reps);
  const double tp = seconds(parallel_fn, reps);
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", label, ts * 1e3, tp * 1e3,
              ts / tp);
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("HGP_THREADS")) linalg::set_max_threads(std::atoi(env));
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", linalg::max_threads());
#else
  std::printf("built without OpenMP; 'parallel' runs the serial path\n");
#endif
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  std::mt19937 rng(42);
  for (std::size_t n : {240u, 480u, 840u}) {
    const std::size_t p = n / 2;
    const Matrix base = random_quasidefinite(n, p, rng);
    Matrix work;
    const std::string label = "ldlt_factor n=" + std::to_string(n + p);
    bench_pair(
        label.c_str(),
        [&] {
          work = base;
          linalg::ldlt_factor_serial(work);
        },
        [&] {
          work = base;
          linalg::ldlt_factor_parallel(work);
        },
        3);
  }

  {
    const std::size_t n = 500, m = 1000;
    Matrix gt(n, m);
    std::normal_distribution<double> dist;
    for (double& v : gt.data()) v = dist(rng);
    Vector w(m, 1.0);
    Matrix c(n, n);
    bench_pair(
        "weighted_gram 500x1000",
        [&] { linalg::weighted_gram_serial(gt, w, c); },
        [&] { linalg::weighted_gram_parallel(gt, w, c); }, 3);
  }

  if (argc > 1) {
    const CaseDefinition c = load_case(argv[1]);
    qp::SolverOptions opt;
    const std::string label = "dispatch solve (" + c.name + ")";
    bench_pair(
        label.c_str(),
        [&] {
          opt.exec = Exec::Serial;
          solve_case(c, TempUnit::Celsius, opt);
        },
        [&] {
          opt.exec = Exec::Parallel;
          solve_case(c, TempUnit::Celsius, opt);
        },
        2);
  }
  return 0;
}
