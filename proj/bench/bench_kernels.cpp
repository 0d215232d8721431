#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "gurarij/polytope.hpp"

using namespace gurarij;
using polytope::HalfSpace;

namespace {

// A random polytope in R^d: n half-spaces tangent to the unit sphere.
std::vector<HalfSpace> random_halfspaces(std::size_t d, std::size_t n) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  std::vector<HalfSpace> h;
  for (std::size_t i = 0; i < n; ++i) {
    Vector a(d);
    double s = 0.0;
    for (auto& x : a) x = nd(rng), s += x * x;
    for (auto& x : a) x /= std::sqrt(s);
    h.push_back({a, 1.0});
  }
  return h;
}

std::vector<Vector> random_points(std::size_t d, std::size_t n) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> pts(n, Vector(d));
  for (auto& p : pts)
    for (auto& x : p) x = u(rng);
  return pts;
}

template <bool Parallel>
void BM_vertices(benchmark::State& st) {
  const auto h = random_halfspaces(static_cast<std::size_t>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) {
    auto v = Parallel ? polytope::vertices(h, st.range(0)) : polytope::vertices_serial(h, st.range(0));
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void BM_batch_norms(benchmark::State& st) {
  const auto g = random_points(4, static_cast<std::size_t>(st.range(0)));
  const auto x = random_points(4, static_cast<std::size_t>(st.range(1)));
  for (auto _ : st) {
    auto v = Parallel ? polytope::batch_norms(g, x) : polytope::batch_norms_serial(g, x);
    benchmark::DoNotOptimize(v);
  }
}

}  // namespace

BENCHMARK(BM_vertices<false>)->Args({3, 40})->Args({4, 40})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_vertices<true>)->Args({3, 40})->Args({4, 40})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_batch_norms<false>)->Args({64, 20000})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_batch_norms<true>)->Args({64, 20000})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
