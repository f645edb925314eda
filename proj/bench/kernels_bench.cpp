// Serial reference kernels against their OpenMP counterparts.

#include <numeric>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hierindex/kernels.hpp"

namespace {

using namespace hierindex;
namespace k = hierindex::kernels;

PointSet random_points(Eigen::Index dim, Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  PointSet p(dim, n);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = g(rng);
  return p;
}

k::SparseMatrix random_sparse(Eigen::Index rows, Eigen::Index cols, double density, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      if (u(rng) < density) t.emplace_back(r, c, 1.0 + u(rng));
  k::SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::vector<std::size_t> all_members(Eigen::Index n) {
  std::vector<std::size_t> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  return m;
}

template <auto Fn>
void BM_TransposeTimes(benchmark::State& state) {
  const auto m = random_sparse(20000, state.range(0), 0.005, 1);
  const Eigen::MatrixXd x = random_points(20000, 28, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(m, x));
}

template <auto Fn>
void BM_AssignNearest(benchmark::State& state) {
  const auto p = random_points(20, state.range(0), 3);
  const auto c = random_points(20, 2, 4);
  const auto members = all_members(p.cols());
  for (auto _ : state) benchmark::DoNotOptimize(Fn(p, members, c));
}

template <auto Fn>
void BM_CosineArgmax(benchmark::State& state) {
  const auto q = random_points(20, state.range(0), 5);
  const auto r = random_points(20, 2000, 6);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(q, r));
}

template <auto Fn>
void BM_PairwiseDistances(benchmark::State& state) {
  const auto p = random_points(20, state.range(0), 7);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(p));
}

template <auto Fn>
void BM_Covariance(benchmark::State& state) {
  const auto p = random_points(20, state.range(0), 8);
  const auto members = all_members(p.cols());
  const Vector mean = p.rowwise().mean();
  for (auto _ : state) benchmark::DoNotOptimize(Fn(p, members, mean));
}

BENCHMARK(BM_TransposeTimes<k::serial::transpose_times>)->Name("transpose_times/serial")->Arg(2000)->Arg(10000);
BENCHMARK(BM_TransposeTimes<k::parallel::transpose_times>)->Name("transpose_times/parallel")->Arg(2000)->Arg(10000);
BENCHMARK(BM_AssignNearest<k::serial::assign_nearest>)->Name("assign_nearest/serial")->Arg(2000)->Arg(20000);
BENCHMARK(BM_AssignNearest<k::parallel::assign_nearest>)->Name("assign_nearest/parallel")->Arg(2000)->Arg(20000);
BENCHMARK(BM_CosineArgmax<k::serial::cosine_argmax>)->Name("cosine_argmax/serial")->Arg(1000)->Arg(5000);
BENCHMARK(BM_CosineArgmax<k::parallel::cosine_argmax>)->Name("cosine_argmax/parallel")->Arg(1000)->Arg(5000);
BENCHMARK(BM_PairwiseDistances<k::serial::pairwise_distances>)->Name("pairwise_distances/serial")->Arg(500)->Arg(2000);
BENCHMARK(BM_PairwiseDistances<k::parallel::pairwise_distances>)->Name("pairwise_distances/parallel")->Arg(500)->Arg(2000);
BENCHMARK(BM_Covariance<k::serial::covariance>)->Name("covariance/serial")->Arg(2000)->Arg(20000);
BENCHMARK(BM_Covariance<k::parallel::covariance>)->Name("covariance/parallel")->Arg(2000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
