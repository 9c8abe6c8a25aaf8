#include <benchmark/benchmark.h>

#include <random>

#include "conjint/interpolation.hpp"
#include "conjint/mu_field.hpp"

using namespace conjint;

namespace {

using Rng = std::mt19937_64;

Complex random_complex(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return {g(rng), g(rng)};
}

CMatrix random_unitary(Eigen::Index d, Rng& rng) {
  CMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = random_complex(rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(d, d);
}

CMatrix random_normal(Eigen::Index d, int values, Rng& rng) {
  const CMatrix u = random_unitary(d, rng);
  CVector diag(d);
  std::uniform_int_distribution<int> pick(0, values - 1);
  for (Eigen::Index i = 0; i < d; ++i) diag(i) = Complex(pick(rng), pick(rng) % 2);
  return u * diag.asDiagonal() * u.adjoint();
}

InterpolationProblem planted_problem(Eigen::Index d, Rng& rng) {
  const CMatrix u = random_unitary(d, rng);
  CVector diag(d);
  std::uniform_int_distribution<int> pick(0, 2);
  for (Eigen::Index i = 0; i < d; ++i) diag(i) = Complex(pick(rng), 0);
  InterpolationProblem p;
  p.operators = {u * diag.asDiagonal() * u.adjoint()};
  p.mode = Mode::symmetric;
  const Conjugation planted{u * u.transpose()};
  CVector x(d);
  for (Eigen::Index i = 0; i < d; ++i) x(i) = random_complex(rng);
  x /= x.norm();
  p.xs = {x};
  p.ys = {conjint::apply(planted, x)};
  return p;
}

void BM_decompose(benchmark::State& state) {
  Rng rng(1);
  const CMatrix n = random_normal(state.range(0), 4, rng);
  Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(decompose(n, tol));
}
BENCHMARK(BM_decompose)->Arg(8)->Arg(16)->Arg(32);

void BM_joint_decompose(benchmark::State& state) {
  Rng rng(2);
  const Eigen::Index d = state.range(0);
  const CMatrix u = random_unitary(d, rng);
  std::vector<CMatrix> fam;
  std::uniform_int_distribution<int> pick(0, 2);
  for (int k = 0; k < 2; ++k) {
    CVector diag(d);
    for (Eigen::Index i = 0; i < d; ++i) diag(i) = Complex(pick(rng), 0);
    fam.push_back(u * diag.asDiagonal() * u.adjoint());
  }
  Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(joint_decompose(fam, tol));
}
BENCHMARK(BM_joint_decompose)->Arg(8)->Arg(16)->Arg(32);

void BM_construct_symmetric(benchmark::State& state) {
  Rng rng(3);
  const InterpolationProblem p = planted_problem(state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(construct_symmetric(p));
}
BENCHMARK(BM_construct_symmetric)->Arg(8)->Arg(16)->Arg(32);

void BM_solve_sufield(benchmark::State& state) {
  Rng rng(4);
  const Eigen::Index pairs = state.range(0);
  const Eigen::Index n = 3;
  DiscreteMeasure mu;
  for (Eigen::Index i = 0; i < pairs; ++i) {
    mu.atoms.push_back({Complex(static_cast<double>(i + 1), 0), 1.0});
    mu.atoms.push_back({Complex(-static_cast<double>(i + 1), 0), 1.0});
  }
  const Eigen::Index rows = 2 * pairs;
  CMatrix f(rows, n), g(rows, n);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < n; ++c) f(r, c) = random_complex(rng);
  for (Eigen::Index i = 0; i < pairs; ++i) {
    const CMatrix u = random_unitary(n, rng);
    g.row(2 * i) = (u * f.row(2 * i).transpose()).transpose();
    g.row(2 * i + 1) = (u.transpose() * f.row(2 * i + 1).transpose()).transpose();
  }
  Tolerances tol;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_sufield(mu, {f}, {g}, tol));
}
BENCHMARK(BM_solve_sufield)->Arg(2)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
