#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "surfint/forms.hpp"

using namespace surfint;

namespace {

struct Fixture {
  InterfaceGeometry g;
  Mesh mesh;
  DofMap cont;
  DofMap broken;
  MaterialData mat;
  CsrMatrix A;
  std::vector<double> x;
  std::vector<double> y;

  explicit Fixture(double h)
      : g(make_broken_line(std::numbers::pi / 4, 8.0)),
        mesh(triangulate(g, h)),
        cont(build_dofs(mesh, DofKind::Continuous)),
        broken(build_dofs(mesh, DofKind::Broken)),
        mat(MaterialData::constant(g, 2.0, 2.0)) {
    A = assemble(mesh, cont, broken, mat, {}).A_deltaprime();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    x.resize(static_cast<std::size_t>(A.cols));
    y.resize(static_cast<std::size_t>(A.rows));
    for (auto& v : x) v = U(rng);
  }
};

Fixture& fixture(double h) {
  static Fixture coarse(0.1);
  static Fixture fine(0.05);
  return h > 0.075 ? coarse : fine;
}

double h_of(const benchmark::State& s) { return s.range(0) == 0 ? 0.1 : 0.05; }

void assembly(benchmark::State& s, Execution e) {
  const auto& f = fixture(h_of(s));
  AssembleOptions o;
  o.execution = e;
  for (auto _ : s) benchmark::DoNotOptimize(assemble(f.mesh, f.cont, f.broken, f.mat, o));
  s.counters["triangles"] = static_cast<double>(f.mesh.triangles.size());
}

void BM_AssembleSerial(benchmark::State& s) { assembly(s, Execution::Serial); }
void BM_AssembleParallel(benchmark::State& s) { assembly(s, Execution::Parallel); }

void BM_SpmvSerial(benchmark::State& s) {
  auto& f = fixture(h_of(s));
  for (auto _ : s) {
    f.A.multiply_serial(f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
  s.counters["nnz"] = static_cast<double>(f.A.val.size());
}

void BM_SpmvParallel(benchmark::State& s) {
  auto& f = fixture(h_of(s));
  for (auto _ : s) {
    f.A.multiply(f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
  s.counters["nnz"] = static_cast<double>(f.A.val.size());
}

void BM_DotSerial(benchmark::State& s) {
  const auto& f = fixture(h_of(s));
  for (auto _ : s) benchmark::DoNotOptimize(dot_serial(f.x, f.x));
}

void BM_DotParallel(benchmark::State& s) {
  const auto& f = fixture(h_of(s));
  for (auto _ : s) benchmark::DoNotOptimize(dot(f.x, f.x));
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpmvSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SpmvParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DotSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DotParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
