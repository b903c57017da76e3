#include <benchmark/benchmark.h>

#include "sixbie/bessel.hpp"
#include "sixbie/boundary_solver.hpp"
#include "sixbie/config.hpp"
#include "sixbie/kernels.hpp"
#include "sixbie/nystrom.hpp"

using namespace sixbie;

namespace {

const Coefficients kCoeffs{cplx(0, 2), cplx(2, -3), cplx(-3, 1)};

// One argument per evaluation region: series, continued fraction, asymptotic.
void BM_BesselK01(benchmark::State& state) {
  const real mods[3] = {1.0, 8.0, 30.0};
  const cplx z = std::polar(mods[state.range(0)], 0.4);
  cplx k0, k1;
  for (auto _ : state) {
    bessel_k01(z, k0, k1);
    benchmark::DoNotOptimize(k0);
    benchmark::DoNotOptimize(k1);
  }
}
BENCHMARK(BM_BesselK01)->DenseRange(0, 2);

void BM_BesselK0Reference(benchmark::State& state) {
  const cplx z = std::polar(8.0, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(bessel_k0_reference(z).value);
}
BENCHMARK(BM_BesselK0Reference);

void BM_KernelP2(benchmark::State& state) {
  const KernelContext ctx = KernelContext::make(kCoeffs, {16.0, {}});
  const Vec2 dx{0.05, 0.03}, ny{0.6, 0.8};
  for (auto _ : state) benchmark::DoNotOptimize(eval_kernel(KernelId::P2, ctx, dx, ny));
}
BENCHMARK(BM_KernelP2);

void BM_TraceBlock(benchmark::State& state) {
  const TraceBlock block(KernelContext::make(kCoeffs, {16.0, {}}));
  cplx out[9];
  for (auto _ : state) {
    block.eval(0.05, {0.6, 0.8}, {0.0, 1.0}, {0.6, -0.8}, out);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_TraceBlock);

void BM_Assemble(benchmark::State& state) {
  const KernelContext ctx = KernelContext::make(kCoeffs, {16.0, {}});
  const BoundaryCurve curve = make_curve(CurveKind::ellipse, {});
  NystromOptions opts;
  opts.threads = 1;
  for (auto _ : state) {
    NystromAssembler a(ctx, curve, int(state.range(0)), opts);
    benchmark::DoNotOptimize(a.assemble().data());
  }
}
BENCHMARK(BM_Assemble)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SolveDirect(benchmark::State& state) {
  const KernelContext ctx = KernelContext::make(kCoeffs, {16.0, {}});
  const BoundarySystem sys =
      assemble_system(ctx, make_curve(CurveKind::ellipse, {}), int(state.range(0)), make_boundary_data(default_trig_spec()));
  for (auto _ : state) benchmark::DoNotOptimize(solve_direct(sys).mu1.data());
}
BENCHMARK(BM_SolveDirect)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
