// Serial reference vs OpenMP kernels. Arg 0 selects serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <numbers>

#include "qstar/bounds.hpp"
#include "qstar/catalog.hpp"
#include "qstar/certify.hpp"
#include "qstar/fields.hpp"
#include "qstar/search.hpp"

using namespace qstar;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_Scan(benchmark::State& st) {
  const auto e = catalog_entry("divfree3d");
  const Constraint c = e.constraint();
  SearchConfig cfg;
  const auto pts = sample_points(3, true, cfg);
  const ScalarField fn = [&](const KVec& k) { return projected_min_eigenvalue(c, e.form, k); };
  for (auto _ : st) benchmark::DoNotOptimize(scan(pts, fn, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(pts.size()));
}

void BM_ToGrid(benchmark::State& st) {
  const auto lat = ReciprocalLattice::from_basis(2 * std::numbers::pi * RMat::Identity(3, 3));
  const auto f = random_admissible(catalog_entry("divfree3d").sym, lat, FieldKind::J, 16, 3, true);
  const std::vector<int> shape{32, 32, 32};
  for (auto _ : st) benchmark::DoNotOptimize(to_grid(f, shape, exec_of(st)));
}

void BM_VerifyBound(benchmark::State& st) {
  const auto e = catalog_entry("grad_plus_id");
  const auto setup = bound_setup(e);
  const auto mask = make_mask(parse_omega("ball:0.3"), setup.special.lattice, {24, 24, 24});
  BoundOptions opt;
  opt.n_competitors = 8;
  opt.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(verify_bound(e.sym, e.form, setup.special, mask, opt));
}

}  // namespace

BENCHMARK(BM_Scan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ToGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyBound)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
