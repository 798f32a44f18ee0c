#include <benchmark/benchmark.h>

#include <random>

#include "dfib/gates.hpp"
#include "dfib/lattice.hpp"
#include "dfib/protocols.hpp"

using namespace dfib;

namespace {

StateVector noise(int n) {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> g;
    std::vector<cplx> a(std::size_t{1} << n);
    for (auto& x : a) x = cplx(g(gen), g(gen));
    return StateVector(n, std::move(a));
}

void BM_SingleQubitGate(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto s = noise(n);
    auto op = gate_op(GateName::F, {n / 2});
    for (auto _ : st) {
        apply_op_inplace(s, op);
        benchmark::DoNotOptimize(s.amps().data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_SingleQubitGate)->DenseRange(6, 20, 2);

void BM_ControlledGate(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto s = noise(n);
    auto op = gate_op(GateName::U, {1}, {0, n - 1});
    for (auto _ : st) {
        apply_op_inplace(s, op);
        benchmark::DoNotOptimize(s.amps().data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_ControlledGate)->DenseRange(6, 20, 2);

// five-qubit recoupling, the widest op in any circuit
void BM_FiveInputFMove(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto s = noise(n);
    auto op = fmove_op(make_fmove_spec(0, {1, 2, 3, 4}));
    for (auto _ : st) {
        apply_op_inplace(s, op);
        benchmark::DoNotOptimize(s.amps().data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_FiveInputFMove)->DenseRange(6, 20, 2);

void BM_FMoveUnitary(benchmark::State& st) {
    auto spec = make_fmove_spec(0, {1, 2, 3, 4});
    for (auto _ : st) benchmark::DoNotOptimize(fmove_unitary(spec));
}
BENCHMARK(BM_FMoveUnitary);

void BM_PlaquetteProjector(benchmark::State& st) {
    Lattice l = build_lattice(LatticeKind::Tetrahedron);
    for (auto _ : st) benchmark::DoNotOptimize(plaquette_projector(l, "p1"));
}
BENCHMARK(BM_PlaquetteProjector)->Unit(benchmark::kMillisecond);

void BM_Experiment(benchmark::State& st, const char* name) {
    auto e = parse_experiment(name);
    for (auto _ : st) benchmark::DoNotOptimize(run_experiment(e).passed);
}
BENCHMARK_CAPTURE(BM_Experiment, theta, "theta-fusion")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Experiment, tetra, "tetra-fusion")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Experiment, tailed, "tailed-fusion")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Experiment, braiding, "braiding")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Experiment, twist, "twist")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Experiment, ground_tailed_theta, "ground-state:tailed-theta")->Unit(benchmark::kMillisecond);

void BM_Sampling(benchmark::State& st) {
    auto s = noise(10);
    std::uint64_t seed = 0;
    for (auto _ : st) benchmark::DoNotOptimize(sample_counts(s, {0, 1}, static_cast<std::uint64_t>(st.range(0)), seed++));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_Sampling)->Arg(1000)->Arg(100000);

void BM_CircuitRoundTrip(benchmark::State& st) {
    auto ec = build_experiment(parse_experiment("braiding"));
    for (auto _ : st) benchmark::DoNotOptimize(circuit_from_json(circuit_to_json(ec)).circuit.ops.size());
}
BENCHMARK(BM_CircuitRoundTrip)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
