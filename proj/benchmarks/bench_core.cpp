#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "rydgate/model.hpp"
#include "rydgate/protocol.hpp"
#include "rydgate/pulses.hpp"
#include "rydgate/qdyn.hpp"
#include "rydgate/stirap.hpp"
#include "rydgate/units.hpp"

namespace {

using namespace rydgate;

constexpr double kOmega0 = 16.0 * std::numbers::pi;  // 2 pi x 8 MHz
constexpr double kDelta0 = 2.4 * kOmega0;
constexpr double kB = 6.0 * kOmega0;
constexpr double kC6 = 880e3 * units::kTwoPi;

void BM_EighDense(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const auto array = model::buildStarGraph(k, kB, kC6);
    const auto basis = model::basisForInput(array, std::vector<int>(k + 1, 1));
    const auto h = model::assembleHamiltonian(array, basis, kOmega0, 0.3 * kDelta0, 1.0);
    for (auto _ : state) {
        auto es = qdyn::eigh(h);
        benchmark::DoNotOptimize(es);
    }
}
BENCHMARK(BM_EighDense)->Arg(2)->Arg(4);

void BM_PropagateStepOne(benchmark::State& state) {
    const auto array = model::buildStarGraph(2, kB, kC6);
    const auto basis = model::basisForInput(array, {1, 1, 1});
    const auto ham = model::GateHamiltonian::build(array, basis);
    const double tau = 16.0 * std::numbers::pi / kOmega0;
    const auto sched = pulses::flatTopLinear(kOmega0, kDelta0, tau);
    qdyn::Rhs rhs = [&](double t, const qdyn::StateVector& y, qdyn::StateVector& out) {
        ham.apply(sched.omega(t), sched.delta(t), 1.0, 0.0, y, out);
    };
    qdyn::StateVector psi0 = qdyn::StateVector::Zero(basis.dim());
    psi0(0) = 1.0;
    for (auto _ : state) {
        auto traj = qdyn::propagate(psi0, rhs, 0.0, tau, 1e-9);
        benchmark::DoNotOptimize(traj.finalState);
    }
}
BENCHMARK(BM_PropagateStepOne);

void BM_GateAllInputs(benchmark::State& state) {
    const auto array = model::buildStarGraph(2, kB, kC6);
    const double tau = 16.0 * std::numbers::pi / kOmega0;
    const auto stepI = pulses::flatTopLinear(kOmega0, kDelta0, tau);
    protocol::GateOptions opt;
    opt.tol = 1e-9;
    opt.recordTraces = false;
    opt.workers = 1;
    for (auto _ : state) {
        auto run = protocol::runGate(array, stepI, opt);
        benchmark::DoNotOptimize(run.inputs);
    }
}
BENCHMARK(BM_GateAllInputs);

void BM_StirapTransfer(benchmark::State& state) {
    const auto array = model::buildStarGraph(2, units::radPerUsFromMHz(48.0), kC6);
    stirap::StirapConfig cfg;
    cfg.omegaMax = units::radPerUsFromMHz(80.0);
    cfg.tauTr = 0.2;
    cfg.tauDel = 0.275 * cfg.tauTr;
    cfg.gammaP = units::radPerUsFromMHz(0.58);
    cfg.tol = 1e-9;
    for (auto _ : state) {
        auto res = stirap::transferRun(array, {1, 1, 1}, cfg);
        benchmark::DoNotOptimize(res.amplitude);
    }
}
BENCHMARK(BM_StirapTransfer);

}  // namespace

BENCHMARK_MAIN();
