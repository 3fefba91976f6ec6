#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rydgate/model.hpp"
#include "rydgate/protocol.hpp"
#include "rydgate/pulses.hpp"

namespace rydgate::analysis {

// Adiabatic spectrum vs detuning at fixed Omega = omega0, with eigenstates
// tracked across the grid by maximum overlap. eta quantifies non-adiabatic
// coupling out of the followed state (the one connected to the all-ground
// input at the left edge of the sweep):
//   eta_n = |<alpha_f|dH/dt|alpha_n> / (E_f - E_n)|^2 * tau / delta0,
// with dH/dt taken from the schedule's ramp rates at the time the sweep
// passes the given detuning.
struct SpectrumScan {
    Eigen::VectorXd deltas;
    Eigen::MatrixXd energies;  // (grid point, tracked label), labels fixed at the left edge
    Eigen::MatrixXd eta;       // (grid point, tracked label), from the followed state
    int followedLabel = 0;
    std::vector<std::string> warnings;
};

SpectrumScan spectrumScan(const model::AtomArray& array, const model::BasisMap& basis,
                          const pulses::PulseSchedule& schedule, int bSign, int gridSize);

// Momentum sector of the ring-rotation symmetry. The active basis is first
// restricted to blockade-compatible states (no strongly coupled pair doubly
// excited; such states sit an energy ~B away and do not mix with the gate
// dynamics). Sectors with p != 0 are decoupled from the driven p = 0 sector.
struct SymmetrySector {
    int momentumIndex = 0;  // p = 2*pi*momentumIndex / k
    double momentum = 0.0;
    Eigen::MatrixXcd vectors;  // (basis dim, sector dim), orthonormal columns
    std::vector<std::uint32_t> memberStates;
    // +/-1 per sector state when the reflection through outer atom 1 maps the
    // sector to itself (p = 0 or p = pi); empty when it maps to the partner
    // sector at -p.
    std::vector<int> reflectionEigenvalues;
};

std::vector<SymmetrySector> classifySymmetry(const model::AtomArray& array,
                                             const model::BasisMap& basis);

// Dark-subspace census at a fixed Hamiltonian point: eigenvalues of H
// restricted to the p != 0 sectors, grouped into degenerate pairs (between
// mirror sectors) and singletons.
struct DarkReport {
    int darkCount = 0;
    int allowedDim = 0;
    std::vector<double> darkEnergies;  // ascending
    int degeneratePairs = 0;
    int singletons = 0;
};

DarkReport darkReport(const model::AtomArray& array, const std::vector<SymmetrySector>& sectors,
                      double omega0, double delta);

// Gap between the adiabatically followed state and its nearest partner inside
// the p = 0 sector of the all-ones input, as a function of detuning at fixed
// Omega = omega0. Used to design the gap-adapted sweep.
struct GapProfile {
    Eigen::VectorXd deltas;
    Eigen::VectorXd gaps;
    double operator()(double delta) const;  // linear interpolation, clamped at the ends
};

GapProfile gapProfile(const model::AtomArray& array, double omega0, double delta0, int gridSize);

// Decay contribution of the Rydberg-state lifetime to the gate error.
struct DecayError {
    double linear = 0.0;  // 2 nuBar Gamma tau
    double exact = 0.0;   // 1 - exp(-2 nuBar Gamma tau)
};

DecayError decayError(double tau, double gamma, double nuBar);

// Input-averaged excitation statistics of a completed run, plus the
// mean-field estimate: each addressed atom turns over when the sweep crosses
// half its interaction shift within the addressed set, so it spends a
// fraction 1/2 - B_i/(4 delta0) of the protocol excited.
struct MeanExcitation {
    double nuMid = 0.0;           // input average of <n>(tau)
    double nuBar = 0.0;           // input and time average over [0, 2 tau]
    double nuBarMeanField = 0.0;  // closed-form estimate of nuBar
};

MeanExcitation meanExcitation(const protocol::GateRun& run);

// Least-squares fit of log E vs tau to E(tau) = (4/2^(k+1)) mu exp(-c w * tau)
// with w = omega0^2/delta0. Only samples with E in [1e-6, 1e-1] enter the
// fit; outside that range the error is no longer a single exponential.
struct LeakageFit {
    double mu = 0.0;
    double c = 0.0;
    double residual = 0.0;  // rms residual of log E
    int usedSamples = 0;
    std::vector<std::string> warnings;
};

LeakageFit leakageFit(const std::vector<std::pair<double, double>>& errorSamples, int k,
                      double delta0, double omega0);

// Landau-Zener transition probability for an avoided crossing of gap deltaE
// swept at rate 2*delta0/tau.
double landauZenerEstimate(double deltaE, double delta0, double tau);

// Closed-form optimum of E(tau) = 2 nuBar Gamma tau + (4/2^(k+1)) mu e^(-c w tau),
// plus the minimum of the same curve found numerically on a sampled grid.
struct OptimalDuration {
    double tauOpt = 0.0;
    double eMin = 0.0;
    double tauNumeric = 0.0;
    double eNumeric = 0.0;
};

OptimalDuration optimalDuration(int k, double mu, double c, double nuBar, double gamma,
                                double delta0, double omegaZero);

// Monte Carlo over thermal atom motion: per sample, every atom gets a 3D
// Maxwell-Boltzmann velocity (most probable speed u = sqrt(2 kB T / m)) and
// drifts ballistically through both protocol steps; couplings follow the
// instantaneous distances. Reported is E_th = E_tot - E_(T=0) with the
// baseline evaluated through the identical moving-coupling code path at zero
// velocity. The RNG stream is split per sample from the seed, so results are
// independent of worker count.
struct ThermalResult {
    double mean = 0.0;
    double stddev = 0.0;    // sample standard deviation
    double baseline = 0.0;  // E_tot at T = 0
    std::vector<double> samples;
};

ThermalResult thermalMonteCarlo(const model::AtomArray& array,
                                const pulses::PulseSchedule& stepI,
                                const protocol::GateOptions& options, double temperatureUK,
                                int sampleCount, std::uint64_t seed);

}  // namespace rydgate::analysis
