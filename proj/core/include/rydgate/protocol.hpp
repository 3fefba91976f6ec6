#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rydgate/model.hpp"
#include "rydgate/pulses.hpp"
#include "rydgate/qdyn.hpp"

namespace rydgate::protocol {

struct GateOptions {
    double gammaR = 0.0;       // |r> decay during step I, rad/us
    double gammaRPrime = 0.0;  // |r'> decay during step II
    double lambda = 1.0;       // step II interaction scale is -lambda*B
    double tol = 1e-9;
    int sampleCount = 1025;    // trace samples over [0, 2 tau]
    int workers = 1;
    bool recordTraces = true;
};

// Per-atom-pair coupling override, used when atoms move during the gate.
using CouplingFn = std::function<double(int atomA, int atomB, double t)>;

struct InputRecord {
    std::vector<int> q;
    qdyn::Complex amplitude;  // g_q = <q|Psi(2 tau)>
    int nu = 0;               // excitations of the addressed independent set
    double nuAtTau = 0.0;     // <n>(tau)
    double nuBar = 0.0;       // <n> averaged over [0, 2 tau]
    std::vector<double> times;
    std::vector<double> phase;       // accumulated arg <Psi(0)|Psi(t)>
    std::vector<double> popInput;    // |<q|Psi(t)>|^2
    std::vector<double> popMis;      // population of the nu_q-excitation manifold
    std::vector<double> excitation;  // <n>(t)
};

struct GateRun {
    model::AtomArray array;
    GateOptions options;
    double tau = 0.0;
    double omega0 = 0.0;
    double delta0 = 0.0;
    pulses::PulseKind pulseKind = pulses::PulseKind::LinearSweep;
    std::vector<InputRecord> inputs;  // index = sum q_i 2^i (q0 least significant)

    const InputRecord& at(const std::vector<int>& q) const;
    std::string toJson() const;
};

// Runs both protocol steps for every computational input: step I with +B and
// gammaR, instantaneous relabeling at t = tau, mirrored step II with -lambda*B
// and gammaRPrime, projection onto the computational basis.
GateRun runGate(const model::AtomArray& array, const pulses::PulseSchedule& stepI,
                const GateOptions& options);

// Same with externally supplied time-dependent pair couplings (thermal motion);
// the sign flip still applies on top of the supplied values.
GateRun runGate(const model::AtomArray& array, const pulses::PulseSchedule& stepI,
                const GateOptions& options, const CouplingFn& coupling);

enum class FidelityTarget { ParityDiagonal, CkZAfterCorrection };

struct FidelityReport {
    double fidelity = 0.0;
    double error = 0.0;
    int dim = 0;
    FidelityTarget target = FidelityTarget::ParityDiagonal;
};

// Average gate fidelity over the 2^(k+1) qubit inputs,
//   F = [sum_q |g_q|^2 + |sum_q conj(t_q) g_q|^2] / (d (d+1)),
// with t_q the target diagonal. Auxiliary atoms are pinned to |1>, so d stays
// 2^(k+1) for extended gates.
FidelityReport averageFidelity(const GateRun& run, FidelityTarget target);

// Single-qubit correction frame: X on the listed qubits before and after the
// pulse sequence, plus Z (before) on the same qubits.
struct CorrectionFrame {
    std::vector<int> flippedQubits;  // qubit indices 1..k
};

// Branches whose auxiliary count is even need the X/Z dressing (for stars all
// of them); odd branches compose to the bare controlled-phase already.
CorrectionFrame defaultCorrectionFrame(const model::AtomArray& array);

struct FramedInput {
    std::vector<int> q;
    int sign = 1;  // from the Z gates acting on the flipped inputs
};

FramedInput applyCorrectionFrame(const std::vector<int>& q, const CorrectionFrame& frame);

// Diagonal of (prod X) U (prod Z X) including the input-independent sign, with
// U the ideal parity gate diag((-1)^nu). Index = sum q_i 2^i.
std::vector<int> composedDiagonal(const model::AtomArray& array, const CorrectionFrame& frame);

// Ideal controlled-phase diagonal: -1 iff every qubit is 1.
std::vector<int> controlledPhaseDiagonal(int k);

struct PhaseParts {
    double geometric = 0.0;  // nu_q * pi mod 2 pi
    double dynamical = 0.0;  // arg g_q minus geometric, wrapped
};

PhaseParts phaseDecomposition(const GateRun& run, const std::vector<int>& q);

}  // namespace rydgate::protocol
