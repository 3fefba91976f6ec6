#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rydgate/model.hpp"
#include "rydgate/pulses.hpp"
#include "rydgate/qdyn.hpp"

namespace rydgate::stirap {

// Parameters of the |r> -> |r'> Raman transfer through the decaying
// intermediate |p>. lambda is the ratio -C6'/C6 of the interactions after and
// before the transfer, chi the relative strength of the r-r' cross coupling.
struct StirapConfig {
    double omegaMax = 0.0;  // rad/us
    double tauTr = 0.0;     // us
    double tauDel = 0.0;    // us
    double gammaP = 0.0;    // rad/us
    double gammaR = 0.0;
    double gammaRPrime = 0.0;
    double lambda = 1.0;
    double chi = 0.0;
    double tol = 1e-9;
    int sampleCount = 0;  // trace samples; 0 keeps only the summary

    void validate() const;
};

struct TransferResult {
    qdyn::Complex amplitude{1.0, 0.0};  // <R'_q|U|R_q>
    double maxIntermediatePopulation = 0.0;  // max_t of the expected |p> count
    int nu = 0;
    // Sampled traces when config.sampleCount > 0.
    std::vector<double> times;
    std::vector<double> popInitial;
    std::vector<double> popTarget;
    std::vector<double> popIntermediate;
};

// Propagates the nu_q transferred atoms (three levels each, dimension 3^nu)
// with both Raman pulses and the pairwise interactions B (rr), -lambda*B
// (r'r'), chi*B (rr' + r'r). Atoms outside the addressed independent set are
// inert spectators and contribute a factor of one.
TransferResult transferRun(const model::AtomArray& array, const std::vector<int>& q,
                           const StirapConfig& config);

struct TransferError {
    double error = 0.0;         // mean over inputs of 1 - |amplitude|^2
    double fidelityMean = 0.0;  // mean of |amplitude|^2, reported alongside
    double maxIntermediatePopulation = 0.0;
    std::vector<qdyn::Complex> amplitudes;  // by input index, q0 least significant
};

TransferError transferError(const model::AtomArray& array, const StirapConfig& config,
                            int workers = 1);

struct TransferScan {
    Eigen::VectorXd tauTrGrid;
    Eigen::VectorXd tauDelGrid;
    Eigen::MatrixXd error;  // (tauTr, tauDel); NaN where tauDel >= tauTr
    double bestError = 0.0;
    double bestTauTr = 0.0;
    double bestTauDel = 0.0;
};

// Error surface over absolute (tauTr, tauDel) grids plus its valid-region
// minimum. Grids need at least 8 points each.
TransferScan scanTransfer(const model::AtomArray& array, const StirapConfig& base,
                          const Eigen::VectorXd& tauTrGrid, const Eigen::VectorXd& tauDelGrid,
                          int workers = 1);

// Interaction phase picked up by the dark state during transfer, and the
// residual of the condition under which it cancels between protocol steps:
//   integral of [(1-chi) cos^2(theta) + chi]^2  minus
//   integral of (chi^2 + lambda) sin^4(theta).
struct PhaseCheck {
    double phiInt = 0.0;
    double residual = 0.0;
};

PhaseCheck dynamicalPhaseCheck(const StirapConfig& config, const pulses::StirapPair& pair,
                               double pairSum);

}  // namespace rydgate::stirap
