#include "rydgate/stirap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rydgate/parallel.hpp"

namespace rydgate::stirap {

namespace {

using qdyn::Complex;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int powInt(int base, int exp) {
    int r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

std::string inputString(const std::vector<int>& q) {
    std::string s;
    for (int v : q) s += static_cast<char>('0' + v);
    return s;
}

// Level digits: 0 = |r>, 1 = |p>, 2 = |r'>.
struct TransferHamiltonian {
    int nu;
    int dim;
    std::vector<double> pairEnergy;  // static interaction per basis state
    std::vector<double> decayRate;   // summed decay rate per basis state
    std::vector<double> pCount;      // |p> occupations per basis state

    TransferHamiltonian(const model::AtomArray& array, const std::vector<int>& mis,
                        const StirapConfig& cfg)
        : nu(static_cast<int>(mis.size())), dim(powInt(3, nu)) {
        pairEnergy.assign(dim, 0.0);
        decayRate.assign(dim, 0.0);
        pCount.assign(dim, 0.0);
        for (int s = 0; s < dim; ++s) {
            int digits[12] = {};
            for (int i = 0, t = s; i < nu; ++i, t /= 3) digits[i] = t % 3;
            for (int i = 0; i < nu; ++i) {
                decayRate[s] += digits[i] == 0   ? cfg.gammaR
                                : digits[i] == 1 ? cfg.gammaP
                                                 : cfg.gammaRPrime;
                if (digits[i] == 1) pCount[s] += 1.0;
                for (int j = i + 1; j < nu; ++j) {
                    const double b = array.couplings(mis[i], mis[j]);
                    if (digits[i] == 0 && digits[j] == 0) pairEnergy[s] += b;
                    if (digits[i] == 2 && digits[j] == 2) pairEnergy[s] -= cfg.lambda * b;
                    if ((digits[i] == 0 && digits[j] == 2) ||
                        (digits[i] == 2 && digits[j] == 0))
                        pairEnergy[s] += cfg.chi * b;
                }
            }
        }
    }

    // out = -i H psi. omegaSP couples r-p, omegaDP couples p-r' on each atom.
    void apply(double omegaSP, double omegaDP, const qdyn::StateVector& psi,
               qdyn::StateVector& out) const {
        const Complex mi(0.0, -1.0);
        for (int s = 0; s < dim; ++s)
            out[s] = mi * Complex(pairEnergy[s], -0.5 * decayRate[s]) * psi[s];
        int stride = 1;
        for (int i = 0; i < nu; ++i, stride *= 3) {
            for (int s = 0; s < dim; ++s) {
                const int digit = (s / stride) % 3;
                if (digit == 0)
                    out[s] += mi * 0.5 * omegaSP * psi[s + stride];
                else if (digit == 1)
                    out[s] += mi * (0.5 * omegaSP * psi[s - stride] +
                                    0.5 * omegaDP * psi[s + stride]);
                else
                    out[s] += mi * 0.5 * omegaDP * psi[s - stride];
            }
        }
    }
};

}  // namespace

void StirapConfig::validate() const {
    if (omegaMax <= 0.0) throw ContractViolation("peak Rabi frequency must be positive");
    if (!(tauDel > 0.0 && tauDel < tauTr))
        throw ContractViolation("pulse delay must satisfy 0 < tauDel < tauTr");
    if (lambda <= 0.0) throw ContractViolation("interaction ratio lambda must be positive");
    if (std::abs(chi) > 1.0) throw ContractViolation("cross-coupling ratio |chi| must be <= 1");
    if (gammaP < 0.0 || gammaR < 0.0 || gammaRPrime < 0.0)
        throw ContractViolation("decay rates must be non-negative");
    if (tol <= 0.0) throw ContractViolation("tolerance must be positive");
}

TransferResult transferRun(const model::AtomArray& array, const std::vector<int>& q,
                           const StirapConfig& config) {
    config.validate();
    if (static_cast<int>(q.size()) != array.k + 1)
        throw ContractViolation("input pattern length must be k+1");

    TransferResult res;
    res.nu = model::misExcitations(array, q);
    if (res.nu == 0) return res;  // nothing to transfer

    const auto mis = model::canonicalMis(array, q);
    const TransferHamiltonian ham(array, mis, config);
    const auto pair = pulses::stirapPair(config.omegaMax, config.tauTr, config.tauDel);

    const int internal = 2001;
    const int keep = config.sampleCount;
    std::vector<double> sampleTimes(internal);
    for (int i = 0; i < internal; ++i)
        sampleTimes[i] = config.tauTr * i / (internal - 1);

    qdyn::StateVector psi = qdyn::StateVector::Zero(ham.dim);
    psi[0] = 1.0;
    qdyn::Trajectory traj;
    try {
        traj = qdyn::propagate(
            psi,
            [&](double t, const qdyn::StateVector& y, qdyn::StateVector& out) {
                ham.apply(pair.omegaSP(t), pair.omegaDP(t), y, out);
            },
            0.0, config.tauTr, config.tol, sampleTimes);
    } catch (const StiffProblemError& e) {
        throw StiffProblemError(std::string(e.what()) + " (input " + inputString(q) + ")");
    } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(e.what()) + " (input " + inputString(q) + ")");
    }

    const int target = ham.dim - 1;  // every digit at |r'>
    res.amplitude = traj.finalState[target];
    for (int i = 0; i < internal; ++i) {
        const auto& y = traj.states[i];
        double p = 0.0;
        for (int s = 0; s < ham.dim; ++s) p += ham.pCount[s] * std::norm(y[s]);
        res.maxIntermediatePopulation = std::max(res.maxIntermediatePopulation, p);
        if (keep > 1 && (i % ((internal - 1) / (keep - 1)) == 0 || i == internal - 1)) {
            res.times.push_back(sampleTimes[i]);
            res.popInitial.push_back(std::norm(y[0]));
            res.popTarget.push_back(std::norm(y[target]));
            res.popIntermediate.push_back(p);
        }
    }
    return res;
}

TransferError transferError(const model::AtomArray& array, const StirapConfig& config,
                            int workers) {
    config.validate();
    const int count = 1 << (array.k + 1);
    TransferError err;
    err.amplitudes.resize(count);
    std::vector<double> maxP(count, 0.0);
    parallelFor(count, workers, [&](int idx) {
        std::vector<int> q(array.k + 1);
        for (int i = 0; i <= array.k; ++i) q[i] = (idx >> i) & 1;
        auto cfg = config;
        cfg.sampleCount = 0;
        const auto res = transferRun(array, q, cfg);
        err.amplitudes[idx] = res.amplitude;
        maxP[idx] = res.maxIntermediatePopulation;
    });
    for (int idx = 0; idx < count; ++idx) {
        err.error += 1.0 - std::norm(err.amplitudes[idx]);
        err.fidelityMean += std::norm(err.amplitudes[idx]);
        err.maxIntermediatePopulation = std::max(err.maxIntermediatePopulation, maxP[idx]);
    }
    err.error /= count;
    err.fidelityMean /= count;
    return err;
}

TransferScan scanTransfer(const model::AtomArray& array, const StirapConfig& base,
                          const Eigen::VectorXd& tauTrGrid, const Eigen::VectorXd& tauDelGrid,
                          int workers) {
    if (tauTrGrid.size() < 8 || tauDelGrid.size() < 8)
        throw ContractViolation("transfer scan grids need at least 8 points each");
    TransferScan scan;
    scan.tauTrGrid = tauTrGrid;
    scan.tauDelGrid = tauDelGrid;
    scan.error.setConstant(tauTrGrid.size(), tauDelGrid.size(), kNaN);
    scan.bestError = kNaN;
    for (int i = 0; i < tauTrGrid.size(); ++i) {
        for (int j = 0; j < tauDelGrid.size(); ++j) {
            if (!(tauDelGrid[j] > 0.0 && tauDelGrid[j] < tauTrGrid[i])) continue;
            auto cfg = base;
            cfg.tauTr = tauTrGrid[i];
            cfg.tauDel = tauDelGrid[j];
            const double e = transferError(array, cfg, workers).error;
            scan.error(i, j) = e;
            if (std::isnan(scan.bestError) || e < scan.bestError) {
                scan.bestError = e;
                scan.bestTauTr = tauTrGrid[i];
                scan.bestTauDel = tauDelGrid[j];
            }
        }
    }
    if (std::isnan(scan.bestError))
        throw ContractViolation("no grid point satisfies 0 < tauDel < tauTr");
    return scan;
}

PhaseCheck dynamicalPhaseCheck(const StirapConfig& config, const pulses::StirapPair& pair,
                               double pairSum) {
    config.validate();
    const int n = 4096;  // Simpson subintervals
    const double h = config.tauTr / n;
    double phi = 0.0, lhs = 0.0, rhs = 0.0;
    auto add = [&](double t, double w) {
        const double th = pair.mixingAngle(t);
        const double c2 = std::cos(th) * std::cos(th);
        const double s2 = std::sin(th) * std::sin(th);
        phi += w * (c2 * c2 - config.lambda * s2 * s2 + 2.0 * config.chi * c2 * s2);
        const double l = (1.0 - config.chi) * c2 + config.chi;
        lhs += w * l * l;
        rhs += w * (config.chi * config.chi + config.lambda) * s2 * s2;
    };
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        add(h * i, w * h / 3.0);
    }
    PhaseCheck out;
    out.phiInt = pairSum * phi;
    out.residual = lhs - rhs;
    return out;
}

}  // namespace rydgate::stirap
