#include "rydgate/qdyn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rydgate::qdyn {

bool isHermitian(const ComplexMatrix& h, double relTol) {
    if (h.rows() != h.cols()) return false;
    double scale = std::max(h.cwiseAbs().maxCoeff(), 1.0);
    return (h - h.adjoint()).cwiseAbs().maxCoeff() <= relTol * scale;
}

EigenSystem eigh(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw ContractViolation("eigh: matrix must be square");
    if (!isHermitian(h)) throw ContractViolation("eigh: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigh: eigendecomposition did not converge");
    EigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
        Eigen::Index imax = 0;
        out.vectors.col(j).cwiseAbs().maxCoeff(&imax);
        Complex z = out.vectors(imax, j);
        double m = std::abs(z);
        if (m > 0) out.vectors.col(j) *= std::conj(z) / m;
    }
    return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Trajectory propagate(const StateVector& psi0, const Rhs& rhs, double t0, double t1,
                     double tol, const std::vector<double>& sampleTimes) {
    if (psi0.size() == 0) throw ContractViolation("propagate: empty state");
    if (!(t1 > t0)) throw ContractViolation("propagate: need t1 > t0");
    if (!(tol > 0)) throw ContractViolation("propagate: tolerance must be positive");
    for (size_t i = 0; i < sampleTimes.size(); ++i) {
        double s = sampleTimes[i];
        if (s < t0 || s > t1 || (i > 0 && s < sampleTimes[i - 1]))
            throw ContractViolation("propagate: sample times must be sorted within [t0, t1]");
    }

    const double span = t1 - t0;
    const double hMin = 1e-14 * span;
    const Eigen::Index n = psi0.size();

    StateVector y = psi0;
    StateVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);

    Trajectory traj;
    traj.times.reserve(sampleTimes.size());
    traj.states.reserve(sampleTimes.size());
    size_t nextSample = 0;
    double t = t0;
    auto recordSamplesAt = [&](double tc, const StateVector& yc) {
        while (nextSample < sampleTimes.size() && sampleTimes[nextSample] <= tc) {
            traj.times.push_back(sampleTimes[nextSample]);
            traj.states.push_back(yc);
            ++nextSample;
        }
    };
    recordSamplesAt(t0, y);  // samples exactly at t0

    rhs(t, y, k1);
    double h = std::min(span * 1e-3, span);
    bool lastClipped = false;

    while (t < t1) {
        bool clipped = false;
        double hTry = h;
        if (t + hTry >= t1) {
            hTry = t1 - t;
            clipped = true;
        } else if (nextSample < sampleTimes.size() && t + hTry > sampleTimes[nextSample]) {
            hTry = sampleTimes[nextSample] - t;
            clipped = true;
            if (hTry <= 0) {  // sample coincides with t
                recordSamplesAt(t, y);
                continue;
            }
        }

        ytmp = y + hTry * (a21 * k1);
        rhs(t + c2 * hTry, ytmp, k2);
        ytmp = y + hTry * (a31 * k1 + a32 * k2);
        rhs(t + c3 * hTry, ytmp, k3);
        ytmp = y + hTry * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * hTry, ytmp, k4);
        ytmp = y + hTry * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * hTry, ytmp, k5);
        ytmp = y + hTry * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + hTry, ytmp, k6);
        ynew = y + hTry * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + hTry, ynew, k7);
        yerr = hTry * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        // RMS error scaled by tol*(1 + |y_i|); accepted when below hTry/span,
        // i.e. error per unit time stays at tol/span.
        double errAcc = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
            double e = std::abs(yerr[i]) / sc;
            errAcc += e * e;
        }
        double err = std::sqrt(errAcc / static_cast<double>(n));
        double target = hTry / span;

        if (!std::isfinite(err)) {
            if (hTry <= hMin) throw DivergenceError("propagate: non-finite amplitudes");
            h = std::max(0.1 * hTry, hMin);
            ++traj.rejectedSteps;
            continue;
        }
        if (err > target) {
            if (hTry <= hMin)
                throw StiffProblemError("propagate: step size underflow at t=" + std::to_string(t));
            double fac = 0.9 * std::pow(target / err, 0.25);
            h = std::max(hTry * std::clamp(fac, 0.2, 1.0), hMin);
            ++traj.rejectedSteps;
            continue;
        }

        t += hTry;
        y.swap(ynew);
        k1.swap(k7);  // FSAL
        ++traj.acceptedSteps;
        recordSamplesAt(t, y);
        double fac = (err > 0) ? 0.9 * std::pow(target / err, 0.25) : 5.0;
        double hNext = hTry * std::clamp(fac, 0.2, 5.0);
        if (clipped && !lastClipped) hNext = std::max(h, hNext);  // keep pre-clip step memory
        h = hNext;
        lastClipped = clipped;
    }
    recordSamplesAt(t1, y);
    traj.finalState = std::move(y);
    return traj;
}

Trajectory propagate(const StateVector& psi0,
                     const std::function<ComplexMatrix(double)>& hamiltonian,
                     double t0, double t1, double tol,
                     const std::vector<double>& sampleTimes) {
    const Complex minusI(0.0, -1.0);
    Rhs rhs = [&hamiltonian, minusI](double t, const StateVector& psi, StateVector& dpsi) {
        dpsi.noalias() = minusI * (hamiltonian(t) * psi);
    };
    return propagate(psi0, rhs, t0, t1, tol, sampleTimes);
}

double wrapPhase(double phi) {
    constexpr double pi = std::numbers::pi;
    double w = std::remainder(phi, 2.0 * pi);
    if (w <= -pi) w += 2.0 * pi;
    return w;
}

double totalPhase(const StateVector& from, const StateVector& to) {
    if (from.size() != to.size()) throw ContractViolation("totalPhase: size mismatch");
    if (from.norm() == 0 || to.norm() == 0) throw ContractViolation("totalPhase: zero state");
    Complex ov = from.dot(to);
    if (std::abs(ov) < 1e-12)
        throw NumericalError("totalPhase: overlap magnitude below 1e-12, phase undefined");
    return std::arg(ov);
}

}  // namespace rydgate::qdyn
