#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "rydgate/common.hpp"

namespace rydgate::qdyn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

// Eigenvalue gaps below kDegeneracyTol * max|h_ij| are treated as degenerate;
// within such blocks the solver's ordering is kept as-is.
inline constexpr double kDegeneracyTol = 1e-9;

bool isHermitian(const ComplexMatrix& h, double relTol = 1e-12);

struct EigenSystem {
    Eigen::VectorXd values;    // ascending
    ComplexMatrix vectors;     // columns, orthonormal
};

// Dense Hermitian eigendecomposition with a fixed gauge: each eigenvector is
// rotated so its largest-magnitude component is real and positive.
EigenSystem eigh(const ComplexMatrix& h);

// dpsi = -i H(t) psi, written into the preallocated output argument.
using Rhs = std::function<void(double t, const StateVector& psi, StateVector& dpsi)>;

struct Trajectory {
    std::vector<double> times;        // requested sample times, in order
    std::vector<StateVector> states;  // state at each sample time
    StateVector finalState;
    long acceptedSteps = 0;
    long rejectedSteps = 0;
};

// Adaptive embedded Dormand-Prince 5(4) pair. The controller keeps the local
// error per unit time at tol/(t1-t0), so the accumulated error over the whole
// span stays near tol and the norm of Hermitian evolutions is conserved to a
// few times tol.
Trajectory propagate(const StateVector& psi0, const Rhs& rhs, double t0, double t1,
                     double tol, const std::vector<double>& sampleTimes = {});

// Convenience overload for a dense time-dependent Hamiltonian.
Trajectory propagate(const StateVector& psi0,
                     const std::function<ComplexMatrix(double)>& hamiltonian,
                     double t0, double t1, double tol,
                     const std::vector<double>& sampleTimes = {});

// Wraps into (-pi, pi].
double wrapPhase(double phi);

// arg<from|to>; throws when the overlap magnitude is below 1e-12.
double totalPhase(const StateVector& from, const StateVector& to);

}  // namespace rydgate::qdyn
