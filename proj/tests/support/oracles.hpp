#pragma once

// Slow, independent re-implementations used to pin the fast library code:
// a cyclic Jacobi eigensolver (via the real-symmetric embedding), a fixed-step
// matrix-exponential propagator, Simpson quadrature, and a brute-force
// independent-set search. Everything here trades speed for obviousness.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "rydgate/model.hpp"
#include "rydgate/qdyn.hpp"

namespace oracles {

// Eigenvalues of a Hermitian matrix by classical Jacobi sweeps on the
// real-symmetric embedding [[Re, -Im], [Im, Re]]; each eigenvalue of H shows
// up twice, so every second entry of the sorted diagonal is returned.
inline Eigen::VectorXd jacobiEigenvalues(const Eigen::MatrixXcd& h) {
    const int n = static_cast<int>(h.rows());
    Eigen::MatrixXd m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = h.real();
    m.bottomRightCorner(n, n) = h.real();
    m.topRightCorner(n, n) = -h.imag();
    m.bottomLeftCorner(n, n) = h.imag();

    const int dim = 2 * n;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < dim; ++p) {
            for (int q = p + 1; q < dim; ++q) off += m(p, q) * m(p, q);
        }
        if (std::sqrt(off) < 1e-15 * scale * dim) break;
        for (int p = 0; p < dim; ++p) {
            for (int q = p + 1; q < dim; ++q) {
                if (std::abs(m(p, q)) < 1e-18 * scale) continue;
                const double theta = 0.5 * (m(q, q) - m(p, p)) / m(p, q);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < dim; ++i) {
                    const double mip = m(i, p);
                    const double miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (int i = 0; i < dim; ++i) {
                    const double mpi = m(p, i);
                    const double mqi = m(q, i);
                    m(p, i) = c * mpi - s * mqi;
                    m(q, i) = s * mpi + c * mqi;
                }
            }
        }
    }
    std::vector<double> diag(dim);
    for (int i = 0; i < dim; ++i) diag[i] = m(i, i);
    std::sort(diag.begin(), diag.end());
    Eigen::VectorXd values(n);
    for (int i = 0; i < n; ++i) values(i) = diag[2 * i];
    return values;
}

// Fixed-slice propagator: U = prod exp(-i H(t_mid) dt), midpoint sampling.
// Works for non-Hermitian effective Hamiltonians too (Pade exponential).
inline rydgate::qdyn::StateVector slicePropagate(
    const std::function<Eigen::MatrixXcd(double)>& hamiltonianAt,
    const rydgate::qdyn::StateVector& psi0, double t0, double t1, int slices) {
    rydgate::qdyn::StateVector psi = psi0;
    const double dt = (t1 - t0) / slices;
    const std::complex<double> mi(0.0, -1.0);
    for (int s = 0; s < slices; ++s) {
        const double tm = t0 + (s + 0.5) * dt;
        const Eigen::MatrixXcd u = (mi * dt * hamiltonianAt(tm)).exp();
        psi = (u * psi).eval();
    }
    return psi;
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Largest subset of the active atoms with no pair coupled within a factor two
// of the array's strongest coupling; checks the closed-form MIS count.
inline int bruteForceMisSize(const rydgate::model::AtomArray& array,
                             const rydgate::model::BasisMap& basis) {
    const int n = static_cast<int>(basis.activeAtoms.size());
    const double threshold = 0.5 * array.couplings.maxCoeff();
    int best = 0;
    for (int mask = 0; mask < (1 << n); ++mask) {
        bool ok = true;
        for (int a = 0; a < n && ok; ++a) {
            if (!(mask & (1 << a))) continue;
            for (int b = a + 1; b < n && ok; ++b) {
                if (!(mask & (1 << b))) continue;
                if (array.couplings(basis.activeAtoms[a], basis.activeAtoms[b]) >= threshold) {
                    ok = false;
                }
            }
        }
        if (ok) best = std::max(best, __builtin_popcount(static_cast<unsigned>(mask)));
    }
    return best;
}

}  // namespace oracles
