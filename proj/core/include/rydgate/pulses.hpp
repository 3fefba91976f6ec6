#pragma once

#include <functional>
#include <string>

#include "rydgate/common.hpp"

namespace rydgate::pulses {

enum class PulseKind { LinearSweep, GapAdapted, Mirror, Stirap };

// Drive schedule on [t0, t1]. omega is the Rabi envelope, delta the detuning,
// both in rad/us. Schedules are pure functions of their parameters.
struct PulseSchedule {
    PulseKind kind = PulseKind::LinearSweep;
    double t0 = 0.0;
    double t1 = 0.0;
    std::function<double(double)> omega;
    std::function<double(double)> delta;
    double omega0 = 0.0;
    double delta0 = 0.0;

    double duration() const { return t1 - t0; }
};

// Flat-top envelope with a linear detuning chirp:
//   Omega(t) = Omega0 [exp(-((t - tau/2)/sigma)^8) - eps] / (1 - eps),
//   sigma = 0.4 tau, eps chosen so the envelope vanishes exactly at t = 0, tau;
//   Delta(t) = (2 Delta0 / tau) (t - tau/2).
PulseSchedule flatTopLinear(double omega0, double delta0, double tau);

// Step-II drive on (tau, 2 tau]: Omega(t) = Omega(2 tau - t),
// Delta(t) = -Delta(2 tau - t).
PulseSchedule mirrorPulse(const PulseSchedule& stepI);

// First time the envelope reaches level*omega0 (bisection on the rising edge).
double firstReach(const PulseSchedule& schedule, double level);

// Detuning sweep that spends time where the spectral gap is small:
// on [dt, tau - dt] the sweep solves dDelta/dt = zeta * gap(Delta) with zeta
// normalized so Delta runs from -Delta0* to +Delta0*, Delta0* = beta(tau/2 - dt);
// the boundary segments are cubics with matching values and slopes and
// dDelta/dt = 0 at t = 0, tau. Throws NumericalError if the constructed sweep
// fails to increase strictly.
PulseSchedule gapAdaptedSweep(const std::function<double(double)>& gapProfile,
                              double omega0, double delta0, double tau, double dt);

// Counter-intuitive STIRAP pair: Omega_DP precedes Omega_SP, opposite signs,
// each a sin^2 bump of width tauTr - tauDel.
struct StirapPair {
    std::function<double(double)> omegaSP;
    std::function<double(double)> omegaDP;
    double tauTr = 0.0;
    double tauDel = 0.0;
    double omegaMax = 0.0;

    // Mixing angle: tan(theta) = |Omega_SP| / Omega_DP, runs 0 -> pi/2.
    double mixingAngle(double t) const;
};

StirapPair stirapPair(double omegaMax, double tauTr, double tauDel);

// Sampled "t,omega,delta" rows for plotting.
std::string scheduleCsv(const PulseSchedule& schedule, int samples);

}  // namespace rydgate::pulses
