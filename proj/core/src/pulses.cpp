#include "rydgate/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace rydgate::pulses {

namespace {

double pow8(double x) {
    const double x2 = x * x;
    const double x4 = x2 * x2;
    return x4 * x4;
}

// Cubic Hermite segment through (x0,y0,s0) and (x1,y1,s1).
double hermite(double x, double x0, double x1, double y0, double y1, double s0, double s1) {
    const double h = x1 - x0;
    const double u = (x - x0) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return y0 * (2 * u3 - 3 * u2 + 1) + s0 * h * (u3 - 2 * u2 + u) +
           y1 * (-2 * u3 + 3 * u2) + s1 * h * (u3 - u2);
}

}  // namespace

PulseSchedule flatTopLinear(double omega0, double delta0, double tau) {
    if (tau <= 0.0) throw ContractViolation("pulse duration must be positive");
    if (omega0 <= 0.0) throw ContractViolation("peak Rabi frequency must be positive");
    const double sigma = 0.4 * tau;
    const double eps = std::exp(-pow8(0.5 * tau / sigma));
    PulseSchedule p;
    p.kind = PulseKind::LinearSweep;
    p.t0 = 0.0;
    p.t1 = tau;
    p.omega0 = omega0;
    p.delta0 = delta0;
    p.omega = [omega0, tau, sigma, eps](double t) {
        if (t < 0.0 || t > tau) return 0.0;
        return omega0 * (std::exp(-pow8((t - 0.5 * tau) / sigma)) - eps) / (1.0 - eps);
    };
    p.delta = [delta0, tau](double t) { return 2.0 * delta0 / tau * (t - 0.5 * tau); };
    return p;
}

PulseSchedule mirrorPulse(const PulseSchedule& stepI) {
    const double tau = stepI.t1;
    PulseSchedule p;
    p.kind = PulseKind::Mirror;
    p.t0 = tau;
    p.t1 = 2.0 * tau;
    p.omega0 = stepI.omega0;
    p.delta0 = stepI.delta0;
    const auto om = stepI.omega;
    const auto de = stepI.delta;
    p.omega = [om, tau](double t) { return om(2.0 * tau - t); };
    p.delta = [de, tau](double t) { return -de(2.0 * tau - t); };
    return p;
}

double firstReach(const PulseSchedule& schedule, double level) {
    if (level <= 0.0 || level >= 1.0) throw ContractViolation("level must be in (0, 1)");
    const double target = level * schedule.omega0;
    double lo = schedule.t0;
    double hi = 0.5 * (schedule.t0 + schedule.t1);
    if (schedule.omega(hi) < target) throw ContractViolation("envelope never reaches level");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (schedule.omega(mid) < target ? lo : hi) = mid;
    }
    return hi;
}

PulseSchedule gapAdaptedSweep(const std::function<double(double)>& gapProfile,
                              double omega0, double delta0, double tau, double dt) {
    if (tau <= 0.0 || dt <= 0.0 || dt >= 0.5 * tau)
        throw ContractViolation("boundary time must satisfy 0 < dt < tau/2");
    const double beta = 2.0 * delta0 / tau;
    const double dStar = beta * (0.5 * tau - dt);

    // Cumulative time-versus-detuning quadrature for dDelta/dt = zeta*gap:
    // t(Delta) = dt + (1/zeta) Int dDelta'/gap, Simpson per subinterval.
    const int m = 4096;
    const double h = 2.0 * dStar / m;
    std::vector<double> cum(m + 1, 0.0);
    std::vector<double> gap(m + 1);
    for (int j = 0; j <= m; ++j) {
        gap[j] = gapProfile(-dStar + j * h);
        if (!(gap[j] > 0.0)) throw ContractViolation("gap profile must be positive");
    }
    for (int j = 0; j < m; ++j) {
        const double mid = gapProfile(-dStar + (j + 0.5) * h);
        if (!(mid > 0.0)) throw ContractViolation("gap profile must be positive");
        cum[j + 1] = cum[j] + h / 6.0 * (1.0 / gap[j] + 4.0 / mid + 1.0 / gap[j + 1]);
    }
    const double zeta = cum[m] / (tau - 2.0 * dt);

    // Node times of the interior sweep plus the exact slopes there.
    std::vector<double> tn(m + 1), dn(m + 1), sn(m + 1);
    for (int j = 0; j <= m; ++j) {
        tn[j] = dt + cum[j] / zeta;
        dn[j] = -dStar + j * h;
        sn[j] = zeta * gap[j];
    }
    const double sLo = sn.front();
    const double sHi = sn.back();

    auto interior = [tn, dn, sn](double t) {
        const auto it = std::upper_bound(tn.begin(), tn.end(), t);
        int j = static_cast<int>(it - tn.begin()) - 1;
        j = std::clamp(j, 0, static_cast<int>(tn.size()) - 2);
        return hermite(t, tn[j], tn[j + 1], dn[j], dn[j + 1], sn[j], sn[j + 1]);
    };

    PulseSchedule base = flatTopLinear(omega0, delta0, tau);
    PulseSchedule p;
    p.kind = PulseKind::GapAdapted;
    p.t0 = 0.0;
    p.t1 = tau;
    p.omega0 = omega0;
    p.delta0 = delta0;
    p.omega = base.omega;
    p.delta = [=](double t) {
        if (t <= dt) return hermite(t, 0.0, dt, -delta0, -dStar, 0.0, sLo);
        if (t >= tau - dt) return hermite(t, tau - dt, tau, dStar, delta0, sHi, 0.0);
        return interior(t);
    };

    double prev = p.delta(0.0);
    for (int j = 1; j <= 4096; ++j) {
        const double cur = p.delta(tau * j / 4096.0);
        if (cur <= prev)
            throw NumericalError("gap-adapted sweep is not strictly increasing");
        prev = cur;
    }
    return p;
}

double StirapPair::mixingAngle(double t) const {
    return std::atan2(std::abs(omegaSP(t)), omegaDP(t));
}

StirapPair stirapPair(double omegaMax, double tauTr, double tauDel) {
    if (!(tauDel > 0.0 && tauDel < tauTr))
        throw ContractViolation("delay must satisfy 0 < tauDel < tauTr");
    const double width = tauTr - tauDel;
    StirapPair pair;
    pair.tauTr = tauTr;
    pair.tauDel = tauDel;
    pair.omegaMax = omegaMax;
    pair.omegaDP = [omegaMax, width](double t) {
        if (t < 0.0 || t > width) return 0.0;
        const double s = std::sin(std::numbers::pi * t / width);
        return omegaMax * s * s;
    };
    pair.omegaSP = [omegaMax, width, tauDel, tauTr](double t) {
        if (t < tauDel || t > tauTr) return 0.0;
        const double s = std::sin(std::numbers::pi * (t - tauDel) / width);
        return -omegaMax * s * s;
    };
    return pair;
}

std::string scheduleCsv(const PulseSchedule& schedule, int samples) {
    if (samples < 2) throw ContractViolation("need at least two samples");
    std::ostringstream out;
    out.precision(17);
    out << "t,omega,delta\n";
    for (int i = 0; i < samples; ++i) {
        const double t = schedule.t0 + schedule.duration() * i / (samples - 1);
        out << t << ',' << schedule.omega(t) << ',' << schedule.delta(t) << '\n';
    }
    return out.str();
}

}  // namespace rydgate::pulses
