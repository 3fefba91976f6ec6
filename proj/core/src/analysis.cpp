#include "rydgate/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "rydgate/parallel.hpp"
#include "rydgate/qdyn.hpp"
#include "rydgate/units.hpp"

namespace rydgate::analysis {

namespace {

using qdyn::Complex;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Inverse of a monotone schedule component by bisection.
double timeAtDelta(const pulses::PulseSchedule& schedule, double delta) {
    double lo = schedule.t0, hi = schedule.t1;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * (schedule.t1 - schedule.t0); ++i) {
        const double mid = 0.5 * (lo + hi);
        (schedule.delta(mid) < delta ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

int findCenter(const model::AtomArray& array) {
    for (int a = 0; a < array.atomCount(); ++a)
        if (array.roles[a] == model::AtomRole::Center) return a;
    throw ContractViolation("array has no center atom");
}

// Outer atoms in ring order, and validation that the couplings are invariant
// under the ring rotation.
std::vector<int> ringOrder(const model::AtomArray& array) {
    if (!array.isStar())
        throw ContractViolation("symmetry classification requires a star array");
    const int k = array.k;
    std::vector<int> ring(k, -1);
    for (int a = 0; a < array.atomCount(); ++a)
        if (array.roles[a] == model::AtomRole::Outer) ring.at(array.branchOf[a]) = a;
    const int c = findCenter(array);
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::abs(y); };
    for (int b = 0; b < k; ++b) {
        if (!close(array.couplings(c, ring[b]), array.couplings(c, ring[0])))
            throw ContractViolation("center couplings break the ring symmetry");
        for (int d = 1; d < k; ++d)
            if (!close(array.couplings(ring[b], ring[(b + d) % k]),
                       array.couplings(ring[0], ring[d])))
                throw ContractViolation("outer couplings break the ring symmetry");
    }
    return ring;
}

std::vector<std::uint32_t> allowedStates(const model::AtomArray& array,
                                         const model::BasisMap& basis) {
    const auto strong = model::strongPairMasks(array, basis);
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(basis.dim()); ++s) {
        bool ok = true;
        for (auto m : strong)
            if ((s & m) == m) ok = false;
        if (ok) out.push_back(s);
    }
    return out;
}

}  // namespace

SpectrumScan spectrumScan(const model::AtomArray& array, const model::BasisMap& basis,
                          const pulses::PulseSchedule& schedule, int bSign, int gridSize) {
    if (gridSize < 64) throw ContractViolation("spectrum grid needs at least 64 points");
    if (bSign != 1 && bSign != -1) throw ContractViolation("bSign must be +1 or -1");

    const double omega0 = schedule.omega0;
    const double delta0 = schedule.delta0;
    const double span = schedule.duration();
    const int dim = basis.dim();
    const int nActive = static_cast<int>(basis.activeAtoms.size());

    SpectrumScan scan;
    scan.deltas = Eigen::VectorXd::LinSpaced(gridSize, -delta0, delta0);
    scan.energies.resize(gridSize, dim);
    scan.eta.setZero(gridSize, dim);

    Eigen::MatrixXcd prevVecs;
    std::vector<int> colOf(dim);
    bool ambiguous = false, nearDegenerate = false;

    for (int g = 0; g < gridSize; ++g) {
        const double delta = scan.deltas[g];
        const auto h = model::assembleHamiltonian(array, basis, omega0, delta, bSign);
        const auto sys = qdyn::eigh(h);

        if (g == 0) {
            for (int l = 0; l < dim; ++l) colOf[l] = l;
            int best = 0;
            for (int l = 1; l < dim; ++l)
                if (std::norm(sys.vectors(0, l)) > std::norm(sys.vectors(0, best))) best = l;
            scan.followedLabel = best;
        } else {
            // Max-overlap continuation; the greedy assignment over the full
            // overlap matrix is a permutation by construction.
            Eigen::MatrixXd ov = (prevVecs.adjoint() * sys.vectors).cwiseAbs2();
            std::vector<int> newCol(dim, -1);
            std::vector<bool> colUsed(dim, false), rowDone(dim, false);
            for (int pick = 0; pick < dim; ++pick) {
                int bl = -1, bc = -1;
                double bo = -1.0;
                for (int l = 0; l < dim; ++l) {
                    if (rowDone[l]) continue;
                    for (int cI = 0; cI < dim; ++cI) {
                        if (colUsed[cI]) continue;
                        if (ov(colOf[l], cI) > bo) bo = ov(colOf[l], cI), bl = l, bc = cI;
                    }
                }
                rowDone[bl] = true;
                colUsed[bc] = true;
                newCol[bl] = bc;
                if (bo < 0.5 && !ambiguous) {
                    ambiguous = true;
                    scan.warnings.push_back("state tracking ambiguous near Delta = " +
                                            fmt(delta) + " rad/us");
                }
            }
            colOf = newCol;
        }
        prevVecs = sys.vectors;

        for (int l = 0; l < dim; ++l) scan.energies(g, l) = sys.values[colOf[l]];

        // Non-adiabatic coupling out of the followed state, using the ramp
        // rates of the schedule at the moment the sweep crosses this delta.
        const double t = timeAtDelta(schedule, delta);
        const double hstep = 1e-7 * span;
        const double tm = std::max(schedule.t0, t - hstep);
        const double tp = std::min(schedule.t1, t + hstep);
        const double dDelta = (schedule.delta(tp) - schedule.delta(tm)) / (tp - tm);
        const double dOmega = (schedule.omega(tp) - schedule.omega(tm)) / (tp - tm);

        const auto& vf = sys.vectors.col(colOf[scan.followedLabel]);
        Eigen::VectorXcd w = Eigen::VectorXcd::Zero(dim);
        for (int s = 0; s < dim; ++s) {
            w[s] = -dDelta * std::popcount(static_cast<std::uint32_t>(s)) * vf[s];
            for (int a = 0; a < nActive; ++a) w[s] += 0.5 * dOmega * vf[s ^ (1 << a)];
        }
        const double ef = sys.values[colOf[scan.followedLabel]];
        const double scale = sys.values.cwiseAbs().maxCoeff();
        for (int l = 0; l < dim; ++l) {
            if (l == scan.followedLabel) continue;
            const double gap = ef - scan.energies(g, l);
            const Complex me = sys.vectors.col(colOf[l]).dot(w);
            if (std::abs(gap) < qdyn::kDegeneracyTol * scale) {
                if (std::abs(me) > 1e-9 * scale && !nearDegenerate) {
                    nearDegenerate = true;
                    scan.warnings.push_back(
                        "coupled states degenerate with the followed one near Delta = " +
                        fmt(delta) + " rad/us");
                }
                continue;
            }
            scan.eta(g, l) = std::norm(me / gap) * span / delta0;
        }
    }
    return scan;
}

std::vector<SymmetrySector> classifySymmetry(const model::AtomArray& array,
                                             const model::BasisMap& basis) {
    const int n = array.atomCount();
    if (static_cast<int>(basis.activeAtoms.size()) != n)
        throw ContractViolation("symmetry classification needs every atom active");
    const int k = array.k;
    const auto ring = ringOrder(array);
    const int c = findCenter(array);

    auto bitPermFor = [&](const std::vector<int>& atomImage) {
        std::vector<int> perm(n);
        for (int a = 0; a < n; ++a)
            perm[basis.activeIndexOf(a)] = basis.activeIndexOf(atomImage[a]);
        return perm;
    };
    std::vector<int> rotAtom(n), reflAtom(n);
    rotAtom[c] = c;
    reflAtom[c] = c;
    for (int b = 0; b < k; ++b) {
        rotAtom[ring[b]] = ring[(b + 1) % k];
        reflAtom[ring[b]] = ring[(k - b) % k];
    }
    const auto rotBit = bitPermFor(rotAtom);
    const auto reflBit = bitPermFor(reflAtom);
    auto applyPerm = [&](const std::vector<int>& perm, std::uint32_t s) {
        std::uint32_t out = 0;
        for (int i = 0; i < n; ++i)
            if (s >> i & 1) out |= 1u << perm[i];
        return out;
    };

    const auto allowed = allowedStates(array, basis);
    std::vector<bool> seen(basis.dim(), false);

    struct Build {
        std::vector<Eigen::VectorXcd> vectors;
        std::vector<std::uint32_t> members;
    };
    std::vector<Build> build(k);

    for (auto s : allowed) {
        if (seen[s]) continue;
        std::vector<std::uint32_t> orbit{s};
        for (std::uint32_t t = applyPerm(rotBit, s); t != s; t = applyPerm(rotBit, t))
            orbit.push_back(t);
        for (auto t : orbit) seen[t] = true;
        const int m = static_cast<int>(orbit.size());
        // A period-m orbit carries the momenta that are multiples of k/m;
        // orbits are disjoint, so each sector sees these states once.
        for (int l = 0; l < m; ++l) {
            const int idx = l * (k / m);
            const double p = 2.0 * std::numbers::pi * idx / k;
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dim());
            for (int j = 0; j < m; ++j)
                v[orbit[j]] = std::exp(Complex(0.0, -p * j)) / std::sqrt(double(m));
            build[idx].vectors.push_back(std::move(v));
            build[idx].members.insert(build[idx].members.end(), orbit.begin(), orbit.end());
        }
    }

    std::vector<SymmetrySector> sectors;
    int total = 0;
    for (int idx = 0; idx < k; ++idx) {
        if (build[idx].vectors.empty()) continue;
        SymmetrySector sec;
        sec.momentumIndex = idx;
        sec.momentum = 2.0 * std::numbers::pi * idx / k;
        const int m = static_cast<int>(build[idx].vectors.size());
        sec.vectors.resize(basis.dim(), m);
        for (int j = 0; j < m; ++j) sec.vectors.col(j) = build[idx].vectors[j];
        sec.memberStates = build[idx].members;
        std::sort(sec.memberStates.begin(), sec.memberStates.end());

        if (idx == 0 || 2 * idx == k) {
            // Reflection through outer atom 1 maps the sector onto itself;
            // rotate the basis into its +/-1 eigenvectors.
            Eigen::MatrixXcd rsub(m, m);
            for (int a = 0; a < m; ++a) {
                Eigen::VectorXcd rv = Eigen::VectorXcd::Zero(basis.dim());
                for (auto s : sec.memberStates)
                    rv[applyPerm(reflBit, s)] = sec.vectors(s, a);
                for (int b = 0; b < m; ++b) rsub(b, a) = sec.vectors.col(b).dot(rv);
            }
            const auto sys = qdyn::eigh(rsub);
            sec.vectors = sec.vectors * sys.vectors;
            for (int a = 0; a < m; ++a)
                sec.reflectionEigenvalues.push_back(sys.values[a] > 0 ? 1 : -1);
        }
        total += m;
        sectors.push_back(std::move(sec));
    }
    if (total != static_cast<int>(allowed.size()))
        throw NumericalError("symmetry sectors do not span the blockade-allowed basis");
    return sectors;
}

DarkReport darkReport(const model::AtomArray& array, const std::vector<SymmetrySector>& sectors,
                      double omega0, double delta) {
    const auto basis = model::basisForInput(array, std::vector<int>(array.k + 1, 1));
    const auto h = model::assembleHamiltonian(array, basis, omega0, delta, 1.0);
    DarkReport rep;
    for (const auto& sec : sectors) {
        rep.allowedDim += static_cast<int>(sec.vectors.cols());
        if (sec.momentumIndex == 0) continue;
        Eigen::MatrixXcd hsub = sec.vectors.adjoint() * h * sec.vectors;
        const auto sys = qdyn::eigh(hsub);
        for (int j = 0; j < sys.values.size(); ++j) rep.darkEnergies.push_back(sys.values[j]);
    }
    rep.darkCount = static_cast<int>(rep.darkEnergies.size());
    std::sort(rep.darkEnergies.begin(), rep.darkEnergies.end());
    double scale = 1.0;
    for (double e : rep.darkEnergies) scale = std::max(scale, std::abs(e));
    for (std::size_t i = 0; i < rep.darkEnergies.size();) {
        if (i + 1 < rep.darkEnergies.size() &&
            rep.darkEnergies[i + 1] - rep.darkEnergies[i] < 1e-9 * scale) {
            ++rep.degeneratePairs;
            i += 2;
        } else {
            ++rep.singletons;
            ++i;
        }
    }
    return rep;
}

double GapProfile::operator()(double delta) const {
    const int n = static_cast<int>(deltas.size());
    if (delta <= deltas[0]) return gaps[0];
    if (delta >= deltas[n - 1]) return gaps[n - 1];
    const double* begin = deltas.data();
    const int j = static_cast<int>(std::upper_bound(begin, begin + n, delta) - begin) - 1;
    const double f = (delta - deltas[j]) / (deltas[j + 1] - deltas[j]);
    return gaps[j] + f * (gaps[j + 1] - gaps[j]);
}

GapProfile gapProfile(const model::AtomArray& array, double omega0, double delta0,
                      int gridSize) {
    if (gridSize < 64) throw ContractViolation("gap profile grid needs at least 64 points");
    const auto basis = model::basisForInput(array, std::vector<int>(array.k + 1, 1));
    const auto sectors = classifySymmetry(array, basis);
    const SymmetrySector* p0 = nullptr;
    for (const auto& sec : sectors)
        if (sec.momentumIndex == 0) p0 = &sec;
    if (!p0 || p0->vectors.cols() < 2)
        throw ContractViolation("p = 0 sector too small for a gap profile");

    GapProfile prof;
    prof.deltas = Eigen::VectorXd::LinSpaced(gridSize, -delta0, delta0);
    prof.gaps.resize(gridSize);
    for (int g = 0; g < gridSize; ++g) {
        const auto h = model::assembleHamiltonian(array, basis, omega0, prof.deltas[g], 1.0);
        Eigen::MatrixXcd hsub = p0->vectors.adjoint() * h * p0->vectors;
        const auto sys = qdyn::eigh(hsub);
        prof.gaps[g] = sys.values[1] - sys.values[0];
    }
    return prof;
}

DecayError decayError(double tau, double gamma, double nuBar) {
    if (tau < 0.0 || gamma < 0.0 || nuBar < 0.0)
        throw ContractViolation("decay error arguments must be non-negative");
    DecayError e;
    e.linear = 2.0 * nuBar * gamma * tau;
    e.exact = -std::expm1(-e.linear);
    return e;
}

MeanExcitation meanExcitation(const protocol::GateRun& run) {
    if (run.inputs.empty()) throw ContractViolation("empty run");
    if (run.delta0 <= 0.0) throw ContractViolation("run lacks the sweep amplitude");
    MeanExcitation m;
    double mf = 0.0;
    for (const auto& rec : run.inputs) {
        m.nuMid += rec.nuAtTau;
        m.nuBar += rec.nuBar;
        const auto mis = model::canonicalMis(run.array, rec.q);
        for (int i : mis) {
            double bi = 0.0;
            for (int j : mis)
                if (j != i) bi += run.array.couplings(i, j);
            mf += std::max(0.0, 0.5 - bi / (4.0 * run.delta0));
        }
    }
    const double d = static_cast<double>(run.inputs.size());
    m.nuMid /= d;
    m.nuBar /= d;
    m.nuBarMeanField = mf / d;
    return m;
}

LeakageFit leakageFit(const std::vector<std::pair<double, double>>& errorSamples, int k,
                      double delta0, double omega0) {
    if (errorSamples.size() < 6)
        throw ContractViolation("leakage fit needs at least 6 duration samples");
    LeakageFit fit;
    std::vector<std::pair<double, double>> used;
    for (const auto& [tau, e] : errorSamples)
        if (e >= 1e-6 && e <= 1e-1) used.push_back({tau, e});
    fit.usedSamples = static_cast<int>(used.size());
    if (fit.usedSamples < 3)
        throw NumericalError("too few samples inside the exponential window [1e-6, 1e-1]");
    std::sort(used.begin(), used.end());
    double emin = used[0].second, emax = used[0].second;
    for (std::size_t i = 1; i < used.size(); ++i) {
        emin = std::min(emin, used[i].second);
        emax = std::max(emax, used[i].second);
        if (used[i].second > used[i - 1].second) {
            fit.warnings.push_back("error samples are not monotone in duration");
            break;
        }
    }
    if (emax < 10.0 * emin)
        fit.warnings.push_back("samples span less than a decade of error");

    const double w = omega0 * omega0 / delta0;
    const double pref = 4.0 / static_cast<double>(1 << (k + 1));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [tau, e] : used) {
        const double x = w * tau;
        const double y = std::log(e / pref);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nUsed = static_cast<double>(used.size());
    const double det = nUsed * sxx - sx * sx;
    const double slope = (nUsed * sxy - sx * sy) / det;
    const double icpt = (sy * sxx - sx * sxy) / det;
    fit.c = -slope;
    fit.mu = std::exp(icpt);
    double rss = 0.0;
    for (const auto& [tau, e] : used) {
        const double r = std::log(e / pref) - (icpt + slope * w * tau);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / nUsed);
    return fit;
}

double landauZenerEstimate(double deltaE, double delta0, double tau) {
    if (deltaE <= 0.0) throw ContractViolation("gap must be positive");
    return std::exp(-2.0 * std::numbers::pi * 0.25 * deltaE * deltaE /
                    (2.0 * delta0 / tau));
}

OptimalDuration optimalDuration(int k, double mu, double c, double nuBar, double gamma,
                                double delta0, double omegaZero) {
    if (gamma <= 0.0) throw ContractViolation("decay rate must be positive");
    const double w = omegaZero * omegaZero / delta0;
    const double logArg = mu * c * omegaZero * omegaZero /
                          (static_cast<double>(1 << k) * nuBar * gamma * delta0);
    if (logArg <= 1.0)
        throw NumericalError("decay dominates at every duration (log argument <= 1)");
    OptimalDuration opt;
    opt.tauOpt = delta0 / (c * omegaZero * omegaZero) * std::log(logArg);
    opt.eMin = 2.0 * nuBar * gamma * (opt.tauOpt + delta0 / (c * omegaZero * omegaZero));

    const double a = mu * 4.0 / static_cast<double>(1 << (k + 1));
    auto curve = [&](double tau) { return 2.0 * nuBar * gamma * tau + a * std::exp(-c * w * tau); };
    // The curve is strictly convex, so a ternary search converges.
    double lo = opt.tauOpt / 8.0, hi = opt.tauOpt * 8.0;
    for (int i = 0; i < 200; ++i) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (curve(m1) < curve(m2))
            hi = m2;
        else
            lo = m1;
    }
    opt.tauNumeric = 0.5 * (lo + hi);
    opt.eNumeric = curve(opt.tauNumeric);
    return opt;
}

ThermalResult thermalMonteCarlo(const model::AtomArray& array,
                                const pulses::PulseSchedule& stepI,
                                const protocol::GateOptions& options, double temperatureUK,
                                int sampleCount, std::uint64_t seed) {
    if (sampleCount < 2) throw ContractViolation("need at least two Monte Carlo samples");
    if (temperatureUK < 0.0) throw ContractViolation("temperature must be non-negative");

    const int n = array.atomCount();
    const double u = units::thermalSpeed(temperatureUK * 1e-6);
    const double sigma = u / std::numbers::sqrt2;

    using Vel = Eigen::Matrix<double, Eigen::Dynamic, 3>;
    std::vector<Vel> velocities(sampleCount);
    for (int m = 0; m < sampleCount; ++m) {
        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL *
                                    (static_cast<std::uint64_t>(m) + 1)));
        auto uniform = [&rng] {
            return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
        };
        Vel v(n, 3);
        for (int a = 0; a < n; ++a) {
            // Two Box-Muller pairs per atom; the fourth deviate is discarded.
            double z[4];
            for (int p = 0; p < 2; ++p) {
                const double r = std::sqrt(-2.0 * std::log(uniform()));
                const double phi = 2.0 * std::numbers::pi * uniform();
                z[2 * p] = r * std::cos(phi);
                z[2 * p + 1] = r * std::sin(phi);
            }
            for (int cI = 0; cI < 3; ++cI) v(a, cI) = sigma * z[cI];
        }
        velocities[m] = std::move(v);
    }

    auto errorFor = [&](const Vel& v) {
        protocol::CouplingFn coupling = [&array, v](int a, int b, double t) {
            const double dx = array.positions(a, 0) - array.positions(b, 0) +
                              (v(a, 0) - v(b, 0)) * t;
            const double dy = array.positions(a, 1) - array.positions(b, 1) +
                              (v(a, 1) - v(b, 1)) * t;
            const double dz = (v(a, 2) - v(b, 2)) * t;
            const double r2 = dx * dx + dy * dy + dz * dz;
            return array.c6 / (r2 * r2 * r2);
        };
        auto opts = options;
        opts.recordTraces = false;
        opts.workers = 1;
        const auto run = protocol::runGate(array, stepI, opts, coupling);
        return protocol::averageFidelity(run, protocol::FidelityTarget::ParityDiagonal).error;
    };

    ThermalResult res;
    res.baseline = errorFor(Vel::Zero(n, 3));
    res.samples.resize(sampleCount);
    parallelFor(sampleCount, options.workers,
                [&](int m) { res.samples[m] = errorFor(velocities[m]) - res.baseline; });

    for (double s : res.samples) res.mean += s;
    res.mean /= sampleCount;
    double var = 0.0;
    for (double s : res.samples) var += (s - res.mean) * (s - res.mean);
    res.stddev = std::sqrt(var / (sampleCount - 1));
    return res;
}

}  // namespace rydgate::analysis
