#include "rydgate/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rydgate/analysis.hpp"
#include "rydgate/common.hpp"
#include "rydgate/model.hpp"
#include "rydgate/protocol.hpp"
#include "rydgate/pulses.hpp"
#include "rydgate/stirap.hpp"
#include "rydgate/units.hpp"

namespace rydgate::experiments {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct KindEntry {
    Kind kind;
    const char* name;
};

constexpr KindEntry kKinds[] = {
    {Kind::TruthTable, "truthTable"},   {Kind::Dynamics, "dynamics"},
    {Kind::Spectrum, "spectrum"},       {Kind::FidelityScan, "fidelityScan"},
    {Kind::Thermal, "thermal"},         {Kind::StirapScan, "stirapScan"},
    {Kind::OptimizedPulse, "optimizedPulse"},
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    return out;
}

std::string listToString(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out + "]";
}

std::string inputString(const std::vector<int>& q) {
    std::string s;
    for (int b : q) s += static_cast<char>('0' + b);
    return s;
}

// Reads fields off a JSON object while recording which keys were consumed, so
// typos surface as "unknown field" instead of a silently applied default.
class FieldReader {
public:
    FieldReader(const json& j, std::string label) : j_(j), label_(std::move(label)) {
        if (!j_.is_object()) throw ConfigError(label_ + ": config must be a JSON object");
    }

    bool has(const char* name) const { return j_.contains(name); }

    double number(const char* name, double fallback) {
        if (!take(name)) return fallback;
        const auto& v = j_.at(name);
        if (!v.is_number()) throw ConfigError(field(name) + " must be a number");
        return v.get<double>();
    }

    int integer(const char* name, int fallback) {
        if (!take(name)) return fallback;
        const auto& v = j_.at(name);
        if (!v.is_number_integer() && !v.is_number_unsigned()) {
            throw ConfigError(field(name) + " must be an integer");
        }
        return v.get<int>();
    }

    std::uint64_t unsigned64(const char* name, std::uint64_t fallback) {
        if (!take(name)) return fallback;
        const auto& v = j_.at(name);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            throw ConfigError(field(name) + " must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string text(const char* name, std::string fallback) {
        if (!take(name)) return fallback;
        const auto& v = j_.at(name);
        if (!v.is_string()) throw ConfigError(field(name) + " must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numberArray(const char* name) {
        if (!take(name)) return {};
        const auto& v = j_.at(name);
        if (!v.is_array()) throw ConfigError(field(name) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(field(name) + " must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<int> intArray(const char* name) {
        if (!take(name)) return {};
        const auto& v = j_.at(name);
        if (!v.is_array()) throw ConfigError(field(name) + " must be an array of integers");
        std::vector<int> out;
        for (const auto& e : v) {
            if (!e.is_number_integer() && !e.is_number_unsigned()) {
                throw ConfigError(field(name) + " must be an array of integers");
            }
            out.push_back(e.get<int>());
        }
        return out;
    }

    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& item : j_.items()) {
            if (!used_.count(item.key())) unknown.push_back(item.key());
        }
        if (unknown.empty()) return;
        std::string msg = label_ + ": unknown field";
        if (unknown.size() > 1) msg += "s";
        for (std::size_t i = 0; i < unknown.size(); ++i) {
            msg += (i ? ", '" : " '") + unknown[i] + "'";
        }
        throw ConfigError(msg);
    }

private:
    bool take(const char* name) {
        if (!j_.contains(name)) return false;
        used_.insert(name);
        return true;
    }
    std::string field(const char* name) const {
        return label_ + ": field '" + std::string(name) + "'";
    }

    const json& j_;
    std::string label_;
    std::set<std::string> used_;
};

// Config with all defaults applied and every quantity in propagation units
// (rad/us, us), plus the resolved lab values for metadata echoes.
struct Resolved {
    model::AtomArray array;
    double omega0 = 0.0;
    double delta0 = 0.0;
    double b = 0.0;
    double gammaR = 0.0;
    double gammaRPrime = 0.0;
    double gammaP = 0.0;
    double omegaMax = 0.0;
    double tau = 0.0;
    std::vector<double> tauGrid;
    std::vector<double> temperatures;
    std::vector<double> tauTrGrid;
    std::vector<double> tauDelGrid;
    double tol = 0.0;
    int workers = 1;
    fs::path outDir;
    double delta0MHz = 0.0;
    double bMHz = 0.0;
    double tauTotalUs = 0.0;  // 2 tau, gate wall-clock per input
};

Resolved resolve(const ExperimentConfig& c) {
    Resolved r;
    r.delta0MHz = c.delta0MHz > 0.0 ? c.delta0MHz : (c.k >= 4 ? 3.2 : 2.4) * c.omega0MHz;
    r.bMHz = c.bMHz > 0.0 ? c.bMHz : (c.k >= 4 ? 5.6 : 6.0) * c.omega0MHz;
    r.omega0 = units::radPerUsFromMHz(c.omega0MHz);
    r.delta0 = units::radPerUsFromMHz(r.delta0MHz);
    r.b = units::radPerUsFromMHz(r.bMHz);
    r.gammaR = units::radPerUsFromKHz(c.gammaRKHz);
    r.gammaRPrime = units::radPerUsFromKHz(c.gammaRPrimeKHz);
    r.gammaP = units::radPerUsFromMHz(c.gammaPMHz);
    r.omegaMax = units::radPerUsFromMHz(c.omegaMaxMHz);

    const double c6 = units::radPerUsFromMHz(c.c6MHzUm6);
    r.array = c.auxCounts.empty() ? model::buildStarGraph(c.k, r.b, c6)
                                  : model::buildExtendedGraph(c.k, c.auxCounts, r.b, c6);

    r.tau = c.tauUs > 0.0 ? c.tauUs : 16.0 * std::numbers::pi / r.omega0;
    r.tauTotalUs = 2.0 * r.tau;
    r.tauGrid = c.tauGridUs.empty() ? linspace(0.4, 1.6, 13) : c.tauGridUs;
    r.temperatures = c.temperaturesUK.empty() ? std::vector<double>{1.0} : c.temperaturesUK;
    r.tauTrGrid = c.tauTrGridUs.empty() ? linspace(0.2, 0.3, 9) : c.tauTrGridUs;
    r.tauDelGrid = c.tauDelGridUs.empty() ? linspace(0.02, 0.10, 9) : c.tauDelGridUs;

    if (c.tolerance > 0.0) {
        r.tol = c.tolerance;
    } else {
        r.tol = (c.kind == Kind::Thermal || c.kind == Kind::StirapScan) ? 1e-9 : 1e-10;
    }

    if (c.workers > 0) {
        r.workers = c.workers;
    } else {
        r.workers = std::max(1u, std::thread::hardware_concurrency());
    }

    if (!c.outputDir.empty()) {
        r.outDir = c.outputDir;
    } else if (const char* env = std::getenv("RYDGATE_OUTPUT_DIR"); env && *env) {
        r.outDir = env;
    } else {
        r.outDir = ".";
    }
    return r;
}

protocol::GateOptions gateOptions(const ExperimentConfig& c, const Resolved& r,
                                  bool traces) {
    protocol::GateOptions opt;
    opt.gammaR = r.gammaR;
    opt.gammaRPrime = r.gammaRPrime;
    opt.lambda = c.lambda;
    opt.tol = r.tol;
    opt.sampleCount = std::max(5, c.sampleCount);
    opt.workers = r.workers;
    opt.recordTraces = traces;
    return opt;
}

// Shared '#' metadata block. Wall time and worker count stay out of it: data
// files must be bit-identical across reruns and thread counts.
std::string metaBlock(const ExperimentConfig& c, const Resolved& r) {
    std::ostringstream out;
    out << "# experiment: " << nameOf(c.kind) << "\n";
    out << "# tool_version: " << kToolVersion << "\n";
    out << "# k: " << c.k << "\n";
    if (!c.auxCounts.empty()) {
        out << "# aux_counts: [";
        for (std::size_t i = 0; i < c.auxCounts.size(); ++i) {
            out << (i ? ", " : "") << c.auxCounts[i];
        }
        out << "]\n";
    }
    out << "# omega0_MHz: " << fmt(c.omega0MHz) << "\n";
    out << "# delta0_MHz: " << fmt(r.delta0MHz) << "\n";
    out << "# b_MHz: " << fmt(r.bMHz) << "\n";
    out << "# c6_MHz_um6: " << fmt(c.c6MHzUm6) << "\n";
    out << "# gamma_r_kHz: " << fmt(c.gammaRKHz) << "\n";
    out << "# gamma_rp_kHz: " << fmt(c.gammaRPrimeKHz) << "\n";
    out << "# lambda: " << fmt(c.lambda) << "\n";
    out << "# chi: " << fmt(c.chi) << "\n";
    out << "# tolerance: " << fmt(r.tol) << "\n";
    return out.str();
}

void writeText(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path.string());
    out << content;
    if (!out) throw ConfigError("failed while writing: " + path.string());
}

struct CurveMin {
    double x = 0.0;
    double y = 0.0;
    bool interior = false;
};

// Parabolic refinement through the three samples around the grid argmin.
CurveMin refineMin(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t i =
        std::min_element(ys.begin(), ys.end()) - ys.begin();
    CurveMin m{xs[i], ys[i], false};
    if (i == 0 || i + 1 == ys.size()) return m;
    const double d2 = ys[i - 1] - 2.0 * ys[i] + ys[i + 1];
    if (d2 <= 0.0) return m;
    const double h = 0.5 * (xs[i + 1] - xs[i - 1]);
    const double shift = 0.5 * h * (ys[i - 1] - ys[i + 1]) / d2;
    m.x = xs[i] + shift;
    m.y = ys[i] - 0.125 * (ys[i - 1] - ys[i + 1]) * (ys[i - 1] - ys[i + 1]) / d2;
    m.interior = true;
    return m;
}

std::vector<int> inputBits(int index, int qubits) {
    std::vector<int> q(qubits);
    for (int i = 0; i < qubits; ++i) q[i] = (index >> i) & 1;
    return q;
}

json complexJson(const qdyn::Complex& z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

// ---- truthTable ------------------------------------------------------------

void runTruthTable(const ExperimentConfig& c, const Resolved& r, std::vector<std::string>& files,
                   json& results, std::string& summary) {
    const auto stepI = pulses::flatTopLinear(r.omega0, r.delta0, r.tau);
    const auto run = protocol::runGate(r.array, stepI, gateOptions(c, r, false));
    const auto frame = protocol::defaultCorrectionFrame(r.array);
    const auto target = protocol::composedDiagonal(r.array, frame);

    std::ostringstream csv;
    csv << metaBlock(c, r);
    csv << "# tau_us: " << fmt(r.tau) << "\n";
    csv << "input,q,nu,parity,re_g,im_g,abs_g,arg_g,phase_geometric,phase_dynamical,"
           "target_corrected\n";
    const int n = static_cast<int>(run.inputs.size());
    for (int idx = 0; idx < n; ++idx) {
        const auto& rec = run.inputs[idx];
        const auto parts = protocol::phaseDecomposition(run, rec.q);
        csv << idx << "," << inputString(rec.q) << "," << rec.nu << ","
            << (rec.nu % 2 == 0 ? 1 : -1) << "," << fmt(rec.amplitude.real()) << ","
            << fmt(rec.amplitude.imag()) << "," << fmt(std::abs(rec.amplitude)) << ","
            << fmt(std::arg(rec.amplitude)) << "," << fmt(parts.geometric) << ","
            << fmt(parts.dynamical) << "," << target[idx] << "\n";
    }
    const fs::path path = r.outDir / "truth_table.csv";
    writeText(path, csv.str());
    files.push_back(path.string());

    const auto parity = protocol::averageFidelity(run, protocol::FidelityTarget::ParityDiagonal);
    const auto corrected =
        protocol::averageFidelity(run, protocol::FidelityTarget::CkZAfterCorrection);
    results["fidelityParity"] = parity.fidelity;
    results["errorParity"] = parity.error;
    results["fidelityCorrected"] = corrected.fidelity;
    results["errorCorrected"] = corrected.error;
    json flips = json::array();
    for (int qb : frame.flippedQubits) flips.push_back(qb);
    results["correctionFrameFlips"] = flips;

    std::ostringstream s;
    s.precision(6);
    s << "truth table over " << n << " inputs: parity-gate error " << parity.error
      << ", corrected-gate error " << corrected.error;
    summary = s.str();
}

// ---- dynamics ---------------------------------------------------------------

void runDynamics(const ExperimentConfig& c, const Resolved& r, std::vector<std::string>& files,
                 json& results, std::string& summary) {
    const auto stepI = pulses::flatTopLinear(r.omega0, r.delta0, r.tau);
    const auto run = protocol::runGate(r.array, stepI, gateOptions(c, r, true));

    std::ostringstream csv;
    csv << metaBlock(c, r);
    csv << "# tau_us: " << fmt(r.tau) << "\n";
    csv << "# sample_count: " << std::max(5, c.sampleCount) << "\n";
    csv << "input,q,t_us,pop_input,pop_mis,excitation,phase\n";
    json perInput = json::array();
    for (std::size_t idx = 0; idx < run.inputs.size(); ++idx) {
        const auto& rec = run.inputs[idx];
        for (std::size_t i = 0; i < rec.times.size(); ++i) {
            csv << idx << "," << inputString(rec.q) << "," << fmt(rec.times[i]) << ","
                << fmt(rec.popInput[i]) << "," << fmt(rec.popMis[i]) << ","
                << fmt(rec.excitation[i]) << "," << fmt(rec.phase[i]) << "\n";
        }
        perInput.push_back(json{{"q", inputString(rec.q)},
                                {"nu", rec.nu},
                                {"nuBar", rec.nuBar},
                                {"g", complexJson(rec.amplitude)}});
    }
    const fs::path path = r.outDir / "dynamics.csv";
    writeText(path, csv.str());
    files.push_back(path.string());

    const auto me = analysis::meanExcitation(run);
    results["inputs"] = perInput;
    results["nuBar"] = me.nuBar;
    results["nuBarMeanField"] = me.nuBarMeanField;
    results["nuMid"] = me.nuMid;

    std::ostringstream s;
    s.precision(6);
    s << "dynamics traces for " << run.inputs.size() << " inputs, mean excitation nuBar "
      << me.nuBar;
    summary = s.str();
}

// ---- spectrum ---------------------------------------------------------------

void runSpectrum(const ExperimentConfig& c, const Resolved& r, std::vector<std::string>& files,
                 json& results, std::string& summary) {
    const auto allOnes = std::vector<int>(r.array.qubitAtoms.size(), 1);
    const auto basis = model::basisForInput(r.array, allOnes);
    const auto schedule = pulses::flatTopLinear(r.omega0, r.delta0, r.tau);
    const auto scan = analysis::spectrumScan(r.array, basis, schedule, c.bSign, c.gridSize);

    const int grid = static_cast<int>(scan.deltas.size());
    const int labels = static_cast<int>(scan.energies.cols());
    std::ostringstream csv;
    csv << metaBlock(c, r);
    csv << "# b_sign: " << c.bSign << "\n";
    csv << "# grid_size: " << grid << "\n";
    csv << "# followed_label: " << scan.followedLabel << "\n";
    csv << "# units: rad/us\n";
    for (const auto& w : scan.warnings) csv << "# warning: " << w << "\n";
    csv << "delta";
    for (int l = 0; l < labels; ++l) csv << ",E" << l;
    for (int l = 0; l < labels; ++l) csv << ",eta" << l;
    csv << "\n";
    for (int i = 0; i < grid; ++i) {
        csv << fmt(scan.deltas(i));
        for (int l = 0; l < labels; ++l) csv << "," << fmt(scan.energies(i, l));
        for (int l = 0; l < labels; ++l) csv << "," << fmt(scan.eta(i, l));
        csv << "\n";
    }
    const fs::path path = r.outDir / "spectrum.csv";
    writeText(path, csv.str());
    files.push_back(path.string());

    double etaMax = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int l = 0; l < labels; ++l) {
            if (l == scan.followedLabel) continue;
            etaMax = std::max(etaMax, scan.eta(i, l));
        }
    }
    results["followedLabel"] = scan.followedLabel;
    results["etaMax"] = etaMax;
    results["warnings"] = scan.warnings;

    std::ostringstream s;
    s.precision(6);
    s << "spectrum over " << grid << " detunings, " << labels
      << " tracked levels, max leakage parameter " << etaMax;
    summary = s.str();
}

// ---- fidelityScan -----------------------------------------------------------

void runFidelityScan(const ExperimentConfig& c, const Resolved& r,
                     std::vector<std::string>& files, json& results, std::string& summary) {
    const int nTau = static_cast<int>(r.tauGrid.size());
    std::vector<double> eTotal(nTau), eLeak(nTau), eDecay(nTau), nuBar(nTau);
    std::vector<std::pair<double, double>> leakSamples;
    auto optOn = gateOptions(c, r, false);
    auto optOff = optOn;
    optOff.gammaR = 0.0;
    optOff.gammaRPrime = 0.0;

    for (int i = 0; i < nTau; ++i) {
        const double tau = r.tauGrid[i];
        const auto stepI = pulses::flatTopLinear(r.omega0, r.delta0, tau);
        const auto runOn = protocol::runGate(r.array, stepI, optOn);
        const auto runOff = protocol::runGate(r.array, stepI, optOff);
        eTotal[i] =
            protocol::averageFidelity(runOn, protocol::FidelityTarget::ParityDiagonal).error;
        eLeak[i] =
            protocol::averageFidelity(runOff, protocol::FidelityTarget::ParityDiagonal).error;
        nuBar[i] = analysis::meanExcitation(runOn).nuBar;
        eDecay[i] = analysis::decayError(tau, r.gammaR, nuBar[i]).linear;
        leakSamples.emplace_back(tau, eLeak[i]);
    }

    std::ostringstream csv;
    csv << metaBlock(c, r);
    csv << "# tau_grid_us: " << listToString(r.tauGrid) << "\n";
    csv << "tau_us,E_total,E_leakage,E_decay,nu_bar\n";
    for (int i = 0; i < nTau; ++i) {
        csv << fmt(r.tauGrid[i]) << "," << fmt(eTotal[i]) << "," << fmt(eLeak[i]) << ","
            << fmt(eDecay[i]) << "," << fmt(nuBar[i]) << "\n";
    }
    const fs::path path = r.outDir / "fidelity_scan.csv";
    writeText(path, csv.str());
    files.push_back(path.string());

    const auto measured = refineMin(r.tauGrid, eTotal);
    results["tauOptMeasured"] = measured.x;
    results["eMinMeasured"] = measured.y;
    results["measuredMinInterior"] = measured.interior;

    double nuBarMean = 0.0;
    for (double v : nuBar) nuBarMean += v;
    nuBarMean /= nTau;
    results["nuBarMean"] = nuBarMean;

    try {
        const auto fit = analysis::leakageFit(leakSamples, c.k, r.delta0, r.omega0);
        results["leakageFit"] = json{{"mu", fit.mu},
                                     {"c", fit.c},
                                     {"residual", fit.residual},
                                     {"usedSamples", fit.usedSamples},
                                     {"warnings", fit.warnings}};
        if (r.gammaR > 0.0) {
            const auto opt = analysis::optimalDuration(c.k, fit.mu, fit.c, nuBarMean, r.gammaR,
                                                       r.delta0, r.omega0);
            results["optimalDuration"] = json{{"tauOpt", opt.tauOpt},
                                              {"eMin", opt.eMin},
                                              {"tauNumeric", opt.tauNumeric},
                                              {"eNumeric", opt.eNumeric}};
        }
    } catch (const NumericalError& e) {
        results["leakageFitError"] = e.what();
    }

    std::ostringstream s;
    s.precision(6);
    s << "error scan over " << nTau << " durations: min total error " << measured.y
      << " near tau = " << measured.x << " us";
    summary = s.str();
}

// ---- thermal ----------------------------------------------------------------

void runThermal(const ExperimentConfig& c, const Resolved& r, std::vector<std::string>& files,
                json& results, std::string& summary) {
    const auto stepI = pulses::flatTopLinear(r.omega0, r.delta0, r.tau);
    const auto opt = gateOptions(c, r, false);

    std::ostringstream csv;
    csv << metaBlock(c, r);
    csv << "# tau_us: " << fmt(r.tau) << "\n";
    csv << "# samples: " << c.samples << "\n";
    csv << "# seed: " << c.seed << "\n";
    csv << "T_uK,E_th_mean,E_th_std,E_baseline\n";
    json rows = json::array();
    double lastMean = 0.0;
    double baseline = 0.0;
    for (double T : r.temperatures) {
        const auto res =
            analysis::thermalMonteCarlo(r.array, stepI, opt, T, c.samples, c.seed);
        csv << fmt(T) << "," << fmt(res.mean) << "," << fmt(res.stddev) << ","
            << fmt(res.baseline) << "\n";
        rows.push_back(json{{"T_uK", T},
                            {"mean", res.mean},
                            {"std", res.stddev},
                            {"baseline", res.baseline}});
        lastMean = res.mean;
        baseline = res.baseline;
    }
    const fs::path path = r.outDir / "thermal.csv";
    writeText(path, csv.str());
    files.push_back(path.string());

    results["rows"] = rows;
    std::ostringstream s;
    s.precision(6);
    s << "thermal Monte Carlo (" << c.samples << " draws): excess error " << lastMean
      << " at " << r.temperatures.back() << " uK over baseline " << baseline;
    summary = s.str();
}

// ---- stirapScan -------------------------------------------------------------

void runStirapScan(const ExperimentConfig& c, const Resolved& r, std::vector<std::string>& files,
                   json& results, std::string& summary) {
    stirap::StirapConfig base;
    base.omegaMax = r.omegaMax;
    base.gammaP = r.gammaP;
    base.gammaR = r.gammaR;
    base.gammaRPrime = r.gammaRPrime;
    base.lambda = c.lambda;
    base.chi = c.chi;
    base.tol = r.tol;

    const Eigen::VectorXd trGrid =
        Eigen::Map<const Eigen::VectorXd>(r.tauTrGrid.data(), r.tauTrGrid.size());
    const Eigen::VectorXd delGrid =
        Eigen::Map<const Eigen::VectorXd>(r.tauDelGrid.data(), r.tauDelGrid.size());
    const auto scan = stirap::scanTransfer(r.array, base, trGrid, delGrid, r.workers);

    std::ostringstream csv;
    csv << metaBlock(c, r);
    csv << "# omega_max_MHz: " << fmt(c.omegaMaxMHz) << "\n";
    csv << "# gamma_p_MHz: " << fmt(c.gammaPMHz) << "\n";
    csv << "tau_tr_us,tau_del_us,E_tr,fidelity_mean\n";
    for (int i = 0; i < trGrid.size(); ++i) {
        for (int j = 0; j < delGrid.size(); ++j) {
            const double e = scan.error(i, j);
            csv << fmt(trGrid(i)) << "," << fmt(delGrid(j)) << "," << fmt(e) << ","
                << fmt(std::isnan(e) ? e : 1.0 - e) << "\n";
        }
    }
    const fs::path scanPath = r.outDir / "stirap_scan.csv";
    writeText(scanPath, csv.str());
    files.push_back(scanPath.string());

    auto best = base;
    best.tauTr = scan.bestTauTr;
    best.tauDel = scan.bestTauDel;
    best.sampleCount = std::max(5, c.sampleCount);
    std::ostringstream traces;
    traces << metaBlock(c, r);
    traces << "# omega_max_MHz: " << fmt(c.omegaMaxMHz) << "\n";
    traces << "# gamma_p_MHz: " << fmt(c.gammaPMHz) << "\n";
    traces << "# tau_tr_us: " << fmt(best.tauTr) << "\n";
    traces << "# tau_del_us: " << fmt(best.tauDel) << "\n";
    traces << "input,q,t_us,pop_initial,pop_target,pop_intermediate\n";
    const int qubits = static_cast<int>(r.array.qubitAtoms.size());
    double pMax = 0.0;
    for (int idx = 0; idx < (1 << qubits); ++idx) {
        const auto q = inputBits(idx, qubits);
        const auto tr = stirap::transferRun(r.array, q, best);
        pMax = std::max(pMax, tr.maxIntermediatePopulation);
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            traces << idx << "," << inputString(q) << "," << fmt(tr.times[i]) << ","
                   << fmt(tr.popInitial[i]) << "," << fmt(tr.popTarget[i]) << ","
                   << fmt(tr.popIntermediate[i]) << "\n";
        }
    }
    const fs::path tracePath = r.outDir / "stirap_traces.csv";
    writeText(tracePath, traces.str());
    files.push_back(tracePath.string());

    results["bestError"] = scan.bestError;
    results["bestTauTr"] = scan.bestTauTr;
    results["bestTauDel"] = scan.bestTauDel;
    results["maxIntermediatePopulation"] = pMax;

    std::ostringstream s;
    s.precision(6);
    s << "transfer scan " << trGrid.size() << "x" << delGrid.size() << ": best E_tr "
      << scan.bestError << " at tau_tr = " << scan.bestTauTr << " us, tau_del = "
      << scan.bestTauDel << " us";
    summary = s.str();
}

// ---- optimizedPulse ---------------------------------------------------------

void runOptimizedPulse(const ExperimentConfig& c, const Resolved& r,
                       std::vector<std::string>& files, json& results, std::string& summary) {
    const auto profile = analysis::gapProfile(r.array, r.omega0, r.delta0, c.gridSize);
    const std::function<double(double)> gapFn = profile;
    const auto opt = gateOptions(c, r, false);

    const int nTau = static_cast<int>(r.tauGrid.size());
    std::vector<double> eLinear(nTau), eAdapted(nTau);
    std::vector<pulses::PulseSchedule> adaptedSchedules(nTau);
    for (int i = 0; i < nTau; ++i) {
        const double tau = r.tauGrid[i];
        try {
            const auto lin = pulses::flatTopLinear(r.omega0, r.delta0, tau);
            const double dt = pulses::firstReach(lin, 0.9);
            adaptedSchedules[i] = pulses::gapAdaptedSweep(gapFn, r.omega0, r.delta0, tau, dt);
            eLinear[i] = protocol::averageFidelity(protocol::runGate(r.array, lin, opt),
                                                   protocol::FidelityTarget::ParityDiagonal)
                             .error;
            eAdapted[i] =
                protocol::averageFidelity(protocol::runGate(r.array, adaptedSchedules[i], opt),
                                          protocol::FidelityTarget::ParityDiagonal)
                    .error;
        } catch (const NumericalError& e) {
            throw NumericalError("optimizedPulse at tau " + fmt(tau) + " us: " + e.what());
        }
    }

    std::ostringstream csv;
    csv << metaBlock(c, r);
    csv << "# tau_grid_us: " << listToString(r.tauGrid) << "\n";
    csv << "tau_us,E_linear,E_adapted\n";
    for (int i = 0; i < nTau; ++i) {
        csv << fmt(r.tauGrid[i]) << "," << fmt(eLinear[i]) << "," << fmt(eAdapted[i]) << "\n";
    }
    const fs::path path = r.outDir / "optimized_pulse.csv";
    writeText(path, csv.str());
    files.push_back(path.string());

    const auto minLin = refineMin(r.tauGrid, eLinear);
    const auto minAd = refineMin(r.tauGrid, eAdapted);
    results["linear"] = json{{"tauOpt", minLin.x}, {"eMin", minLin.y},
                             {"interior", minLin.interior}};
    results["adapted"] = json{{"tauOpt", minAd.x}, {"eMin", minAd.y},
                              {"interior", minAd.interior}};
    results["tauRatio"] = minAd.x / minLin.x;
    results["errorRatio"] = minAd.y / minLin.y;

    // Exported drive shapes at the grid point nearest the adapted optimum.
    int iNear = 0;
    for (int i = 1; i < nTau; ++i) {
        if (std::abs(r.tauGrid[i] - minAd.x) < std::abs(r.tauGrid[iNear] - minAd.x)) iNear = i;
    }
    const auto lin = pulses::flatTopLinear(r.omega0, r.delta0, r.tauGrid[iNear]);
    const std::string head = metaBlock(c, r) + "# tau_us: " + fmt(r.tauGrid[iNear]) + "\n";
    const fs::path linPath = r.outDir / "schedule_linear.csv";
    const fs::path adPath = r.outDir / "schedule_adapted.csv";
    writeText(linPath, head + pulses::scheduleCsv(lin, 513));
    writeText(adPath, head + pulses::scheduleCsv(adaptedSchedules[iNear], 513));
    files.push_back(linPath.string());
    files.push_back(adPath.string());

    std::ostringstream s;
    s.precision(6);
    s << "gap-adapted sweep: error ratio " << results["errorRatio"].get<double>()
      << ", duration ratio " << results["tauRatio"].get<double>() << " vs the linear ramp";
    summary = s.str();
}

}  // namespace

std::vector<std::string> kindNames() {
    std::vector<std::string> names;
    for (const auto& e : kKinds) names.emplace_back(e.name);
    return names;
}

std::string nameOf(Kind kind) {
    for (const auto& e : kKinds) {
        if (e.kind == kind) return e.name;
    }
    throw ContractViolation("unmapped experiment kind");
}

Kind kindFromName(const std::string& name) {
    for (const auto& e : kKinds) {
        if (name == e.name) return e.kind;
    }
    std::string msg = "unknown experiment '" + name + "' (valid kinds:";
    for (const auto& e : kKinds) msg += std::string(" ") + e.name;
    throw ConfigError(msg + ")");
}

void ExperimentConfig::validate() const {
    if (k < 2 || k > 4) throw ConfigError("k must be 2, 3, or 4");
    if (!auxCounts.empty()) {
        if (static_cast<int>(auxCounts.size()) != k) {
            throw ConfigError("auxCounts needs exactly k entries (one chain per branch)");
        }
        int total = k + 1;
        for (int n : auxCounts) {
            if (n < 0) throw ConfigError("auxCounts entries must be non-negative");
            total += n;
        }
        if (total > model::kMaxAtoms) {
            throw ConfigError("auxCounts puts the atom count at " + std::to_string(total) +
                              ", above the supported " + std::to_string(model::kMaxAtoms));
        }
    }
    if (omega0MHz <= 0.0) throw ConfigError("omega0MHz must be positive");
    if (delta0MHz < 0.0) throw ConfigError("delta0MHz must be non-negative");
    if (bMHz < 0.0) throw ConfigError("bMHz must be non-negative");
    if (c6MHzUm6 <= 0.0) throw ConfigError("c6MHzUm6 must be positive");
    if (gammaRKHz < 0.0 || gammaRPrimeKHz < 0.0 || gammaPMHz < 0.0) {
        throw ConfigError("decay rates must be non-negative");
    }
    if (lambda <= 0.0) throw ConfigError("lambda must be positive");
    if (std::abs(chi) > 1.0) throw ConfigError("chi must lie in [-1, 1]");
    if (tauUs < 0.0) throw ConfigError("tauUs must be non-negative");
    for (double t : tauGridUs) {
        if (t <= 0.0) throw ConfigError("tauGridUs entries must be positive");
    }
    if (!tauGridUs.empty() && tauGridUs.size() < 3) {
        throw ConfigError("tauGridUs needs at least 3 points");
    }
    for (double T : temperaturesUK) {
        if (T < 0.0) throw ConfigError("temperaturesUK entries must be non-negative");
    }
    if (samples < 2) throw ConfigError("samples must be at least 2");
    if (omegaMaxMHz <= 0.0) throw ConfigError("omegaMaxMHz must be positive");
    for (double t : tauTrGridUs) {
        if (t <= 0.0) throw ConfigError("tauTrGridUs entries must be positive");
    }
    for (double t : tauDelGridUs) {
        if (t <= 0.0) throw ConfigError("tauDelGridUs entries must be positive");
    }
    if (!tauTrGridUs.empty() && tauTrGridUs.size() < 8) {
        throw ConfigError("tauTrGridUs needs at least 8 points");
    }
    if (!tauDelGridUs.empty() && tauDelGridUs.size() < 8) {
        throw ConfigError("tauDelGridUs needs at least 8 points");
    }
    if (bSign != 1 && bSign != -1) throw ConfigError("bSign must be +1 or -1");
    if (kind == Kind::Spectrum && gridSize < 64) {
        throw ConfigError("gridSize must be at least 64 for spectrum scans");
    }
    if (gridSize < 2) throw ConfigError("gridSize must be at least 2");
    if (tolerance < 0.0) throw ConfigError("tolerance must be non-negative");
    if (sampleCount < 0) throw ConfigError("sampleCount must be non-negative");
    if (workers < 0) throw ConfigError("workers must be non-negative");
}

ExperimentConfig parseConfigText(const std::string& text, const std::string& label) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') ++line;
        }
        throw ConfigError(label + ":" + std::to_string(line) + ": " + e.what());
    }

    FieldReader f(j, label);
    ExperimentConfig c;
    if (!f.has("experiment")) {
        throw ConfigError(label + ": missing required field 'experiment'");
    }
    c.kind = kindFromName(f.text("experiment", ""));
    c.k = f.integer("k", c.k);
    c.auxCounts = f.intArray("auxCounts");
    c.omega0MHz = f.number("omega0MHz", c.omega0MHz);
    c.delta0MHz = f.number("delta0MHz", c.delta0MHz);
    c.bMHz = f.number("bMHz", c.bMHz);
    c.c6MHzUm6 = f.number("c6MHzUm6", c.c6MHzUm6);
    c.gammaRKHz = f.number("gammaRKHz", c.gammaRKHz);
    c.gammaRPrimeKHz = f.number("gammaRPrimeKHz", c.gammaRPrimeKHz);
    c.gammaPMHz = f.number("gammaPMHz", c.gammaPMHz);
    c.lambda = f.number("lambda", c.lambda);
    c.chi = f.number("chi", c.chi);
    c.tauUs = f.number("tauUs", c.tauUs);
    c.tauGridUs = f.numberArray("tauGridUs");
    c.temperaturesUK = f.numberArray("temperaturesUK");
    c.samples = f.integer("samples", c.samples);
    c.seed = f.unsigned64("seed", c.seed);
    c.omegaMaxMHz = f.number("omegaMaxMHz", c.omegaMaxMHz);
    c.tauTrGridUs = f.numberArray("tauTrGridUs");
    c.tauDelGridUs = f.numberArray("tauDelGridUs");
    c.bSign = f.integer("bSign", c.bSign);
    c.gridSize = f.integer("gridSize", c.gridSize);
    c.tolerance = f.number("tolerance", c.tolerance);
    c.sampleCount = f.integer("sampleCount", c.sampleCount);
    c.workers = f.integer("workers", c.workers);
    c.outputDir = f.text("outputDir", c.outputDir);
    f.finish();
    c.validate();
    return c;
}

ExperimentConfig parseConfig(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parseConfigText(buf.str(), path);
}

RunOutput runExperiment(const ExperimentConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const Resolved r = resolve(config);
    std::error_code ec;
    fs::create_directories(r.outDir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + r.outDir.string());

    RunOutput out;
    json results;
    switch (config.kind) {
        case Kind::TruthTable:
            runTruthTable(config, r, out.files, results, out.summary);
            break;
        case Kind::Dynamics:
            runDynamics(config, r, out.files, results, out.summary);
            break;
        case Kind::Spectrum:
            runSpectrum(config, r, out.files, results, out.summary);
            break;
        case Kind::FidelityScan:
            runFidelityScan(config, r, out.files, results, out.summary);
            break;
        case Kind::Thermal:
            runThermal(config, r, out.files, results, out.summary);
            break;
        case Kind::StirapScan:
            runStirapScan(config, r, out.files, results, out.summary);
            break;
        case Kind::OptimizedPulse:
            runOptimizedPulse(config, r, out.files, results, out.summary);
            break;
    }

    json manifest;
    manifest["experiment"] = nameOf(config.kind);
    manifest["toolVersion"] = kToolVersion;
    json cfg;
    cfg["k"] = config.k;
    if (!config.auxCounts.empty()) cfg["auxCounts"] = config.auxCounts;
    cfg["omega0MHz"] = config.omega0MHz;
    cfg["delta0MHz"] = r.delta0MHz;
    cfg["bMHz"] = r.bMHz;
    cfg["c6MHzUm6"] = config.c6MHzUm6;
    cfg["gammaRKHz"] = config.gammaRKHz;
    cfg["gammaRPrimeKHz"] = config.gammaRPrimeKHz;
    cfg["gammaPMHz"] = config.gammaPMHz;
    cfg["lambda"] = config.lambda;
    cfg["chi"] = config.chi;
    cfg["tauUs"] = r.tau;
    cfg["tauGridUs"] = r.tauGrid;
    cfg["temperaturesUK"] = r.temperatures;
    cfg["samples"] = config.samples;
    cfg["seed"] = config.seed;
    cfg["omegaMaxMHz"] = config.omegaMaxMHz;
    cfg["tauTrGridUs"] = r.tauTrGrid;
    cfg["tauDelGridUs"] = r.tauDelGrid;
    cfg["bSign"] = config.bSign;
    cfg["gridSize"] = config.gridSize;
    cfg["tolerance"] = r.tol;
    cfg["sampleCount"] = config.sampleCount;
    manifest["config"] = cfg;
    manifest["geometry"] = json::parse(r.array.toJson());
    manifest["results"] = results;
    manifest["outputs"] = out.files;
    manifest["workers"] = r.workers;
    const auto stop = std::chrono::steady_clock::now();
    manifest["wallTimeSeconds"] =
        std::chrono::duration<double>(stop - start).count();

    const fs::path manifestPath = r.outDir / "manifest.json";
    writeText(manifestPath, manifest.dump(2) + "\n");
    out.manifestPath = manifestPath.string();
    return out;
}

}  // namespace rydgate::experiments
