#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rydgate::experiments {

inline constexpr char kToolVersion[] = "0.1.0";

enum class Kind {
    TruthTable,
    Dynamics,
    Spectrum,
    FidelityScan,
    Thermal,
    StirapScan,
    OptimizedPulse,
};

std::vector<std::string> kindNames();
std::string nameOf(Kind kind);
Kind kindFromName(const std::string& name);  // ConfigError listing valid names

// Experiment description in lab units (MHz, us, uK, um). Conversion to
// angular frequencies happens once, inside the runners. Zeros on omega-scaled
// fields mean "use the per-k default documented next to the field".
struct ExperimentConfig {
    Kind kind = Kind::TruthTable;
    int k = 2;
    std::vector<int> auxCounts;  // per-branch auxiliary chain lengths; empty = star

    double omega0MHz = 8.0;
    double delta0MHz = 0.0;  // 0 -> 2.4 * omega0 (3.2 * omega0 for k = 4)
    double bMHz = 0.0;       // 0 -> 6.0 * omega0 (5.6 * omega0 for k = 4)
    double c6MHzUm6 = 880e3;
    double gammaRKHz = 0.5;
    double gammaRPrimeKHz = 0.5;
    double gammaPMHz = 0.58;
    double lambda = 1.0;
    double chi = 0.0;

    double tauUs = 0.0;                  // 0 -> 16 pi / Omega0
    std::vector<double> tauGridUs;       // fidelityScan / optimizedPulse
    std::vector<double> temperaturesUK;  // thermal
    int samples = 40;                    // Monte Carlo draws per temperature
    std::uint64_t seed = 1;

    double omegaMaxMHz = 80.0;  // stirapScan Raman peak
    std::vector<double> tauTrGridUs;
    std::vector<double> tauDelGridUs;

    int bSign = 1;       // spectrum: sign applied to the interaction
    int gridSize = 256;  // spectrum grid / gap-profile resolution

    double tolerance = 0.0;  // propagator tolerance; 0 -> per-kind default
    int sampleCount = 257;   // trace samples where traces are emitted
    int workers = 0;         // 0 -> hardware concurrency
    std::string outputDir;   // empty -> $RYDGATE_OUTPUT_DIR, else "."

    void validate() const;
};

// JSON object with fields named exactly like the struct members plus
// "experiment" for the kind. Unknown fields, wrong types, and constraint
// violations throw ConfigError with the offending field named.
ExperimentConfig parseConfig(const std::string& path);
ExperimentConfig parseConfigText(const std::string& text, const std::string& label);

struct RunOutput {
    std::vector<std::string> files;  // data files; bit-identical across reruns
    std::string manifestPath;        // provenance incl. wall time (not covered
                                     // by the determinism guarantee)
    std::string summary;             // short human-readable result
};

RunOutput runExperiment(const ExperimentConfig& config);

}  // namespace rydgate::experiments
