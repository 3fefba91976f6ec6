#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rydgate/common.hpp"
#include "rydgate/compare.hpp"
#include "rydgate/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rydgate: multiqubit Rydberg blockade gate simulator"};
    app.set_version_flag("--version", std::string(rydgate::experiments::kToolVersion));
    app.require_subcommand(1);

    std::string configPath;
    int workers = 0;
    std::string outputDir;
    auto* runCmd = app.add_subcommand("run", "Run one experiment from a JSON config");
    runCmd->add_option("config", configPath, "Experiment config file (JSON)")->required();
    runCmd->add_option("--workers", workers,
                       "Worker threads (default: all cores; results do not depend on it)");
    runCmd->add_option("--output-dir", outputDir, "Directory for the output files");

    std::string fileA;
    std::string fileB;
    double rtol = 1e-9;
    double atol = 0.0;
    auto* cmpCmd = app.add_subcommand("compare", "Compare two CSV files cell by cell");
    cmpCmd->add_option("a", fileA, "First CSV file")->required();
    cmpCmd->add_option("b", fileB, "Second CSV file")->required();
    cmpCmd->add_option("--rtol", rtol, "Relative tolerance per cell");
    cmpCmd->add_option("--atol", atol, "Absolute tolerance per cell");

    auto* listCmd = app.add_subcommand("list-experiments", "List experiment kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*listCmd) {
            for (const auto& name : rydgate::experiments::kindNames()) {
                std::cout << name << "\n";
            }
            return kExitOk;
        }
        if (*runCmd) {
            auto config = rydgate::experiments::parseConfig(configPath);
            if (workers > 0) config.workers = workers;
            if (!outputDir.empty()) config.outputDir = outputDir;
            const auto out = rydgate::experiments::runExperiment(config);
            std::cout << out.summary << "\n";
            for (const auto& file : out.files) std::cout << "wrote " << file << "\n";
            std::cout << "wrote " << out.manifestPath << "\n";
            return kExitOk;
        }
        if (*cmpCmd) {
            const rydgate::compare::CompareOptions options{rtol, atol};
            const auto report = rydgate::compare::compareFiles(fileA, fileB, options);
            std::cout << report.summary() << "\n";
            return report.pass ? kExitOk : kExitNumerical;
        }
    } catch (const rydgate::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rydgate::ContractViolation& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rydgate::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
