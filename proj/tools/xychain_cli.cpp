// Command-line driver: single ground-state runs, field-parameter sweeps,
// disorder ensembles, post-hoc fits over written profiles, and a
// TEBD-vs-exact-diagonalization cross check.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xy/ed.hpp"
#include "xy/format.hpp"
#include "xy/harness.hpp"
#include "xy/model.hpp"
#include "xy/observables.hpp"
#include "xy/rng.hpp"
#include "xy/tebd.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
    std::string configPath;
    std::vector<std::string> overrides;
    std::string outDir;
    int workers = 1;
    bool resume = false;
};

void addConfigFlags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.configPath, "JSON config file (defaults used when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", o.overrides, "override a config key, e.g. --set model.n=64");
    cmd->add_option("--out", o.outDir, "output directory (overrides output.directory)");
}

void addRunFlags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--workers", o.workers, "worker threads for independent runs")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--resume", o.resume, "skip runs whose profile already matches the config");
}

// File (or empty object) with --set overrides applied; validation happens in
// configFromJson so every subcommand reports the same field-level errors.
json userDocument(const CommonOpts& o) {
    json doc = json::object();
    if (!o.configPath.empty()) {
        std::ifstream in(o.configPath);
        if (!in) throw std::runtime_error("cannot open config " + o.configPath);
        doc = json::parse(in);
    }
    for (const std::string& assignment : o.overrides) xy::applyOverride(doc, assignment);
    if (!o.outDir.empty()) doc["output"]["directory"] = o.outDir;
    return doc;
}

int runCommand(const CommonOpts& o, xy::RunMode mode) {
    xy::ExperimentConfig config = xy::configFromJson(userDocument(o));
    xy::SweepResult result = xy::runSweep(config, mode, o.workers, o.resume);
    int failed = 0;
    for (const xy::ResultRow& row : result.rows)
        if (!row.error.empty()) ++failed;
    std::printf("%zu rows -> %s (%d executed, %d resumed)\n", result.rows.size(),
                (std::filesystem::path(config.directory) / "results.csv").c_str(),
                result.executed, result.resumed);
    if (mode == xy::RunMode::Single && failed == 0) {
        const xy::ResultRow& row = result.rows.front();
        std::printf("E = %s   m_par = %s   m_perp = %s   |m_perp| = %s\n",
                    xy::formatShortest(row.energy).c_str(),
                    xy::formatShortest(row.meanMParallel).c_str(),
                    xy::formatShortest(row.meanMPerp).c_str(),
                    xy::formatShortest(row.meanAbsMPerp).c_str());
        std::printf("S_mid = %s   xi = %s   converged = %d   discarded = %s\n",
                    xy::formatShortest(row.midEntropy).c_str(),
                    row.xi ? xy::formatShortest(*row.xi).c_str() : "-", row.converged ? 1 : 0,
                    xy::formatShortest(row.discardedWeight).c_str());
    }
    for (const xy::ResultRow& row : result.rows)
        if (!row.error.empty())
            std::fprintf(stderr, "run sv=%s seed=%llu failed: %s\n",
                         xy::formatShortest(row.sweepValue).c_str(),
                         static_cast<unsigned long long>(row.seed), row.error.c_str());
    return failed == 0 ? 0 : 1;
}

void printFitLine(const json& fits, const char* key, const char* label) {
    if (!fits.contains(key)) return;
    const json& f = fits.at(key);
    std::printf("%s: exponent = %.4f +- %.4f  prefactor = %.4f  (%d points)\n", label,
                f.at("exponent").get<double>(), f.at("exponentStdErr").get<double>(),
                f.at("prefactor").get<double>(), f.at("pointCount").get<int>());
}

int analyzeCommand(const CommonOpts& o) {
    std::filesystem::path dir;
    if (!o.outDir.empty()) {
        dir = o.outDir;
    } else {
        dir = xy::configFromJson(userDocument(o)).directory;
    }
    json fits = xy::analyzeOutputs(dir);
    std::printf("analyzed %d profiles under %s\n", fits.at("runCount").get<int>(),
                dir.c_str());
    printFitLine(fits, "beta", "order parameter");
    if (fits.contains("onset"))
        std::printf("onset: h_c = %.4f from %d points (reference %.3f)\n",
                    fits.at("onset").at("criticalField").get<double>(),
                    fits.at("onset").at("pointCount").get<int>(),
                    fits.at("onset").at("reference").get<double>());
    if (fits.contains("centralCharge"))
        std::printf("central charge: c = %.4f +- %.4f (%s, %d points)\n",
                    fits.at("centralCharge").at("c").get<double>(),
                    fits.at("centralCharge").at("cStdErr").get<double>(),
                    fits.at("centralCharge").at("method").get<std::string>().c_str(),
                    fits.at("centralCharge").at("pointCount").get<int>());
    if (fits.contains("islands"))
        std::printf("islands: %zu detected\n", fits.at("islands").size());
    printFitLine(fits, "islandSizeFit", "island size");
    printFitLine(fits, "islandAmplitudeFit", "island amplitude");
    std::printf("wrote %s\n", (dir / "fits.json").c_str());
    return 0;
}

// ------------------------------------------------------------ oracle check --

constexpr double kOracleRelEnergyTol = 1e-6;
constexpr double kOracleMagnetizationTol = 1e-3;
constexpr double kOracleEntropyTol = 1e-3;

// Tighter than the everyday defaults: the opening stage anneals long enough
// to drain near-degenerate doublets, and the fine closing stage relaxes the
// split-step bias below the comparison tolerances.
xy::EvolutionSchedule oracleSchedule() {
    xy::EvolutionSchedule schedule;
    schedule.stages = {
        {0.1, 8000, 1e-12}, {0.01, 2000, 1e-12}, {0.001, 2000, 1e-12}, {0.0003, 10000, 1e-13}};
    return schedule;
}

struct OraclePoint {
    int n = 0;
    xy::FieldSpec field;
    std::string label;
};

int oracleCheckCommand(const CommonOpts& o) {
    const json userDoc = userDocument(o);
    xy::ExperimentConfig config = xy::configFromJson(userDoc);
    const bool userSchedule = userDoc.contains("engine") && userDoc.at("engine").contains("schedule");
    const bool userBond = userDoc.contains("engine") && userDoc.at("engine").contains("maxBond");
    xy::EvolutionSchedule schedule = userSchedule ? config.schedule : oracleSchedule();
    xy::TruncationPolicy policy = config.policy;
    if (!userBond) policy.maxBond = 32;

    std::vector<OraclePoint> points;
    const double h0s[] = {0.5, 2.0, 2.0 * std::numbers::sqrt2, 4.0};
    for (int n : {6, 8, 10}) {
        for (double h0 : h0s) {
            char label[48];
            std::snprintf(label, sizeof(label), "staggered h0=%.6g", h0);
            points.push_back({n, xy::FieldSpec::staggered(h0), label});
        }
        points.push_back({n, xy::FieldSpec::gaussianRandom(0.5, 2), "gaussian sigma=0.5 seed=2"});
    }

    std::printf("TEBD (chi=%d) vs dense diagonalization, %zu points\n", policy.maxBond,
                points.size());
    std::printf("%3s  %-26s %-10s %-12s %-10s %s\n", "N", "field", "relE", "max|dm_par|",
                "max|dS|", "verdict");
    bool allPass = true;
    for (const OraclePoint& p : points) {
        xy::SpinChainModel model = xy::makeModel(p.field, p.n, config.axisAngle);
        xy::EdSolution exact = xy::denseGroundState(model);

        xy::MatrixProductState state =
            xy::initialState(model, config.biasAngle, config.masterSeed);
        xy::groundStateSearch(model, schedule, policy, state);

        const double relE = std::abs(xy::energy(state, model) - exact.e0) / std::abs(exact.e0);
        const Eigen::Matrix2cd par = xy::sigmaAlongAxis(config.axisAngle);
        const Eigen::VectorXd edPar = xy::edMagnetizationProfile(exact.ground, p.n,
                                                                 config.axisAngle);
        double dm = 0.0, dS = 0.0;
        for (int i = 1; i <= p.n; ++i)
            dm = std::max(dm, std::abs(state.expectationOneSite(i, par) - edPar(i - 1)));
        for (int b = 1; b < p.n; ++b)
            dS = std::max(dS, std::abs(state.blockEntropy(b) - xy::edBlockEntropy(exact.ground,
                                                                                  p.n, b)));
        const bool pass = relE < kOracleRelEnergyTol && dm < kOracleMagnetizationTol &&
                          dS < kOracleEntropyTol;
        allPass = allPass && pass;
        std::printf("%3d  %-26s %-10.3g %-12.3g %-10.3g %s\n", p.n, p.label.c_str(), relE, dm,
                    dS, pass ? "pass" : "FAIL");
    }
    std::printf("%s\n", allPass ? "all points pass" : "CHECK FAILED");
    return allPass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    setenv("OPENBLAS_NUM_THREADS", "1", 1);  // before the first LAPACK call

    CLI::App app{"ground states of spin-1/2 XY chains in site-dependent in-plane fields"};
    app.require_subcommand(1);

    CommonOpts single, ensemble, sweep, analyze, oracle;
    CLI::App* runCmd = app.add_subcommand("run", "one ground-state run from the config");
    addConfigFlags(runCmd, single);
    addRunFlags(runCmd, single);
    CLI::App* ensembleCmd =
        app.add_subcommand("ensemble", "disorder ensemble at fixed parameters");
    addConfigFlags(ensembleCmd, ensemble);
    addRunFlags(ensembleCmd, ensemble);
    CLI::App* sweepCmd = app.add_subcommand("sweep", "sweep the field parameter");
    addConfigFlags(sweepCmd, sweep);
    addRunFlags(sweepCmd, sweep);
    CLI::App* analyzeCmd =
        app.add_subcommand("analyze", "fit written profiles and emit fits.json");
    addConfigFlags(analyzeCmd, analyze);
    CLI::App* oracleCmd =
        app.add_subcommand("oracle-check", "compare TEBD against exact diagonalization");
    addConfigFlags(oracleCmd, oracle);

    CLI11_PARSE(app, argc, argv);

    try {
        if (runCmd->parsed()) return runCommand(single, xy::RunMode::Single);
        if (ensembleCmd->parsed()) return runCommand(ensemble, xy::RunMode::Ensemble);
        if (sweepCmd->parsed()) return runCommand(sweep, xy::RunMode::Sweep);
        if (analyzeCmd->parsed()) return analyzeCommand(analyze);
        if (oracleCmd->parsed()) return oracleCheckCommand(oracle);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
