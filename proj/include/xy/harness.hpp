#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xy/analysis.hpp"
#include "xy/model.hpp"
#include "xy/observables.hpp"
#include "xy/tebd.hpp"

// Batch experiment driver. A JSON config describes one experiment: the
// model, the evolution engine settings, an optional sweep over the field
// parameter, an optional seeded disorder ensemble, and output options.
// Outputs are deterministic: per-run profile JSON files are the source of
// truth (written atomically), and results.csv is rebuilt from the collected
// rows, sorted by (sweepValue, seed), every invocation. Re-running with
// --resume skips runs whose profile already exists with a matching
// configuration hash.

namespace xy {

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
    // model
    int n = 32;
    double axisAngle = 0.0;
    FieldSpec field = FieldSpec::staggered(2.0);
    std::string sweepParameter;       // "h0" | "h" | "sigma"; empty = no sweep
    std::vector<double> sweepValues;  // non-empty iff sweeping

    // engine
    EvolutionSchedule schedule = EvolutionSchedule::defaults();
    TruncationPolicy policy;
    double biasAngle = std::numbers::pi / 2;
    bool warmStart = false;

    // ensemble
    std::uint64_t masterSeed = 1;
    int realizations = 1;
    std::vector<std::uint64_t> seeds;  // explicit per-realization seeds (optional)

    // analysis
    int boundaryExclusion = 4;
    double islandFloor = kIslandFloor;
    bool computeXi = true;

    // output
    std::filesystem::path directory = "out";
    bool emitTimings = false;      // wall times vary run to run; opt-in
    bool writeCheckpoints = false;
    bool writeCsv = true;
    bool writeProfiles = true;
};

struct ResultRow {
    double sweepValue = 0.0;
    std::uint64_t seed = 0;
    double energy = 0.0;
    double meanMParallel = 0.0;
    double meanMPerp = 0.0;
    double meanAbsMPerp = 0.0;
    double midEntropy = 0.0;
    std::optional<double> xi;
    bool converged = false;
    double discardedWeight = 0.0;
    double wallTime = 0.0;  // seconds; written out only with emitTimings
    std::string error;      // non-empty when the run failed
};

enum class RunMode { Single, Ensemble, Sweep };

// Parse + validate a config document: defaults filled in, unknown keys
// rejected with their full path, range violations reported per field.
ExperimentConfig configFromJson(const nlohmann::json& doc);
ExperimentConfig loadConfig(const std::filesystem::path& path);
nlohmann::json defaultConfigJson();

// Apply a `--set key=value` override (dotted path, JSON-parsed value).
void applyOverride(nlohmann::json& doc, const std::string& assignment);

// Per-run seeds: realization k uses seeds[k] when given, otherwise
// splitmix-derived deriveSeed(masterSeed, k). Within a run, the disorder
// draw uses deriveSeed(runSeed, 0) and the initial state deriveSeed(runSeed, 1).
std::uint64_t runSeedFor(const ExperimentConfig& config, int realization);

// The library-level unit the harness schedules: one (sweepValue, seed) run.
struct RunOutput {
    ResultRow row;
    ObservableRecord record;
    RunDiagnostics diagnostics;
};
RunOutput executeRun(const ExperimentConfig& config, double sweepValue, std::uint64_t runSeed);

struct SweepResult {
    std::vector<ResultRow> rows;  // sorted by (sweepValue, seed)
    int executed = 0;             // freshly computed runs
    int resumed = 0;              // runs loaded from existing profiles
};

SweepResult runSweep(const ExperimentConfig& config, RunMode mode, int workers, bool resume);

// Analysis over previously written profiles: ensemble averages, order
// parameter fit + onset, central charge, islands — whichever the data
// supports. Returns the fits document (also written to fits.json).
nlohmann::json analyzeOutputs(const std::filesystem::path& directory);

std::string csvHeader(bool emitTimings);
std::string csvLine(const ResultRow& row, bool emitTimings);

}  // namespace xy
