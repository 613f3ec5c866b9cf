#include "xy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "xy/checkpoint.hpp"
#include "xy/format.hpp"
#include "xy/rng.hpp"

namespace xy {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- config --

json fieldSpecJson(const FieldSpec& f) {
    switch (f.kind) {
        case FieldSpec::Kind::Uniform:
            return {{"type", "uniform"}, {"h", f.strength}};
        case FieldSpec::Kind::Staggered:
            return {{"type", "staggered"}, {"h0", f.strength}};
        case FieldSpec::Kind::Sinusoidal:
            return {{"type", "sinusoidal"}, {"h", f.strength}, {"k", f.waveNumber}};
        case FieldSpec::Kind::GaussianRandom:
            return {{"type", "gaussian"}, {"sigma", f.sigma}, {"seed", f.seed}};
        case FieldSpec::Kind::Explicit:
            return {{"type", "explicit"}, {"values", f.values}};
    }
    throw std::logic_error("unreachable field kind");
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

void requireKeys(const json& obj, const std::string& path,
                 const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

double numberAt(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing");
    if (!obj.at(key).is_number()) fail(path + "." + key, "must be a number");
    return obj.at(key).get<double>();
}

// Seeds are uint64; accept any non-negative integer representation.
std::uint64_t seedAt(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing");
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(path + "." + key, "must be a non-negative integer");
}

// Objects merge member-wise (user wins); scalars and arrays replace. The
// field and sweep blocks replace wholesale so switching the field type does
// not inherit stale parameters from the default.
void deepMerge(json& base, const json& user, const std::string& path) {
    if (!base.is_object() || !user.is_object() || path == "model.field" ||
        path == "model.sweep") {
        base = user;
        return;
    }
    for (const auto& [key, value] : user.items()) {
        const std::string sub = path.empty() ? key : path + "." + key;
        if (base.contains(key))
            deepMerge(base[key], value, sub);
        else
            base[key] = value;
    }
}

FieldSpec parseFieldSpec(const json& f, const std::string& path) {
    if (!f.is_object() || !f.contains("type") || !f.at("type").is_string())
        fail(path, "needs a string 'type'");
    const std::string type = f.at("type").get<std::string>();
    if (type == "uniform") {
        requireKeys(f, path, {"type", "h"});
        return FieldSpec::uniform(numberAt(f, path, "h"));
    }
    if (type == "staggered") {
        requireKeys(f, path, {"type", "h0"});
        return FieldSpec::staggered(numberAt(f, path, "h0"));
    }
    if (type == "sinusoidal") {
        requireKeys(f, path, {"type", "h", "k"});
        const double k = numberAt(f, path, "k");
        if (!(k > 0.0 && k <= std::numbers::pi)) fail(path + ".k", "must lie in (0, pi]");
        return FieldSpec::sinusoidal(numberAt(f, path, "h"), k);
    }
    if (type == "gaussian") {
        requireKeys(f, path, {"type", "sigma", "seed"});
        const double sigma = numberAt(f, path, "sigma");
        if (sigma < 0.0) fail(path + ".sigma", "must be >= 0");
        return FieldSpec::gaussianRandom(sigma, seedAt(f, path, "seed"));
    }
    if (type == "explicit") {
        requireKeys(f, path, {"type", "values"});
        if (!f.contains("values") || !f.at("values").is_array())
            fail(path + ".values", "must be an array of numbers");
        return FieldSpec::explicitValues(f.at("values").get<std::vector<double>>());
    }
    fail(path + ".type", "unknown field type '" + type +
                             "' (uniform|staggered|sinusoidal|gaussian|explicit)");
}

std::string fieldTypeName(FieldSpec::Kind kind) {
    switch (kind) {
        case FieldSpec::Kind::Uniform: return "uniform";
        case FieldSpec::Kind::Staggered: return "staggered";
        case FieldSpec::Kind::Sinusoidal: return "sinusoidal";
        case FieldSpec::Kind::GaussianRandom: return "gaussian";
        case FieldSpec::Kind::Explicit: return "explicit";
    }
    return "?";
}

double primaryValue(const FieldSpec& f) {
    switch (f.kind) {
        case FieldSpec::Kind::Uniform:
        case FieldSpec::Kind::Staggered:
        case FieldSpec::Kind::Sinusoidal: return f.strength;
        case FieldSpec::Kind::GaussianRandom: return f.sigma;
        case FieldSpec::Kind::Explicit: return 0.0;
    }
    return 0.0;
}

// Which field types each sweep parameter applies to.
bool sweepMatchesField(const std::string& parameter, FieldSpec::Kind kind) {
    if (parameter == "h0") return kind == FieldSpec::Kind::Staggered;
    if (parameter == "h")
        return kind == FieldSpec::Kind::Uniform || kind == FieldSpec::Kind::Sinusoidal;
    if (parameter == "sigma") return kind == FieldSpec::Kind::GaussianRandom;
    return false;
}

FieldSpec withSweepValue(FieldSpec f, const std::string& parameter, double value) {
    if (parameter.empty()) return f;
    if (parameter == "sigma")
        f.sigma = value;
    else
        f.strength = value;
    return f;
}

}  // namespace

json defaultConfigJson() {
    ExperimentConfig d;
    json doc;
    doc["schemaVersion"] = kSchemaVersion;
    doc["model"] = {{"n", d.n}, {"axisAngle", d.axisAngle}, {"field", fieldSpecJson(d.field)}};
    json stages = json::array();
    for (const EvolutionStage& st : d.schedule.stages)
        stages.push_back({{"stepSize", st.stepSize},
                          {"maxSweeps", st.maxSweeps},
                          {"tolPerSite", st.energyTolPerSite}});
    doc["engine"] = {{"schedule", stages},
                     {"maxBond", d.policy.maxBond},
                     {"weightCutoff", d.policy.weightCutoff},
                     {"keepDegenerate", d.policy.keepDegenerate},
                     {"biasAngle", d.biasAngle},
                     {"warmStart", d.warmStart},
                     {"discardAlarm", d.schedule.discardAlarmThreshold}};
    doc["ensemble"] = {{"masterSeed", d.masterSeed}, {"realizations", d.realizations}};
    doc["analysis"] = {{"boundaryExclusion", nullptr},  // null = min(4, (n-1)/2)
                       {"islandFloor", d.islandFloor},
                       {"computeXi", d.computeXi}};
    doc["output"] = {{"directory", d.directory.string()},
                     {"formats", json::array({"csv", "profiles"})},
                     {"emitTimings", d.emitTimings},
                     {"writeCheckpoints", d.writeCheckpoints}};
    return doc;
}

ExperimentConfig configFromJson(const json& userDoc) {
    json doc = defaultConfigJson();
    deepMerge(doc, userDoc, "");

    requireKeys(doc, "<root>",
                {"schemaVersion", "model", "engine", "ensemble", "analysis", "output"});
    if (!doc.at("schemaVersion").is_number_integer() ||
        doc.at("schemaVersion").get<int>() != kSchemaVersion)
        fail("schemaVersion", "expected " + std::to_string(kSchemaVersion));

    ExperimentConfig c;

    const json& model = doc.at("model");
    requireKeys(model, "model", {"n", "axisAngle", "field", "sweep"});
    const double nRaw = numberAt(model, "model", "n");
    if (nRaw != std::floor(nRaw) || nRaw < 2) fail("model.n", "must be an integer >= 2");
    c.n = static_cast<int>(nRaw);
    c.axisAngle = numberAt(model, "model", "axisAngle");
    c.field = parseFieldSpec(model.at("field"), "model.field");
    if (c.field.kind == FieldSpec::Kind::Explicit &&
        static_cast<int>(c.field.values.size()) != c.n)
        fail("model.field.values", "needs exactly n = " + std::to_string(c.n) + " entries");
    if (model.contains("sweep")) {
        const json& sweep = model.at("sweep");
        requireKeys(sweep, "model.sweep", {"parameter", "values"});
        if (!sweep.contains("parameter") || !sweep.at("parameter").is_string())
            fail("model.sweep.parameter", "must be a string");
        c.sweepParameter = sweep.at("parameter").get<std::string>();
        if (!sweepMatchesField(c.sweepParameter, c.field.kind))
            fail("model.sweep.parameter", "'" + c.sweepParameter + "' does not apply to a " +
                                              fieldTypeName(c.field.kind) + " field");
        if (!sweep.contains("values") || !sweep.at("values").is_array() ||
            sweep.at("values").empty())
            fail("model.sweep.values", "must be a non-empty array of numbers");
        c.sweepValues = sweep.at("values").get<std::vector<double>>();
        std::vector<double> sortedValues = c.sweepValues;
        std::sort(sortedValues.begin(), sortedValues.end());
        if (std::adjacent_find(sortedValues.begin(), sortedValues.end()) != sortedValues.end())
            fail("model.sweep.values", "contains duplicate entries");
    }

    const json& engine = doc.at("engine");
    requireKeys(engine, "engine",
                {"schedule", "maxBond", "weightCutoff", "keepDegenerate", "biasAngle",
                 "warmStart", "discardAlarm"});
    const json& schedule = engine.at("schedule");
    if (!schedule.is_array() || schedule.empty())
        fail("engine.schedule", "must be a non-empty array of stages");
    c.schedule.stages.clear();
    double prevStep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const std::string path = "engine.schedule[" + std::to_string(i) + "]";
        const json& st = schedule[i];
        requireKeys(st, path, {"stepSize", "maxSweeps", "tolPerSite"});
        EvolutionStage stage;
        stage.stepSize = numberAt(st, path, "stepSize");
        const double sweeps = numberAt(st, path, "maxSweeps");
        if (sweeps != std::floor(sweeps) || sweeps < 1)
            fail(path + ".maxSweeps", "must be an integer >= 1");
        stage.maxSweeps = static_cast<int>(sweeps);
        stage.energyTolPerSite = numberAt(st, path, "tolPerSite");
        if (!(stage.stepSize > 0.0 && stage.stepSize < prevStep))
            fail(path + ".stepSize", "steps must be positive and strictly decreasing");
        if (!(stage.energyTolPerSite > 0.0)) fail(path + ".tolPerSite", "must be > 0");
        prevStep = stage.stepSize;
        c.schedule.stages.push_back(stage);
    }
    const double maxBond = numberAt(engine, "engine", "maxBond");
    if (maxBond != std::floor(maxBond) || maxBond < 1)
        fail("engine.maxBond", "must be an integer >= 1");
    c.policy.maxBond = static_cast<int>(maxBond);
    c.policy.weightCutoff = numberAt(engine, "engine", "weightCutoff");
    if (!(c.policy.weightCutoff >= 0.0 && c.policy.weightCutoff < 1.0))
        fail("engine.weightCutoff", "must lie in [0, 1)");
    if (!engine.at("keepDegenerate").is_boolean()) fail("engine.keepDegenerate", "must be a bool");
    c.policy.keepDegenerate = engine.at("keepDegenerate").get<bool>();
    c.biasAngle = numberAt(engine, "engine", "biasAngle");
    if (!(std::abs(c.biasAngle) <= std::numbers::pi))
        fail("engine.biasAngle", "must lie in [-pi, pi] (negative = bias toward -perp)");
    if (!engine.at("warmStart").is_boolean()) fail("engine.warmStart", "must be a bool");
    c.warmStart = engine.at("warmStart").get<bool>();
    c.schedule.discardAlarmThreshold = numberAt(engine, "engine", "discardAlarm");
    if (!(c.schedule.discardAlarmThreshold > 0.0)) fail("engine.discardAlarm", "must be > 0");

    const json& ensemble = doc.at("ensemble");
    requireKeys(ensemble, "ensemble", {"masterSeed", "realizations", "seeds"});
    c.masterSeed = seedAt(ensemble, "ensemble", "masterSeed");
    const double realizations = numberAt(ensemble, "ensemble", "realizations");
    if (realizations != std::floor(realizations) || realizations < 1)
        fail("ensemble.realizations", "must be an integer >= 1");
    c.realizations = static_cast<int>(realizations);
    if (ensemble.contains("seeds")) {
        if (!ensemble.at("seeds").is_array() || ensemble.at("seeds").empty())
            fail("ensemble.seeds", "must be a non-empty array");
        for (const json& s : ensemble.at("seeds")) {
            if (s.is_number_unsigned()) continue;
            if (s.is_number_integer() && s.get<std::int64_t>() >= 0) continue;
            fail("ensemble.seeds", "entries must be non-negative integers");
        }
        c.seeds = ensemble.at("seeds").get<std::vector<std::uint64_t>>();
        if (c.realizations != 1 && c.realizations != static_cast<int>(c.seeds.size()))
            fail("ensemble.realizations", "conflicts with the seeds list length");
        c.realizations = static_cast<int>(c.seeds.size());
    }

    const json& analysis = doc.at("analysis");
    requireKeys(analysis, "analysis", {"boundaryExclusion", "islandFloor", "computeXi"});
    if (analysis.at("boundaryExclusion").is_null()) {
        c.boundaryExclusion = std::min(4, (c.n - 1) / 2);
    } else {
        const double excl = numberAt(analysis, "analysis", "boundaryExclusion");
        if (excl != std::floor(excl) || excl < 0 || 2 * excl >= c.n)
            fail("analysis.boundaryExclusion", "must be an integer in [0, n/2) (null = automatic)");
        c.boundaryExclusion = static_cast<int>(excl);
    }
    c.islandFloor = numberAt(analysis, "analysis", "islandFloor");
    if (!(c.islandFloor > 0.0)) fail("analysis.islandFloor", "must be > 0");
    if (!analysis.at("computeXi").is_boolean()) fail("analysis.computeXi", "must be a bool");
    c.computeXi = analysis.at("computeXi").get<bool>();

    const json& output = doc.at("output");
    requireKeys(output, "output",
                {"directory", "formats", "emitTimings", "writeCheckpoints"});
    if (!output.at("directory").is_string()) fail("output.directory", "must be a string");
    c.directory = output.at("directory").get<std::string>();
    if (!output.at("formats").is_array()) fail("output.formats", "must be an array");
    c.writeCsv = false;
    c.writeProfiles = false;
    for (const json& f : output.at("formats")) {
        if (!f.is_string()) fail("output.formats", "entries must be strings");
        const std::string name = f.get<std::string>();
        if (name == "csv")
            c.writeCsv = true;
        else if (name == "profiles")
            c.writeProfiles = true;
        else
            fail("output.formats", "unknown format '" + name + "' (csv|profiles)");
    }
    if (!output.at("emitTimings").is_boolean()) fail("output.emitTimings", "must be a bool");
    c.emitTimings = output.at("emitTimings").get<bool>();
    if (!output.at("writeCheckpoints").is_boolean())
        fail("output.writeCheckpoints", "must be a bool");
    c.writeCheckpoints = output.at("writeCheckpoints").get<bool>();

    if (c.warmStart && c.realizations > 1 && c.field.kind == FieldSpec::Kind::GaussianRandom)
        fail("engine.warmStart", "warm starts across disorder realizations are not meaningful");
    return c;
}

ExperimentConfig loadConfig(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config " + path.string() + ": " + e.what());
    }
    return configFromJson(doc);
}

void applyOverride(json& doc, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("override must look like key.path=value: " + assignment);
    std::string pointer = "/" + assignment.substr(0, eq);
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare strings stay strings
    }
    doc[json::json_pointer(pointer)] = value;
}

std::uint64_t runSeedFor(const ExperimentConfig& config, int realization) {
    if (!config.seeds.empty()) {
        if (realization < 0 || realization >= static_cast<int>(config.seeds.size()))
            throw std::out_of_range("realization index outside the seeds list");
        return config.seeds[realization];
    }
    return rng::deriveSeed(config.masterSeed, static_cast<std::uint64_t>(realization));
}

namespace {

// ------------------------------------------------------------------ runs --

bool ensembleDrivesFieldSeed(const ExperimentConfig& config) {
    return config.realizations > 1 || !config.seeds.empty();
}

std::string runId(double sweepValue, std::uint64_t seed) {
    return "sv" + formatShortest(sweepValue) + "_s" + std::to_string(seed);
}

std::string configHash(const ExperimentConfig& config, const SpinChainModel& model,
                       std::uint64_t initSeed) {
    std::string canon = modelHash(model) + ";sched=";
    for (const EvolutionStage& st : config.schedule.stages)
        canon += formatShortest(st.stepSize) + ":" + std::to_string(st.maxSweeps) + ":" +
                 formatShortest(st.energyTolPerSite) + ",";
    canon += ";chi=" + std::to_string(config.policy.maxBond);
    canon += ";cut=" + formatShortest(config.policy.weightCutoff);
    canon += ";deg=" + std::to_string(config.policy.keepDegenerate ? 1 : 0);
    canon += ";bias=" + formatShortest(config.biasAngle);
    canon += ";warm=" + std::to_string(config.warmStart ? 1 : 0);
    canon += ";init=" + std::to_string(initSeed);
    canon += ";excl=" + std::to_string(config.boundaryExclusion);
    canon += ";xi=" + std::to_string(config.computeXi ? 1 : 0);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

SpinChainModel modelForRun(const ExperimentConfig& config, double sweepValue,
                           std::uint64_t runSeed) {
    FieldSpec spec = withSweepValue(config.field, config.sweepParameter, sweepValue);
    if (spec.kind == FieldSpec::Kind::GaussianRandom && ensembleDrivesFieldSeed(config))
        spec.seed = rng::deriveSeed(runSeed, 0);
    return makeModel(spec, config.n, config.axisAngle);
}

RunOutput runCore(const ExperimentConfig& config, double sweepValue, std::uint64_t runSeed,
                  const MatrixProductState* warmInit,
                  std::optional<MatrixProductState>* keepState = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    SpinChainModel model = modelForRun(config, sweepValue, runSeed);
    const std::uint64_t initSeed = rng::deriveSeed(runSeed, 1);
    MatrixProductState state =
        warmInit ? *warmInit : initialState(model, config.biasAngle, initSeed);
    RunDiagnostics diag = groundStateSearch(model, config.schedule, config.policy, state);
    ObservableRecord rec = measureRecord(state, model, config.boundaryExclusion);

    RunOutput out{ResultRow{}, std::move(rec), std::move(diag)};
    out.row.sweepValue = sweepValue;
    out.row.seed = runSeed;
    out.row.energy = out.diagnostics.finalEnergy;
    out.row.meanMParallel = out.record.meanMParallel;
    out.row.meanMPerp = out.record.meanMPerp;
    out.row.meanAbsMPerp = out.record.meanAbsMPerp;
    out.row.midEntropy = out.record.midEntropy();
    if (config.computeXi) {
        std::optional<CorrelationFit> fit =
            correlationLength(state, model.field.axisAngle, config.boundaryExclusion);
        if (fit) out.row.xi = fit->xi;
    }
    out.row.converged = out.diagnostics.converged;
    out.row.discardedWeight = out.diagnostics.totalDiscardedWeight;
    out.row.wallTime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (config.writeCheckpoints) {
        std::filesystem::path dir = config.directory / "checkpoints";
        std::filesystem::create_directories(dir);
        writeCheckpoint(dir / (runId(sweepValue, runSeed) + ".ck"), state, out.diagnostics,
                        model);
    }
    if (keepState) *keepState = std::move(state);
    return out;
}

json profileJson(const ExperimentConfig& config, const RunOutput& out,
                 const SpinChainModel& model, std::uint64_t initSeed) {
    json doc;
    doc["schemaVersion"] = kSchemaVersion;
    doc["id"] = runId(out.row.sweepValue, out.row.seed);
    doc["sweepValue"] = out.row.sweepValue;
    doc["seed"] = out.row.seed;
    doc["sweepParameter"] = config.sweepParameter;
    doc["fieldType"] = fieldTypeName(config.field.kind);
    doc["configHash"] = configHash(config, model, initSeed);
    doc["model"] = {{"n", model.n},
                    {"axisAngle", model.field.axisAngle},
                    {"fieldValues", std::vector<double>(model.field.values.begin(),
                                                        model.field.values.end())}};
    json result;
    result["energy"] = out.row.energy;
    result["meanMParallel"] = out.row.meanMParallel;
    result["meanMPerp"] = out.row.meanMPerp;
    result["meanAbsMPerp"] = out.row.meanAbsMPerp;
    result["midEntropy"] = out.row.midEntropy;
    if (out.row.xi)
        result["xi"] = *out.row.xi;
    else
        result["xi"] = nullptr;
    result["converged"] = out.row.converged;
    result["discardedWeight"] = out.row.discardedWeight;
    result["sweepsUsed"] = out.diagnostics.sweepsUsed;
    result["maxBondReached"] = out.diagnostics.maxBondReached;
    result["truncationAlarm"] = out.diagnostics.truncationAlarm;
    result["boundaryExclusion"] = config.boundaryExclusion;
    result["islandFloor"] = config.islandFloor;
    if (config.emitTimings) result["wallTime"] = out.row.wallTime;
    doc["result"] = std::move(result);
    doc["profiles"] = {
        {"mParallel",
         std::vector<double>(out.record.mParallel.begin(), out.record.mParallel.end())},
        {"mPerp", std::vector<double>(out.record.mPerp.begin(), out.record.mPerp.end())},
        {"entropy", std::vector<double>(out.record.entropyProfile.begin(),
                                        out.record.entropyProfile.end())}};
    return doc;
}

void writeTextAtomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::optional<ResultRow> rowFromProfile(const json& doc) {
    if (!doc.is_object() || doc.value("schemaVersion", -1) != kSchemaVersion) return std::nullopt;
    if (doc.contains("error")) return std::nullopt;
    ResultRow row;
    row.sweepValue = doc.at("sweepValue").get<double>();
    row.seed = doc.at("seed").get<std::uint64_t>();
    const json& r = doc.at("result");
    row.energy = r.at("energy").get<double>();
    row.meanMParallel = r.at("meanMParallel").get<double>();
    row.meanMPerp = r.at("meanMPerp").get<double>();
    row.meanAbsMPerp = r.at("meanAbsMPerp").get<double>();
    row.midEntropy = r.at("midEntropy").get<double>();
    if (!r.at("xi").is_null()) row.xi = r.at("xi").get<double>();
    row.converged = r.at("converged").get<bool>();
    row.discardedWeight = r.at("discardedWeight").get<double>();
    row.wallTime = r.value("wallTime", 0.0);
    return row;
}

struct Task {
    double sweepValue;
    std::uint64_t runSeed;
    int realization;
};

std::vector<Task> expandTasks(const ExperimentConfig& config, RunMode mode) {
    std::vector<Task> tasks;
    const bool hasSweep = !config.sweepValues.empty();
    switch (mode) {
        case RunMode::Single:
            if (hasSweep)
                throw std::invalid_argument(
                    "config defines a sweep; use the sweep command (or drop model.sweep)");
            if (config.realizations > 1)
                throw std::invalid_argument(
                    "config defines an ensemble; use the ensemble command");
            tasks.push_back({primaryValue(config.field), runSeedFor(config, 0), 0});
            break;
        case RunMode::Ensemble:
            if (hasSweep)
                throw std::invalid_argument("config defines a sweep; use the sweep command");
            for (int k = 0; k < config.realizations; ++k)
                tasks.push_back({primaryValue(config.field), runSeedFor(config, k), k});
            break;
        case RunMode::Sweep: {
            if (!hasSweep)
                throw std::invalid_argument("config defines no model.sweep block");
            std::vector<double> values = config.sweepValues;
            std::sort(values.begin(), values.end());
            for (double v : values)
                for (int k = 0; k < config.realizations; ++k)
                    tasks.push_back({v, runSeedFor(config, k), k});
            break;
        }
    }
    return tasks;
}

}  // namespace

RunOutput executeRun(const ExperimentConfig& config, double sweepValue, std::uint64_t runSeed) {
    return runCore(config, sweepValue, runSeed, nullptr);
}

std::string csvHeader(bool emitTimings) {
    std::string h =
        "sweepValue,seed,energy,meanMParallel,meanMPerp,meanAbsMPerp,midEntropy,xi,"
        "converged,discardedWeight";
    if (emitTimings) h += ",wallTime";
    return h;
}

std::string csvLine(const ResultRow& row, bool emitTimings) {
    std::string line = formatShortest(row.sweepValue) + "," + std::to_string(row.seed) + "," +
                       formatShortest(row.energy) + "," + formatShortest(row.meanMParallel) +
                       "," + formatShortest(row.meanMPerp) + "," +
                       formatShortest(row.meanAbsMPerp) + "," + formatShortest(row.midEntropy) +
                       ",";
    if (row.xi) line += formatShortest(*row.xi);
    line += ",";
    line += row.converged ? "1" : "0";
    line += "," + formatShortest(row.discardedWeight);
    if (emitTimings) line += "," + formatShortest(row.wallTime);
    return line;
}

SweepResult runSweep(const ExperimentConfig& config, RunMode mode, int workers, bool resume) {
    if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
    if (config.warmStart && resume)
        throw std::invalid_argument(
            "warm-started sweeps cannot resume (intermediate states are not stored); "
            "rerun without --resume");

    std::vector<Task> tasks = expandTasks(config, mode);
    const std::filesystem::path profileDir = config.directory / "profiles";
    if (config.writeProfiles) std::filesystem::create_directories(profileDir);

    SweepResult result;
    result.rows.resize(tasks.size());
    std::vector<char> pending(tasks.size(), 1);

    // Resume: adopt rows from existing, hash-matching profiles.
    if (resume && config.writeProfiles) {
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            const std::filesystem::path path =
                profileDir / (runId(tasks[t].sweepValue, tasks[t].runSeed) + ".json");
            std::ifstream in(path);
            if (!in) continue;
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::parse_error&) {
                continue;  // half-written or corrupt: recompute
            }
            SpinChainModel model =
                modelForRun(config, tasks[t].sweepValue, tasks[t].runSeed);
            const std::uint64_t initSeed = rng::deriveSeed(tasks[t].runSeed, 1);
            if (doc.value("configHash", "") != configHash(config, model, initSeed)) continue;
            std::optional<ResultRow> row = rowFromProfile(doc);
            if (!row) continue;
            result.rows[t] = *row;
            pending[t] = 0;
            ++result.resumed;
        }
    }

    auto writeProfile = [&](const Task& task, const RunOutput& out) {
        if (!config.writeProfiles) return;
        SpinChainModel model = modelForRun(config, task.sweepValue, task.runSeed);
        writeTextAtomic(profileDir / (runId(task.sweepValue, task.runSeed) + ".json"),
                        profileJson(config, out, model, rng::deriveSeed(task.runSeed, 1)).dump(2) +
                            "\n");
    };
    auto recordFailure = [&](std::size_t t, const std::string& what) {
        const Task& task = tasks[t];
        ResultRow row;
        row.sweepValue = task.sweepValue;
        row.seed = task.runSeed;
        row.energy = std::numeric_limits<double>::quiet_NaN();
        row.meanMParallel = row.meanMPerp = row.meanAbsMPerp = row.midEntropy =
            std::numeric_limits<double>::quiet_NaN();
        row.discardedWeight = std::numeric_limits<double>::quiet_NaN();
        row.error = what;
        if (config.writeProfiles) {
            json doc;
            doc["schemaVersion"] = kSchemaVersion;
            doc["id"] = runId(task.sweepValue, task.runSeed);
            doc["sweepValue"] = task.sweepValue;
            doc["seed"] = task.runSeed;
            doc["error"] = what;
            writeTextAtomic(profileDir / (runId(task.sweepValue, task.runSeed) + ".json"),
                            doc.dump(2) + "\n");
        }
        result.rows[t] = std::move(row);
    };

    if (config.warmStart) {
        // Sequential chains: within each realization, ascending sweep values,
        // each run starting from the previous converged state.
        for (int k = 0; k < config.realizations; ++k) {
            std::optional<MatrixProductState> carry;
            for (std::size_t t = 0; t < tasks.size(); ++t) {
                if (tasks[t].realization != k || !pending[t]) continue;
                try {
                    std::optional<MatrixProductState> next;
                    RunOutput out = runCore(config, tasks[t].sweepValue, tasks[t].runSeed,
                                            carry ? &*carry : nullptr, &next);
                    writeProfile(tasks[t], out);
                    result.rows[t] = std::move(out.row);
                    carry = std::move(next);
                } catch (const std::exception& e) {
                    recordFailure(t, e.what());
                    carry.reset();  // do not warm-start past a failure
                }
                ++result.executed;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<int> executed{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t t = next.fetch_add(1);
                if (t >= tasks.size()) return;
                if (!pending[t]) continue;
                try {
                    RunOutput out = runCore(config, tasks[t].sweepValue, tasks[t].runSeed, nullptr);
                    writeProfile(tasks[t], out);
                    result.rows[t] = std::move(out.row);
                } catch (const std::exception& e) {
                    recordFailure(t, e.what());
                }
                executed.fetch_add(1);
            }
        };
        const int poolSize = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
        if (poolSize == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(poolSize);
            for (int w = 0; w < poolSize; ++w) pool.emplace_back(worker);
            for (std::thread& th : pool) th.join();
        }
        result.executed = executed.load();
    }

    std::sort(result.rows.begin(), result.rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.sweepValue != b.sweepValue) return a.sweepValue < b.sweepValue;
        return a.seed < b.seed;
    });

    if (config.writeCsv) {
        std::filesystem::create_directories(config.directory);
        std::string csv = "# schemaVersion=" + std::to_string(kSchemaVersion) + "\n" +
                          csvHeader(config.emitTimings) + "\n";
        for (const ResultRow& row : result.rows) csv += csvLine(row, config.emitTimings) + "\n";
        writeTextAtomic(config.directory / "results.csv", csv);
    }
    return result;
}

namespace {

ObservableRecord recordFromProfile(const json& doc) {
    ObservableRecord rec;
    const json& model = doc.at("model");
    rec.n = model.at("n").get<int>();
    rec.axisAngle = model.at("axisAngle").get<double>();
    std::vector<double> fv = model.at("fieldValues").get<std::vector<double>>();
    rec.fieldValues = Eigen::Map<const Eigen::VectorXd>(fv.data(), fv.size());
    const json& r = doc.at("result");
    rec.boundaryExclusion = r.at("boundaryExclusion").get<int>();
    rec.energy = r.at("energy").get<double>();
    rec.meanMParallel = r.at("meanMParallel").get<double>();
    rec.meanMPerp = r.at("meanMPerp").get<double>();
    rec.meanAbsMPerp = r.at("meanAbsMPerp").get<double>();
    const json& p = doc.at("profiles");
    std::vector<double> mp = p.at("mParallel").get<std::vector<double>>();
    std::vector<double> mt = p.at("mPerp").get<std::vector<double>>();
    std::vector<double> en = p.at("entropy").get<std::vector<double>>();
    rec.mParallel = Eigen::Map<const Eigen::VectorXd>(mp.data(), mp.size());
    rec.mPerp = Eigen::Map<const Eigen::VectorXd>(mt.data(), mt.size());
    rec.entropyProfile = Eigen::Map<const Eigen::VectorXd>(en.data(), en.size());
    return rec;
}

json powerLawJson(const PowerLawFit& f) {
    return {{"exponent", f.exponent},     {"exponentStdErr", f.exponentStdErr},
            {"prefactor", f.prefactor},   {"windowMin", f.windowMin},
            {"windowMax", f.windowMax},   {"residual", f.residual},
            {"pointCount", f.pointCount}};
}

}  // namespace

json analyzeOutputs(const std::filesystem::path& directory) {
    const std::filesystem::path profileDir = directory / "profiles";
    if (!std::filesystem::is_directory(profileDir))
        throw std::runtime_error("no profiles directory under " + directory.string());

    struct Entry {
        json doc;
        ResultRow row;
        ObservableRecord record;
    };
    std::vector<Entry> entries;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(profileDir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const std::filesystem::path& f : files) {
        std::ifstream in(f);
        json doc = json::parse(in);
        std::optional<ResultRow> row = rowFromProfile(doc);
        if (!row) continue;  // failed runs carry no analyzable data
        Entry entry{doc, *row, recordFromProfile(doc)};
        entries.push_back(std::move(entry));
    }
    if (entries.empty()) throw std::runtime_error("no readable profiles in " + profileDir.string());

    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.row.sweepValue != b.row.sweepValue) return a.row.sweepValue < b.row.sweepValue;
        return a.row.seed < b.row.seed;
    });

    json fits;
    fits["schemaVersion"] = kSchemaVersion;
    fits["runCount"] = entries.size();
    const std::string sweepParameter = entries.front().doc.value("sweepParameter", "");
    const std::string fieldType = entries.front().doc.value("fieldType", "");
    fits["sweepParameter"] = sweepParameter;
    fits["fieldType"] = fieldType;

    // Group by sweep value; ensemble-average within each group.
    std::map<double, std::vector<const Entry*>> groups;
    for (const Entry& e : entries) groups[e.row.sweepValue].push_back(&e);

    bool anyEnsemble = false;
    std::vector<double> values, meanPerp, meanAbsPerp;
    json ensembleRows = json::array();
    for (const auto& [value, group] : groups) {
        std::vector<ObservableRecord> records;
        for (const Entry* e : group) records.push_back(e->record);
        values.push_back(value);
        if (records.size() > 1) {
            anyEnsemble = true;
            DisorderAverage avg = disorderAverage(records);
            meanPerp.push_back(avg.bulkSigned);
            meanAbsPerp.push_back(avg.bulkAbs);
            ensembleRows.push_back({{"sweepValue", value},
                                    {"realizations", avg.realizations},
                                    {"bulkSigned", avg.bulkSigned},
                                    {"bulkSignedStdErr", avg.bulkSignedStdErr},
                                    {"bulkAbs", avg.bulkAbs},
                                    {"bulkAbsStdErr", avg.bulkAbsStdErr}});
        } else {
            meanPerp.push_back(records.front().meanMPerp);
            meanAbsPerp.push_back(records.front().meanAbsMPerp);
        }
    }
    if (anyEnsemble) fits["ensemble"] = ensembleRows;

    // Order-parameter exponent and onset for staggered-field sweeps.
    if (sweepParameter == "h0" && values.size() >= 4) {
        std::vector<double> xs;
        for (double v : values) xs.push_back(1.0 - v / kCriticalField);
        try {
            PowerLawFit beta = fitPowerLaw(xs, meanPerp, kBetaWindowMin, kBetaWindowMax);
            fits["beta"] = powerLawJson(beta);
            fits["beta"]["reference"] = kBetaReference;
        } catch (const std::invalid_argument&) {
        }
        std::optional<OnsetEstimate> onset = estimateOnsetField(values, meanPerp);
        if (onset)
            fits["onset"] = {{"criticalField", onset->criticalField},
                             {"pointCount", onset->pointCount},
                             {"reference", kCriticalField}};
    }

    // Central charge from (xi, mid-chain entropy) pairs.
    {
        std::vector<std::pair<double, double>> points;
        for (const Entry& e : entries)
            if (e.row.xi && *e.row.xi > 1.0) points.emplace_back(*e.row.xi, e.row.midEntropy);
        if (points.size() >= 4) {
            try {
                CentralChargeFit c = fitCentralCharge(points, CentralChargeMethod::EntropyVsXi);
                fits["centralCharge"] = {{"c", c.c},
                                         {"cStdErr", c.cStdErr},
                                         {"offset", c.offset},
                                         {"method", "entropy-vs-xi"},
                                         {"pointCount", points.size()}};
            } catch (const std::invalid_argument&) {
            }
        }
    }

    // Island statistics for spatially structured fields.
    if (fieldType == "sinusoidal" || fieldType == "gaussian") {
        json islandRows = json::array();
        std::vector<double> ivals, isizes, iamps;
        for (const auto& [value, group] : groups) {
            double sizeSum = 0.0, ampSum = 0.0;
            int count = 0;
            for (const Entry* e : group) {
                const double floor = e->doc.at("result").value("islandFloor", kIslandFloor);
                for (const IslandRecord& isl : detectIslands(e->record, floor)) {
                    islandRows.push_back({{"sweepValue", value},
                                          {"seed", e->row.seed},
                                          {"center", isl.centerIndex},
                                          {"size", isl.size},
                                          {"amplitude", isl.amplitude},
                                          {"sign", isl.sign}});
                    sizeSum += isl.size;
                    ampSum += isl.amplitude;
                    ++count;
                }
            }
            if (count > 0) {
                ivals.push_back(value);
                isizes.push_back(sizeSum / count);
                iamps.push_back(ampSum / count);
            }
        }
        fits["islands"] = islandRows;
        if (ivals.size() >= 4 && sweepParameter == "h") {
            const double lo = *std::min_element(ivals.begin(), ivals.end());
            const double hi = *std::max_element(ivals.begin(), ivals.end());
            try {
                fits["islandSizeFit"] = powerLawJson(fitPowerLaw(ivals, isizes, lo, hi));
                fits["islandAmplitudeFit"] = powerLawJson(fitPowerLaw(ivals, iamps, lo, hi));
            } catch (const std::invalid_argument&) {
            }
        }
    }

    writeTextAtomic(directory / "fits.json", fits.dump(2) + "\n");
    return fits;
}

}  // namespace xy
