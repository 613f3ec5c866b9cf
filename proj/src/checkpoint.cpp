#include "xy/checkpoint.hpp"

#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "xy/format.hpp"

// Payload layout after the JSON header: every bond spectrum as raw doubles,
// then every site tensor (both physical components, column-major
// complex<double>). Native byte order; checkpoints are host-local artifacts,
// not an interchange format.

namespace xy {

namespace {

constexpr char kMagic[8] = {'X', 'Y', 'M', 'P', 'S', 'C', 'K', '1'};
constexpr int kSchemaVersion = 1;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void writeRaw(std::ofstream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void readRaw(std::ifstream& in, void* data, std::size_t bytes) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes)
        throw std::runtime_error("checkpoint truncated");
}

}  // namespace

std::string modelHash(const SpinChainModel& model) {
    std::string canon = "n=" + std::to_string(model.n) +
                        ";axis=" + formatShortest(model.field.axisAngle) + ";h=";
    for (int i = 0; i < model.n; ++i) {
        if (i) canon += ',';
        canon += formatShortest(model.field.values[i]);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canon)));
    return std::string(buf);
}

void writeCheckpoint(const std::filesystem::path& path, const MatrixProductState& state,
                     const RunDiagnostics& diagnostics, const SpinChainModel& model) {
    const int n = state.siteCount();
    nlohmann::json header;
    header["schema_version"] = kSchemaVersion;
    header["n"] = n;
    header["model_hash"] = modelHash(model);
    std::vector<int> bondDims(n + 1);
    for (int b = 0; b <= n; ++b) bondDims[b] = state.bondDim(b);
    header["bond_dims"] = bondDims;
    header["canonical"] = state.isCanonical();
    header["diagnostics"] = {{"final_energy", diagnostics.finalEnergy},
                             {"energy_history", diagnostics.energyHistory},
                             {"total_discarded_weight", diagnostics.totalDiscardedWeight},
                             {"sweeps_used", diagnostics.sweepsUsed},
                             {"converged", diagnostics.converged},
                             {"max_bond_reached", diagnostics.maxBondReached},
                             {"truncation_alarm", diagnostics.truncationAlarm}};
    const std::string headerText = header.dump();

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        writeRaw(out, kMagic, sizeof(kMagic));
        const std::uint64_t len = headerText.size();
        writeRaw(out, &len, sizeof(len));
        writeRaw(out, headerText.data(), headerText.size());
        for (int b = 1; b <= n - 1; ++b) {
            const Eigen::VectorXd& lam = state.schmidtSpectrum(b);
            writeRaw(out, lam.data(), sizeof(double) * lam.size());
        }
        for (int i = 1; i <= n; ++i)
            for (int s = 0; s < 2; ++s) {
                const Eigen::MatrixXcd& m = state.siteTensor(i)[s];
                writeRaw(out, m.data(), sizeof(std::complex<double>) * m.size());
            }
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint readCheckpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
    char magic[8];
    readRaw(in, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error(path.string() + " is not a checkpoint file");
    std::uint64_t len = 0;
    readRaw(in, &len, sizeof(len));
    if (len > (1u << 26)) throw std::runtime_error("checkpoint header implausibly large");
    std::string headerText(len, '\0');
    readRaw(in, headerText.data(), len);
    nlohmann::json header = nlohmann::json::parse(headerText);
    if (header.at("schema_version").get<int>() != kSchemaVersion)
        throw std::runtime_error("unsupported checkpoint schema version");

    const int n = header.at("n").get<int>();
    std::vector<int> bondDims = header.at("bond_dims").get<std::vector<int>>();
    if (static_cast<int>(bondDims.size()) != n + 1)
        throw std::runtime_error("checkpoint bond dimension table corrupt");

    MatrixProductState state = MatrixProductState::productState(
        std::vector<Eigen::Vector2cd>(n, Eigen::Vector2cd(1.0, 0.0)));
    for (int b = 1; b <= n - 1; ++b) {
        Eigen::VectorXd lam(bondDims[b]);
        readRaw(in, lam.data(), sizeof(double) * lam.size());
        state.setSchmidtSpectrum(b, std::move(lam));
    }
    for (int i = 1; i <= n; ++i) {
        MatrixProductState::SiteTensor t;
        for (int s = 0; s < 2; ++s) {
            t[s].resize(bondDims[i - 1], bondDims[i]);
            readRaw(in, t[s].data(), sizeof(std::complex<double>) * t[s].size());
        }
        state.setSiteTensor(i, std::move(t));
    }
    state.setCanonicalFlag(header.at("canonical").get<bool>());

    const nlohmann::json& d = header.at("diagnostics");
    RunDiagnostics diag;
    diag.finalEnergy = d.at("final_energy").get<double>();
    diag.energyHistory = d.at("energy_history").get<std::vector<double>>();
    diag.totalDiscardedWeight = d.at("total_discarded_weight").get<double>();
    diag.sweepsUsed = d.at("sweeps_used").get<long>();
    diag.converged = d.at("converged").get<bool>();
    diag.maxBondReached = d.at("max_bond_reached").get<int>();
    diag.truncationAlarm = d.at("truncation_alarm").get<bool>();

    return Checkpoint{std::move(state), std::move(diag),
                      header.at("model_hash").get<std::string>()};
}

}  // namespace xy
