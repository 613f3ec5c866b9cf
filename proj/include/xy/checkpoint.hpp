#pragma once

#include <filesystem>
#include <string>

#include "xy/model.hpp"
#include "xy/mps.hpp"
#include "xy/tebd.hpp"

// Binary run checkpoints: a JSON header (site count, bond dimensions,
// diagnostics, model hash) followed by the raw tensor payload. Writes go
// through a temporary file and an atomic rename, so a crash never leaves a
// half-written checkpoint behind.

namespace xy {

struct Checkpoint {
    MatrixProductState state;
    RunDiagnostics diagnostics;
    std::string modelHash;
};

// Stable hex digest of (N, axis angle, field profile); guards against
// resuming a state against a different Hamiltonian.
std::string modelHash(const SpinChainModel& model);

void writeCheckpoint(const std::filesystem::path& path, const MatrixProductState& state,
                     const RunDiagnostics& diagnostics, const SpinChainModel& model);

// Throws on missing file, bad magic, version or size mismatch.
Checkpoint readCheckpoint(const std::filesystem::path& path);

}  // namespace xy
