#include <filesystem>
#include <fstream>
#include <numbers>

#include <unistd.h>

#include "doctest.h"
#include "xy/checkpoint.hpp"
#include "xy/model.hpp"
#include "xy/tebd.hpp"

using namespace xy;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("xy-ckpt-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

MatrixProductState entangledState(const SpinChainModel& model) {
    MatrixProductState psi = initialState(model, pi / 2, 5);
    TruncationPolicy policy;
    policy.maxBond = 8;
    EvolutionSchedule s;
    s.stages = {{0.1, 120, 1e-9}};
    groundStateSearch(model, s, policy, psi);
    return psi;
}

}  // namespace

TEST_CASE("checkpoint round-trip is exact") {
    TempDir dir;
    SpinChainModel model = makeModel(FieldSpec::gaussianRandom(0.5, 7), 10, 0.4);
    MatrixProductState psi = entangledState(model);
    RunDiagnostics diag;
    diag.finalEnergy = energy(psi, model);
    diag.energyHistory = {-1.0, -2.0, diag.finalEnergy};
    diag.totalDiscardedWeight = 3.25e-11;
    diag.sweepsUsed = 120;
    diag.converged = true;
    diag.maxBondReached = psi.maxBondDim();

    fs::path file = dir.path / "run.ckpt";
    writeCheckpoint(file, psi, diag, model);
    Checkpoint loaded = readCheckpoint(file);

    CHECK(loaded.modelHash == modelHash(model));
    CHECK(loaded.diagnostics.finalEnergy == diag.finalEnergy);
    CHECK(loaded.diagnostics.sweepsUsed == 120);
    CHECK(loaded.diagnostics.converged);
    CHECK(loaded.diagnostics.totalDiscardedWeight == diag.totalDiscardedWeight);
    REQUIRE(loaded.diagnostics.energyHistory.size() == 3);
    CHECK(loaded.diagnostics.energyHistory[1] == -2.0);

    REQUIRE(loaded.state.siteCount() == psi.siteCount());
    // tensors and spectra restored bit for bit
    Eigen::VectorXcd a = psi.denseVector(), b = loaded.state.denseVector();
    for (int i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    for (int p = 1; p < psi.siteCount(); ++p) {
        const Eigen::VectorXd& sa = psi.schmidtSpectrum(p);
        const Eigen::VectorXd& sb = loaded.state.schmidtSpectrum(p);
        REQUIRE(sa.size() == sb.size());
        for (Eigen::Index k = 0; k < sa.size(); ++k) CHECK(sa[k] == sb[k]);
    }
    CHECK(loaded.state.isCanonical());
}

TEST_CASE("model hash separates different Hamiltonians") {
    SpinChainModel a = makeModel(FieldSpec::staggered(2.0), 10, 0.0);
    SpinChainModel b = makeModel(FieldSpec::staggered(2.0 + 1e-12), 10, 0.0);
    SpinChainModel c = makeModel(FieldSpec::staggered(2.0), 12, 0.0);
    SpinChainModel d = makeModel(FieldSpec::staggered(2.0), 10, 0.3);
    CHECK(modelHash(a) == modelHash(makeModel(FieldSpec::staggered(2.0), 10, 0.0)));
    CHECK(modelHash(a) != modelHash(b));
    CHECK(modelHash(a) != modelHash(c));
    CHECK(modelHash(a) != modelHash(d));
}

TEST_CASE("corrupt or foreign files are rejected") {
    TempDir dir;
    SpinChainModel model = makeModel(FieldSpec::uniform(1.0), 6, 0.0);
    MatrixProductState psi = entangledState(model);
    RunDiagnostics diag;
    fs::path file = dir.path / "run.ckpt";
    writeCheckpoint(file, psi, diag, model);

    SUBCASE("missing file") {
        CHECK_THROWS(readCheckpoint(dir.path / "nope.ckpt"));
    }
    SUBCASE("clobbered magic") {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
        f.close();
        CHECK_THROWS(readCheckpoint(file));
    }
    SUBCASE("truncated payload") {
        auto size = fs::file_size(file);
        fs::resize_file(file, size - 16);
        CHECK_THROWS(readCheckpoint(file));
    }
    SUBCASE("not a checkpoint at all") {
        fs::path junk = dir.path / "junk.ckpt";
        std::ofstream(junk) << "{\"hello\": 1}";
        CHECK_THROWS(readCheckpoint(junk));
    }
}

TEST_CASE("write replaces an existing checkpoint atomically") {
    TempDir dir;
    SpinChainModel model = makeModel(FieldSpec::staggered(1.5), 8, 0.0);
    MatrixProductState psi = entangledState(model);
    RunDiagnostics diag;
    diag.sweepsUsed = 1;
    fs::path file = dir.path / "run.ckpt";
    writeCheckpoint(file, psi, diag, model);
    diag.sweepsUsed = 2;
    writeCheckpoint(file, psi, diag, model);
    CHECK(readCheckpoint(file).diagnostics.sweepsUsed == 2);
    // no stray temporary left behind
    int entries = 0;
    for ([[maybe_unused]] auto& e : fs::directory_iterator(dir.path)) ++entries;
    CHECK(entries == 1);
}
