#pragma once

#include <cstdint>
#include <vector>

#include "xy/model.hpp"
#include "xy/mps.hpp"

// Imaginary-time ground-state search. Each stage runs second-order split
// sweeps at a fixed step until the per-site energy change between sweeps
// drops below the stage tolerance, then the step size shrinks. Adjacent
// odd-bond half steps are merged: a stage opens with one half pass, after
// which every sweep applies the even pass and a full odd pass.

namespace xy {

struct EvolutionStage {
    double stepSize = 0.0;
    int maxSweeps = 0;
    double energyTolPerSite = 0.0;
};

struct EvolutionSchedule {
    std::vector<EvolutionStage> stages;
    // Discarded-weight level above which diagnostics raise the truncation
    // alarm (never aborts; flags runs whose truncation error dominates).
    double discardAlarmThreshold = 1e-3;

    static EvolutionSchedule defaults();
};

struct RunDiagnostics {
    double finalEnergy = 0.0;
    std::vector<double> energyHistory;  // one entry per completed sweep
    double totalDiscardedWeight = 0.0;
    long sweepsUsed = 0;
    bool converged = false;  // final stage met its tolerance before maxSweeps
    int maxBondReached = 1;
    bool truncationAlarm = false;
};

// Product state with every spin in the XY plane, tilted toward the +perp
// direction: in-plane angles drawn uniformly from (axis + pi/2) +- biasAngle.
// A fixed seed gives a bit-identical state. A negative biasAngle mirrors the
// same draws about the field axis, i.e. the exact -perp symmetry partner.
MatrixProductState initialState(const SpinChainModel& model, double biasAngle,
                                std::uint64_t seed);

// <H> = sum_bonds <-sx sx - sy sy> + sum_sites <-h_i sigma_axis>.
double energy(const MatrixProductState& state, const SpinChainModel& model);

// Anneal `state` toward the ground state through the schedule. The state is
// evolved in place (one evolution owns one state) and is canonical and
// normalized on return; finalEnergy is measured on the returned state.
// Non-convergence is reported, never thrown.
RunDiagnostics groundStateSearch(const SpinChainModel& model, const EvolutionSchedule& schedule,
                                 const TruncationPolicy& policy, MatrixProductState& state);

}  // namespace xy
