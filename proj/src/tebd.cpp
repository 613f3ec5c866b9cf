#include "xy/tebd.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "xy/rng.hpp"

namespace xy {

EvolutionSchedule EvolutionSchedule::defaults() {
    EvolutionSchedule s;
    s.stages = {{0.1, 500, 1e-6}, {0.01, 2000, 1e-8}, {0.001, 5000, 1e-10}};
    return s;
}

MatrixProductState initialState(const SpinChainModel& model, double biasAngle,
                                std::uint64_t seed) {
    const double perp = model.field.axisAngle + std::numbers::pi / 2;
    std::vector<double> angles =
        rng::biasedAngles(seed, model.n, perp, std::abs(biasAngle));
    if (biasAngle < 0.0) {
        // Mirror about the field axis: the same draws tilted toward -perp,
        // giving the exact symmetry partner of the positive-bias state.
        for (double& a : angles) a = 2.0 * model.field.axisAngle - a;
    }
    std::vector<Eigen::Vector2cd> locals(model.n);
    const double amp = 1.0 / std::numbers::sqrt2;
    for (int i = 0; i < model.n; ++i) {
        // +1 eigenvector of sigma(alpha): (|0> + e^{i alpha}|1>)/sqrt(2)
        locals[i](0) = amp;
        locals[i](1) = std::polar(amp, angles[i]);
    }
    return MatrixProductState::productState(locals);
}

double energy(const MatrixProductState& state, const SpinChainModel& model) {
    if (state.siteCount() != model.n)
        throw std::invalid_argument("state and model have different site counts");
    const Eigen::Matrix4cd exchange =
        -twoSiteKron(pauliX(), pauliX()) - twoSiteKron(pauliY(), pauliY());
    const Eigen::Matrix2cd axis = sigmaAlongAxis(model.field.axisAngle);
    double e = 0.0;
    for (int b = 1; b <= model.n - 1; ++b) e += state.expectationBond(b, exchange);
    for (int i = 1; i <= model.n; ++i)
        e -= model.field.values[i - 1] * state.expectationOneSite(i, axis);
    return e;
}

namespace {

void validate(const EvolutionSchedule& schedule) {
    if (schedule.stages.empty()) throw std::invalid_argument("schedule has no stages");
    double prev = std::numeric_limits<double>::infinity();
    for (const EvolutionStage& st : schedule.stages) {
        if (!(st.stepSize > 0.0 && st.stepSize < prev))
            throw std::invalid_argument("stage step sizes must be positive and decreasing");
        if (st.maxSweeps < 1) throw std::invalid_argument("stage needs at least one sweep");
        if (!(st.energyTolPerSite > 0.0))
            throw std::invalid_argument("stage tolerance must be positive");
        prev = st.stepSize;
    }
}

}  // namespace

RunDiagnostics groundStateSearch(const SpinChainModel& model, const EvolutionSchedule& schedule,
                                 const TruncationPolicy& policy, MatrixProductState& state) {
    validate(schedule);
    if (state.siteCount() != model.n)
        throw std::invalid_argument("state and model have different site counts");

    RunDiagnostics diag;
    const double startDiscarded = state.discardedWeightTotal();

    for (const EvolutionStage& stage : schedule.stages) {
        TrotterGateSet gates = buildGates(model, stage.stepSize);

        // Stage opening: half step on the odd bonds. Every subsequent sweep
        // is [even full, odd full], which keeps the state at the same
        // second-order point of the split without closing passes.
        for (std::size_t k = 0; k < gates.oddBonds.size(); ++k)
            state.applyTwoSiteGate(gates.oddBonds[k], gates.oddHalfGates[k], policy);

        double prevEnergy = energy(state, model);
        bool stageConverged = false;
        for (int sweep = 0; sweep < stage.maxSweeps; ++sweep) {
            for (std::size_t k = 0; k < gates.evenBonds.size(); ++k)
                state.applyTwoSiteGate(gates.evenBonds[k], gates.evenGates[k], policy);
            for (std::size_t k = 0; k < gates.oddBonds.size(); ++k)
                state.applyTwoSiteGate(gates.oddBonds[k], gates.oddFullGates[k], policy);

            const double e = energy(state, model);
            diag.energyHistory.push_back(e);
            ++diag.sweepsUsed;
            diag.maxBondReached = std::max(diag.maxBondReached, state.maxBondDim());
            if (std::abs(e - prevEnergy) / model.n < stage.energyTolPerSite) {
                stageConverged = true;
                prevEnergy = e;
                break;
            }
            prevEnergy = e;
        }
        diag.converged = stageConverged;
    }

    state.canonicalize();
    diag.finalEnergy = energy(state, model);
    diag.totalDiscardedWeight = state.discardedWeightTotal() - startDiscarded;
    diag.truncationAlarm = diag.totalDiscardedWeight > schedule.discardAlarmThreshold;
    return diag;
}

}  // namespace xy
