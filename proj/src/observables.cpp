#include "xy/observables.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

#include "xy/tebd.hpp"

namespace xy {

ObservableRecord measureRecord(const MatrixProductState& state, const SpinChainModel& model,
                               int boundaryExclusion) {
    const int n = model.n;
    if (state.siteCount() != n)
        throw std::invalid_argument("state and model have different site counts");
    if (boundaryExclusion < 0 || 2 * boundaryExclusion >= n)
        throw std::invalid_argument("boundary exclusion " + std::to_string(boundaryExclusion) +
                                    " leaves no bulk window for " + std::to_string(n) + " sites");

    ObservableRecord rec;
    rec.n = n;
    rec.boundaryExclusion = boundaryExclusion;
    rec.axisAngle = model.field.axisAngle;
    rec.fieldValues = model.field.values;

    const Eigen::Matrix2cd par = sigmaAlongAxis(model.field.axisAngle);
    const Eigen::Matrix2cd perp = sigmaAlongAxis(model.field.axisAngle + std::numbers::pi / 2);
    rec.mParallel.resize(n);
    rec.mPerp.resize(n);
    for (int i = 1; i <= n; ++i) {
        rec.mParallel[i - 1] = state.expectationOneSite(i, par);
        rec.mPerp[i - 1] = state.expectationOneSite(i, perp);
    }
    rec.entropyProfile.resize(n - 1);
    for (int p = 1; p <= n - 1; ++p) rec.entropyProfile[p - 1] = state.blockEntropy(p);
    rec.energy = energy(state, model);

    const int lo = boundaryExclusion;          // 0-based first bulk site
    const int len = n - 2 * boundaryExclusion; // window [1+excl, N-excl]
    rec.meanMParallel = rec.mParallel.segment(lo, len).mean();
    rec.meanMPerp = rec.mPerp.segment(lo, len).mean();
    rec.meanAbsMPerp = rec.mPerp.segment(lo, len).cwiseAbs().mean();
    return rec;
}

}  // namespace xy
