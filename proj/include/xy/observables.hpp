#pragma once

#include <Eigen/Dense>

#include "xy/model.hpp"
#include "xy/mps.hpp"

// Per-run measurement bundle: magnetization profiles along and perpendicular
// to the field axis, the bond entropy profile, and bulk means taken over the
// boundary-excluded window [1+excl, N-excl].

namespace xy {

struct ObservableRecord {
    int n = 0;
    int boundaryExclusion = 0;
    double axisAngle = 0.0;
    Eigen::VectorXd mParallel;       // <sigma_axis> per site
    Eigen::VectorXd mPerp;           // <sigma_perp> per site
    Eigen::VectorXd entropyProfile;  // S(p) per bond, entry p-1
    double energy = 0.0;
    Eigen::VectorXd fieldValues;
    double meanMParallel = 0.0;
    double meanMPerp = 0.0;
    double meanAbsMPerp = 0.0;

    double midEntropy() const { return entropyProfile[n / 2 - 1]; }
};

ObservableRecord measureRecord(const MatrixProductState& state, const SpinChainModel& model,
                               int boundaryExclusion);

}  // namespace xy
