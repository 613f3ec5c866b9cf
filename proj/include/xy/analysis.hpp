#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "xy/mps.hpp"
#include "xy/observables.hpp"

// Fits and feature extraction over measured records: correlation lengths,
// power laws, central charge, perpendicular-magnetization islands, disorder
// ensemble averages, and the ordered-phase onset estimate.

namespace xy {

// Literature reference values the fits are compared against.
inline constexpr double kCriticalField = 2.915;  // staggered-field transition
inline constexpr double kBetaReference = 0.125;
// Default order-parameter fit window on x = 1 - h0/h_c.
inline constexpr double kBetaWindowMin = 0.02;
inline constexpr double kBetaWindowMax = 0.2;
// Default island amplitude floor (fraction of saturation).
inline constexpr double kIslandFloor = 0.05;

struct PowerLawFit {
    double exponent = 0.0;
    double exponentStdErr = 0.0;
    double prefactor = 0.0;
    double windowMin = 0.0;  // abscissa range actually used
    double windowMax = 0.0;
    double residual = 0.0;  // rms residual of log y
    int pointCount = 0;
};

// Log-log linear regression of ys against xs restricted to
// windowMin <= x <= windowMax. Needs >= 4 points, all positive.
PowerLawFit fitPowerLaw(const std::vector<double>& xs, const std::vector<double>& ys,
                        double windowMin, double windowMax);

enum class CentralChargeMethod { EntropyVsXi, EntropyVsN };

struct CentralChargeFit {
    double c = 0.0;
    double cStdErr = 0.0;
    double offset = 0.0;
    CentralChargeMethod method = CentralChargeMethod::EntropyVsXi;
};

// Fit S = (c/6) log2(x) + a over points (x, S); x is the correlation length
// or, for the finite-size method, the chain length. Needs >= 4 points, x > 1.
CentralChargeFit fitCentralCharge(const std::vector<std::pair<double, double>>& points,
                                  CentralChargeMethod method);

struct CorrelationFit {
    double xi = 0.0;
    double residual = 0.0;  // rms residual of log C
    int rMin = 0;
    int rMax = 0;
};

// Correlation length from the connected perpendicular correlator
// C(r) = <s_perp^i s_perp^j> - <s_perp^i><s_perp^j> on center-symmetric site
// pairs, fitted as log C = const - r/xi over r in [rMin, rMax]. Unfittable
// (non-positive correlator or non-decaying) returns nullopt.
std::optional<CorrelationFit> correlationLength(const MatrixProductState& state,
                                                double axisAngle, int rMin, int rMax);

// Default window r in [3, min(N/4, 8 xi_est)] with one self-consistent
// shrink of the upper edge after an initial estimate.
std::optional<CorrelationFit> correlationLength(const MatrixProductState& state,
                                                double axisAngle, int boundaryExclusion);

struct IslandRecord {
    int centerIndex = 0;    // nearest zero of the field profile
    double size = 0.0;      // run length in sites
    double amplitude = 0.0; // peak |m_perp| inside the run
    int sign = 0;
    int firstSite = 0;
    int lastSite = 0;
};

// Maximal runs of |m_perp| above the floor; runs reaching into the boundary
// exclusion zone are dropped.
std::vector<IslandRecord> detectIslands(const ObservableRecord& record,
                                        double amplitudeFloor = kIslandFloor);

struct KZExponents {
    double nu = 0.0;
    double inverseDelta = 0.0;
    double predictedSizeExponent = 0.0;       // nu / (nu + 1)
    double predictedAmplitudeExponent = 0.0;  // (1/delta) / (nu + 1)
};

KZExponents kzPredictions(double nu, double inverseDelta);

struct DisorderAverage {
    int n = 0;
    int realizations = 0;
    Eigen::VectorXd signedPerp;  // per-site ensemble mean of m_perp
    Eigen::VectorXd absPerp;     // per-site ensemble mean of |m_perp|
    double bulkSigned = 0.0;     // ensemble mean of per-record bulk means
    double bulkAbs = 0.0;
    double bulkSignedStdErr = 0.0;  // standard error over realizations
    double bulkAbsStdErr = 0.0;
};

// Ensemble average over disorder realizations. Sums are accumulated in
// sorted order so the result is bit-identical under permutation of records.
DisorderAverage disorderAverage(const std::vector<ObservableRecord>& records);

struct OnsetEstimate {
    double criticalField = 0.0;
    double slope = 0.0;  // of the linearized order parameter vs h0
    int pointCount = 0;
};

// Ordered-phase onset from a staggered sweep: with m ~ (1 - h0/hc)^beta,
// m^(1/beta) is linear in h0, so its fitted root estimates hc. Points are
// restricted to the default fit window around the reference field.
std::optional<OnsetEstimate> estimateOnsetField(const std::vector<double>& h0s,
                                                const std::vector<double>& mPerp,
                                                double betaReference = kBetaReference,
                                                double referenceField = kCriticalField);

}  // namespace xy
