#include "xy/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace xy {

namespace {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slopeStdErr = 0.0;
    double rms = 0.0;
    int n = 0;
};

LinearFit linearFit(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    if (n < 2) throw std::invalid_argument("linear fit needs at least two points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("degenerate abscissa in fit");
    LinearFit f;
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    f.rms = std::sqrt(ssr / n);
    f.slopeStdErr = (n > 2) ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    return f;
}

// Permutation-invariant sum: add in sorted order.
double sortedSum(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

PowerLawFit fitPowerLaw(const std::vector<double>& xs, const std::vector<double>& ys,
                        double windowMin, double windowMax) {
    if (xs.size() != ys.size()) throw std::invalid_argument("abscissa/ordinate size mismatch");
    std::vector<double> lx, ly;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < windowMin || xs[i] > windowMax) continue;
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("power-law fit needs positive data");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
        lo = std::min(lo, xs[i]);
        hi = std::max(hi, xs[i]);
    }
    if (lx.size() < 4) throw std::invalid_argument("power-law fit needs at least 4 points in window");
    LinearFit f = linearFit(lx, ly);
    PowerLawFit out;
    out.exponent = f.slope;
    out.exponentStdErr = f.slopeStdErr;
    out.prefactor = std::exp(f.intercept);
    out.windowMin = lo;
    out.windowMax = hi;
    out.residual = f.rms;
    out.pointCount = f.n;
    return out;
}

CentralChargeFit fitCentralCharge(const std::vector<std::pair<double, double>>& points,
                                  CentralChargeMethod method) {
    if (points.size() < 4)
        throw std::invalid_argument("central-charge fit needs at least 4 points");
    std::vector<double> x, y;
    for (const auto& [abscissa, entropy] : points) {
        if (!(abscissa > 1.0))
            throw std::invalid_argument("central-charge fit needs abscissa > 1");
        x.push_back(std::log2(abscissa));
        y.push_back(entropy);
    }
    LinearFit f = linearFit(x, y);
    CentralChargeFit out;
    out.c = 6.0 * f.slope;
    out.cStdErr = 6.0 * f.slopeStdErr;
    out.offset = f.intercept;
    out.method = method;
    return out;
}

std::optional<CorrelationFit> correlationLength(const MatrixProductState& state,
                                                double axisAngle, int rMin, int rMax) {
    const int n = state.siteCount();
    rMax = std::min(rMax, n - 2);
    if (rMin < 1 || rMax - rMin < 3) return std::nullopt;
    const Eigen::Matrix2cd perp = sigmaAlongAxis(axisAngle + std::numbers::pi / 2);
    std::vector<double> rs, logc;
    for (int r = rMin; r <= rMax; ++r) {
        const int i = (n - r) / 2 + 1;  // center-symmetric pair (i, i+r)
        const int j = i + r;
        const double mi = state.expectationOneSite(i, perp);
        const double mj = state.expectationOneSite(j, perp);
        const double c = state.expectationTwoSite(i, j, perp, perp) - mi * mj;
        if (!(c > 0.0)) return std::nullopt;  // unfittable: broken or critical
        rs.push_back(r);
        logc.push_back(std::log(c));
    }
    LinearFit f = linearFit(rs, logc);
    if (!(f.slope < 0.0)) return std::nullopt;  // not decaying
    CorrelationFit out;
    out.xi = -1.0 / f.slope;
    out.residual = f.rms;
    out.rMin = rMin;
    out.rMax = rMax;
    return out;
}

std::optional<CorrelationFit> correlationLength(const MatrixProductState& state,
                                                double axisAngle, int boundaryExclusion) {
    const int n = state.siteCount();
    const int rMin = 3;
    const int bulkCap = std::min(n / 4, n - 2 * boundaryExclusion - 2);
    std::optional<CorrelationFit> first = correlationLength(state, axisAngle, rMin, bulkCap);
    if (!first) return std::nullopt;
    const int adjusted =
        std::min(bulkCap, std::max(rMin + 3, static_cast<int>(std::ceil(8.0 * first->xi))));
    if (adjusted == first->rMax) return first;
    return correlationLength(state, axisAngle, rMin, adjusted);
}

std::vector<IslandRecord> detectIslands(const ObservableRecord& record, double amplitudeFloor) {
    if (!(amplitudeFloor > 0.0)) throw std::invalid_argument("amplitude floor must be positive");
    const int n = record.n;
    const int excl = record.boundaryExclusion;

    // Zeros of the field profile: exactly-zero sites and sign-change crossings.
    std::vector<double> zeros;
    for (int i = 1; i <= n; ++i) {
        const double h = record.fieldValues[i - 1];
        if (h == 0.0) zeros.push_back(i);
        if (i < n) {
            const double hn = record.fieldValues[i];
            if ((h < 0.0 && hn > 0.0) || (h > 0.0 && hn < 0.0))
                zeros.push_back(i + h / (h - hn));
        }
    }

    std::vector<IslandRecord> islands;
    int runStart = 0;
    for (int i = 1; i <= n + 1; ++i) {
        const bool above = (i <= n) && std::abs(record.mPerp[i - 1]) > amplitudeFloor;
        if (above) {
            if (runStart == 0) runStart = i;
            continue;
        }
        if (runStart == 0) continue;
        const int first = runStart;
        const int last = i - 1;
        runStart = 0;
        // Drop runs reaching into the excluded boundary zones.
        if (first <= excl || last >= n - excl + 1) continue;
        IslandRecord isl;
        isl.firstSite = first;
        isl.lastSite = last;
        isl.size = last - first + 1;
        double peak = 0.0;
        for (int s = first; s <= last; ++s) {
            const double v = record.mPerp[s - 1];
            if (std::abs(v) > std::abs(peak)) peak = v;
        }
        isl.amplitude = std::abs(peak);
        isl.sign = (peak >= 0.0) ? 1 : -1;
        const double center = 0.5 * (first + last);
        double best = center;
        double bestDist = std::numeric_limits<double>::infinity();
        for (double z : zeros) {
            const double d = std::abs(z - center);
            if (d < bestDist) {
                bestDist = d;
                best = z;
            }
        }
        isl.centerIndex = static_cast<int>(std::lround(best));
        islands.push_back(isl);
    }
    return islands;
}

KZExponents kzPredictions(double nu, double inverseDelta) {
    if (!(nu > 0.0) || !(inverseDelta > 0.0))
        throw std::invalid_argument("exponents must be positive");
    KZExponents k;
    k.nu = nu;
    k.inverseDelta = inverseDelta;
    k.predictedSizeExponent = nu / (nu + 1.0);
    k.predictedAmplitudeExponent = inverseDelta / (nu + 1.0);
    return k;
}

DisorderAverage disorderAverage(const std::vector<ObservableRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no records to average");
    const int n = records.front().n;
    const int excl = records.front().boundaryExclusion;
    for (const ObservableRecord& r : records) {
        if (r.n != n) throw std::invalid_argument("records have mismatched site counts");
        if (r.boundaryExclusion != excl)
            throw std::invalid_argument("records have mismatched boundary exclusions");
    }
    const int k = static_cast<int>(records.size());

    DisorderAverage avg;
    avg.n = n;
    avg.realizations = k;
    avg.signedPerp.resize(n);
    avg.absPerp.resize(n);
    std::vector<double> vals(k);
    for (int i = 0; i < n; ++i) {
        for (int r = 0; r < k; ++r) vals[r] = records[r].mPerp[i];
        avg.signedPerp[i] = sortedSum(vals) / k;
        for (int r = 0; r < k; ++r) vals[r] = std::abs(records[r].mPerp[i]);
        avg.absPerp[i] = sortedSum(vals) / k;
    }

    auto bulkStats = [&](auto&& perRecord) {
        std::vector<double> xs(k);
        for (int r = 0; r < k; ++r) xs[r] = perRecord(records[r]);
        const double mean = sortedSum(xs) / k;
        double se = 0.0;
        if (k > 1) {
            std::vector<double> dev(k);
            for (int r = 0; r < k; ++r) dev[r] = (xs[r] - mean) * (xs[r] - mean);
            se = std::sqrt(sortedSum(dev) / (k - 1) / k);
        }
        return std::pair<double, double>(mean, se);
    };
    std::tie(avg.bulkSigned, avg.bulkSignedStdErr) =
        bulkStats([](const ObservableRecord& r) { return r.meanMPerp; });
    std::tie(avg.bulkAbs, avg.bulkAbsStdErr) =
        bulkStats([](const ObservableRecord& r) { return r.meanAbsMPerp; });
    return avg;
}

std::optional<OnsetEstimate> estimateOnsetField(const std::vector<double>& h0s,
                                                const std::vector<double>& mPerp,
                                                double betaReference, double referenceField) {
    if (h0s.size() != mPerp.size()) throw std::invalid_argument("size mismatch");
    if (!(betaReference > 0.0)) throw std::invalid_argument("beta must be positive");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < h0s.size(); ++i) {
        const double dist = 1.0 - h0s[i] / referenceField;
        if (dist < kBetaWindowMin || dist > kBetaWindowMax) continue;
        if (!(mPerp[i] > 0.0)) continue;
        x.push_back(h0s[i]);
        y.push_back(std::pow(mPerp[i], 1.0 / betaReference));
    }
    if (x.size() < 4) return std::nullopt;
    LinearFit f = linearFit(x, y);
    if (!(f.slope < 0.0)) return std::nullopt;
    OnsetEstimate est;
    est.criticalField = -f.intercept / f.slope;
    est.slope = f.slope;
    est.pointCount = f.n;
    return est;
}

}  // namespace xy
