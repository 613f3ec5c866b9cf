#include <cmath>
#include <numbers>

#include "doctest.h"
#include "xy/model.hpp"
#include "xy/observables.hpp"
#include "xy/tebd.hpp"

using namespace xy;
using std::numbers::pi;

namespace {

MatrixProductState tiltedProduct(const SpinChainModel& model, double alpha) {
    // every site at in-plane angle alpha: (|0> + e^{i alpha} |1>)/sqrt(2)
    std::vector<Eigen::Vector2cd> locals(static_cast<std::size_t>(model.n));
    for (auto& v : locals) {
        v << std::complex<double>(1.0 / std::sqrt(2.0), 0.0),
            std::exp(std::complex<double>(0.0, alpha)) / std::sqrt(2.0);
    }
    return MatrixProductState::productState(locals);
}

}  // namespace

TEST_CASE("profiles and bulk means on a hand-built product state") {
    const int n = 10;
    SpinChainModel model = makeModel(FieldSpec::uniform(0.7), n, 0.0);
    const double alpha = 0.3;
    MatrixProductState psi = tiltedProduct(model, alpha);
    ObservableRecord rec = measureRecord(psi, model, 2);

    CHECK(rec.n == n);
    CHECK(rec.boundaryExclusion == 2);
    for (int i = 0; i < n; ++i) {
        // axis 0: parallel = <sigma_x> = cos(alpha), perp = <sigma_y> = sin(alpha)
        CHECK(rec.mParallel[i] == doctest::Approx(std::cos(alpha)).epsilon(1e-12));
        CHECK(rec.mPerp[i] == doctest::Approx(std::sin(alpha)).epsilon(1e-12));
        CHECK(rec.fieldValues[i] == doctest::Approx(0.7));
    }
    for (int b = 0; b < n - 1; ++b) CHECK(rec.entropyProfile[b] == doctest::Approx(0.0));
    CHECK(rec.meanMParallel == doctest::Approx(std::cos(alpha)).epsilon(1e-12));
    CHECK(rec.meanMPerp == doctest::Approx(std::sin(alpha)).epsilon(1e-12));
    CHECK(rec.meanAbsMPerp == doctest::Approx(std::sin(alpha)).epsilon(1e-12));
    CHECK(rec.energy == doctest::Approx(energy(psi, model)).epsilon(1e-12));
}

TEST_CASE("bulk means really exclude the boundary") {
    const int n = 8;
    SpinChainModel model = makeModel(FieldSpec::staggered(1.0), n, 0.0);
    // staggered bias of the initial draw leaves a site-dependent profile;
    // build one explicitly: site i at angle (-1)^i * 0.5
    std::vector<Eigen::Vector2cd> locals(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double alpha = (i % 2 == 0 ? -0.5 : 0.5) + 0.1 * i;
        locals[static_cast<std::size_t>(i)] << std::complex<double>(1.0 / std::sqrt(2.0), 0.0),
            std::exp(std::complex<double>(0.0, alpha)) / std::sqrt(2.0);
    }
    MatrixProductState psi = MatrixProductState::productState(locals);

    ObservableRecord rec = measureRecord(psi, model, 3);
    double sumPar = 0.0, sumPerp = 0.0, sumAbs = 0.0;
    int count = 0;
    for (int i = 3; i < n - 3; ++i) {  // zero-based window [excl, n-excl)
        sumPar += rec.mParallel[i];
        sumPerp += rec.mPerp[i];
        sumAbs += std::abs(rec.mPerp[i]);
        ++count;
    }
    CHECK(count == 2);
    CHECK(rec.meanMParallel == doctest::Approx(sumPar / count).epsilon(1e-12));
    CHECK(rec.meanMPerp == doctest::Approx(sumPerp / count).epsilon(1e-12));
    CHECK(rec.meanAbsMPerp == doctest::Approx(sumAbs / count).epsilon(1e-12));

    // meanMPerp can cancel while meanAbsMPerp does not
    CHECK(std::abs(rec.meanMPerp) < rec.meanAbsMPerp);
}

TEST_CASE("midEntropy picks the central bond") {
    SpinChainModel model = makeModel(FieldSpec::uniform(0.0), 6, 0.0);
    MatrixProductState psi = initialState(model, pi / 2, 2);
    TruncationPolicy policy;
    EvolutionSchedule s;
    s.stages = {{0.1, 300, 1e-9}};
    groundStateSearch(model, s, policy, psi);
    ObservableRecord rec = measureRecord(psi, model, 0);
    CHECK(rec.midEntropy() == doctest::Approx(rec.entropyProfile[2]));
    CHECK(rec.midEntropy() == doctest::Approx(psi.blockEntropy(3)).epsilon(1e-12));
    CHECK(rec.entropyProfile.size() == 5);
}

TEST_CASE("exclusion window is validated") {
    SpinChainModel model = makeModel(FieldSpec::uniform(1.0), 6, 0.0);
    MatrixProductState psi = tiltedProduct(model, 0.0);
    CHECK_THROWS(measureRecord(psi, model, -1));
    CHECK_THROWS(measureRecord(psi, model, 3));  // window would be empty
    CHECK_NOTHROW(measureRecord(psi, model, 2));
}

TEST_CASE("axis covariance: rotating the whole problem rotates the labels only") {
    const int n = 8;
    const double theta = 1.1;
    SpinChainModel flat = makeModel(FieldSpec::staggered(1.2), n, 0.0);
    SpinChainModel tilted = makeModel(FieldSpec::staggered(1.2), n, theta);
    TruncationPolicy policy;
    EvolutionSchedule s;
    s.stages = {{0.1, 500, 1e-10}, {0.01, 500, 1e-11}};

    MatrixProductState a = initialState(flat, pi / 2, 6);
    MatrixProductState b = initialState(tilted, pi / 2, 6);
    groundStateSearch(flat, s, policy, a);
    groundStateSearch(tilted, s, policy, b);
    ObservableRecord ra = measureRecord(a, flat, 1);
    ObservableRecord rb = measureRecord(b, tilted, 1);

    CHECK(ra.axisAngle == doctest::Approx(0.0));
    CHECK(rb.axisAngle == doctest::Approx(theta));
    CHECK(ra.energy == doctest::Approx(rb.energy).epsilon(1e-8));
    for (int i = 0; i < n; ++i) {
        CHECK(ra.mParallel[i] == doctest::Approx(rb.mParallel[i]).epsilon(1e-7));
        CHECK(std::abs(ra.mPerp[i]) == doctest::Approx(std::abs(rb.mPerp[i])).epsilon(1e-7));
    }
}
