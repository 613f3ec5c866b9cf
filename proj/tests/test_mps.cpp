#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "doctest.h"
#include "xy/model.hpp"
#include "xy/mps.hpp"

using namespace xy;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;
using Eigen::Vector2cd;
using Eigen::VectorXcd;

namespace {

std::vector<Vector2cd> tiltedLocals(int n) {
    std::vector<Vector2cd> locals(n);
    for (int i = 0; i < n; ++i) {
        double theta = 0.4 + 0.3 * i, phi = 0.9 * i;
        locals[i] << std::cos(theta / 2),
            std::polar(std::sin(theta / 2), phi);
    }
    return locals;
}

// Dense reference of the same product state, site 1 = most significant bit.
VectorXcd denseProduct(const std::vector<Vector2cd>& locals) {
    VectorXcd v = VectorXcd::Ones(1);
    for (const Vector2cd& l : locals) {
        VectorXcd next(v.size() * 2);
        for (int r = 0; r < v.size(); ++r)
            for (int b = 0; b < 2; ++b) next(2 * r + b) = v(r) * l(b);
        v = std::move(next);
    }
    return v;
}

// I x gate x I with the gate acting on sites (b, b+1) of an n-site chain.
MatrixXcd embedGate(const Matrix4cd& gate, int n, int b) {
    long left = 1L << (b - 1), right = 1L << (n - b - 1);
    return Eigen::kroneckerProduct(
               MatrixXcd::Identity(left, left),
               Eigen::kroneckerProduct(gate, MatrixXcd::Identity(right, right)).eval())
        .eval();
}

Matrix4cd imaginaryTimeGate(double dt, double h) {
    SpinChainModel model = makeModel(FieldSpec::uniform(h), 2, 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(bondHamiltonian(model, 1));
    return es.eigenvectors() *
           (-dt * es.eigenvalues().array()).exp().matrix().asDiagonal() *
           es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("product state: norm, bonds, local expectations") {
    auto locals = tiltedLocals(5);
    MatrixProductState psi = MatrixProductState::productState(locals);
    CHECK(psi.siteCount() == 5);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(psi.maxBondDim() == 1);
    for (int b = 1; b < 5; ++b) {
        CHECK(psi.schmidtSpectrum(b).size() == 1);
        CHECK(psi.blockEntropy(b) == 0.0);
    }
    for (int i = 1; i <= 5; ++i) {
        Vector2cd l = locals[i - 1];
        double mz = (l.adjoint() * pauliZ() * l)(0).real();
        CHECK(psi.expectationOneSite(i, pauliZ()) == doctest::Approx(mz).epsilon(1e-12));
    }
}

TEST_CASE("denseVector uses site 1 as the most significant bit") {
    auto locals = tiltedLocals(3);
    MatrixProductState psi = MatrixProductState::productState(locals);
    VectorXcd v = psi.denseVector();
    VectorXcd ref = denseProduct(locals);
    REQUIRE(v.size() == 8);
    CHECK((v - ref).cwiseAbs().maxCoeff() < 1e-13);
    // |100> sits at index 4: flipping site 1 moves the amplitude by 2^(N-1).
    CHECK(std::abs(v(4) - locals[0](1) * locals[1](0) * locals[2](0)) < 1e-13);
}

TEST_CASE("two-site gates reproduce dense evolution") {
    const int n = 6;
    auto locals = tiltedLocals(n);
    MatrixProductState psi = MatrixProductState::productState(locals);
    VectorXcd dense = denseProduct(locals);

    TruncationPolicy policy;
    policy.maxBond = 64;  // full rank for n=6: lossless
    policy.weightCutoff = 0.0;
    Matrix4cd gate = imaginaryTimeGate(0.17, 0.8);
    for (int b : {1, 3, 5, 2, 4, 1}) {
        psi.applyTwoSiteGate(b, gate, policy);
        dense = embedGate(gate, n, b) * dense;
        dense.normalize();
        // away from the updated bond the tensors keep their old weighting, so
        // the state matches the dense vector up to overall scale only
        VectorXcd v = psi.denseVector().normalized();
        CHECK(std::abs(dense.dot(v)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(psi.discardedWeightTotal() < 1e-12);  // lossless up to roundoff
    psi.canonicalize();
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(dense.dot(psi.denseVector())) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("schmidt spectra are normalized probabilities") {
    const int n = 6;
    MatrixProductState psi = MatrixProductState::productState(tiltedLocals(n));
    TruncationPolicy policy;
    Matrix4cd gate = imaginaryTimeGate(0.3, 0.0);
    for (int pass = 0; pass < 3; ++pass)
        for (int b = 1; b < n; ++b) psi.applyTwoSiteGate(b, gate, policy);
    for (int b = 1; b < n; ++b) {
        const Eigen::VectorXd& lam = psi.schmidtSpectrum(b);
        CHECK(lam.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lam.minCoeff() > 0.0);
        for (int i = 0; i + 1 < lam.size(); ++i) CHECK(lam(i) >= lam(i + 1));
        CHECK(psi.blockEntropy(b) >= 0.0);
        CHECK(psi.blockEntropy(b) <= std::log2(double(lam.size())) + 1e-12);
    }
}

TEST_CASE("bond cap truncates and reports the discarded weight") {
    const int n = 8;
    MatrixProductState psi = MatrixProductState::productState(tiltedLocals(n));
    TruncationPolicy loose;
    loose.maxBond = 64;
    loose.weightCutoff = 0.0;
    Matrix4cd gate = imaginaryTimeGate(0.4, 0.0);
    for (int pass = 0; pass < 4; ++pass)
        for (int b = 1; b < n; ++b) psi.applyTwoSiteGate(b, gate, loose);
    REQUIRE(psi.maxBondDim() > 2);

    MatrixProductState capped = MatrixProductState::productState(tiltedLocals(n));
    TruncationPolicy tight;
    tight.maxBond = 2;
    tight.weightCutoff = 0.0;
    double discardedSum = 0.0;
    for (int pass = 0; pass < 4; ++pass)
        for (int b = 1; b < n; ++b) discardedSum += capped.applyTwoSiteGate(b, gate, tight);
    CHECK(capped.maxBondDim() <= 2);
    CHECK(discardedSum > 0.0);
    CHECK(capped.discardedWeightTotal() == doctest::Approx(discardedSum).epsilon(1e-12));
    CHECK(capped.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("canonicalize restores the form and preserves the state") {
    const int n = 7;
    MatrixProductState psi = MatrixProductState::productState(tiltedLocals(n));
    TruncationPolicy policy;
    Matrix4cd gate = imaginaryTimeGate(0.25, 1.3);
    for (int pass = 0; pass < 3; ++pass)
        for (int b = 1; b < n; ++b) psi.applyTwoSiteGate(b, gate, policy);
    VectorXcd before = psi.denseVector();
    before.normalize();
    psi.canonicalize();
    CHECK(psi.isCanonical());
    VectorXcd after = psi.denseVector();
    CHECK(std::abs(std::abs(before.dot(after)) - 1.0) < 1e-12);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-13));

    // Idempotence: a second pass must not move anything.
    std::vector<Eigen::VectorXd> spectra;
    for (int b = 1; b < n; ++b) spectra.push_back(psi.schmidtSpectrum(b));
    psi.canonicalize();
    for (int b = 1; b < n; ++b)
        CHECK((psi.schmidtSpectrum(b) - spectra[b - 1]).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("expectationTwoSite and expectationBond agree with dense") {
    const int n = 5;
    auto locals = tiltedLocals(n);
    MatrixProductState psi = MatrixProductState::productState(locals);
    TruncationPolicy policy;
    Matrix4cd gate = imaginaryTimeGate(0.2, 0.5);
    for (int b = 1; b < n; ++b) psi.applyTwoSiteGate(b, gate, policy);
    psi.canonicalize();
    VectorXcd v = psi.denseVector();

    auto denseOp = [&](int site, const Matrix2cd& op) {
        MatrixXcd full = MatrixXcd::Identity(1, 1);
        for (int s = 1; s <= n; ++s)
            full = Eigen::kroneckerProduct(full, s == site ? op : Matrix2cd::Identity()).eval();
        return full;
    };
    for (auto [i, j] : {std::pair{1, 3}, {2, 5}, {1, 5}, {3, 4}}) {
        double dense = (v.adjoint() * denseOp(i, pauliX()) * denseOp(j, pauliX()) * v)(0).real();
        CHECK(psi.expectationTwoSite(i, j, pauliX(), pauliX()) ==
              doctest::Approx(dense).epsilon(1e-11));
    }
    Matrix4cd xx = Eigen::kroneckerProduct(pauliX(), pauliX());
    double dense = (v.adjoint() * denseOp(2, pauliX()) * denseOp(3, pauliX()) * v)(0).real();
    CHECK(psi.expectationBond(2, xx) == doctest::Approx(dense).epsilon(1e-11));
}
