#include <complex>

#include <Eigen/Dense>

#include "doctest.h"
#include "xy/linalg.hpp"

using namespace xy;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXcd testMatrix(int rows, int cols, unsigned tag) {
    MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            // Fixed quasi-random entries; nothing magic, just full-rank.
            double a = std::sin(0.7 * (r + 1) * (c + 2) + tag);
            double b = std::cos(1.3 * (r + 2) * (c + 1) - tag);
            m(r, c) = std::complex<double>(a, b);
        }
    return m;
}

}  // namespace

TEST_CASE("svd reconstructs the input") {
    for (auto [rows, cols] : {std::pair{6, 4}, {4, 6}, {5, 5}, {1, 3}}) {
        MatrixXcd m = testMatrix(rows, cols, 3);
        linalg::SvdResult f = linalg::svd(m);
        const int k = std::min(rows, cols);
        REQUIRE(f.u.cols() == k);
        REQUIRE(f.vh.rows() == k);
        MatrixXcd back = f.u * f.s.asDiagonal() * f.vh;
        CHECK((back - m).cwiseAbs().maxCoeff() < 1e-12);
        for (int i = 0; i + 1 < k; ++i) CHECK(f.s(i) >= f.s(i + 1));
        CHECK((f.u.adjoint() * f.u - MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((f.vh * f.vh.adjoint() - MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("svd gauge: dominant entry of each left vector is real positive") {
    MatrixXcd m = testMatrix(7, 5, 11);
    linalg::SvdResult f = linalg::svd(m);
    for (int c = 0; c < f.u.cols(); ++c) {
        Eigen::Index argmax;
        f.u.col(c).cwiseAbs().maxCoeff(&argmax);
        std::complex<double> top = f.u(argmax, c);
        CHECK(top.real() > 0.0);
        CHECK(std::abs(top.imag()) < 1e-13 * top.real());
    }
}

TEST_CASE("svd of a phase-rotated matrix keeps right vectors consistent") {
    // The gauge must make U deterministic, pushing all phase freedom into Vh.
    MatrixXcd m = testMatrix(6, 6, 5);
    linalg::SvdResult a = linalg::svd(m);
    linalg::SvdResult b = linalg::svd(m);  // bit-identical rerun
    CHECK((a.u - b.u).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.vh - b.vh).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.s - b.s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hermitianLowest finds the bottom of the spectrum") {
    MatrixXcd a = testMatrix(8, 8, 2);
    MatrixXcd h = (a + a.adjoint()) / 2.0;
    linalg::HermitianEig lo = linalg::hermitianLowest(h, 3);
    REQUIRE(lo.values.size() == 3);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> full(h);
    for (int i = 0; i < 3; ++i) CHECK(lo.values(i) == doctest::Approx(full.eigenvalues()(i)).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXcd r = h * lo.vectors.col(i) - lo.values(i) * lo.vectors.col(i);
        CHECK(r.norm() < 1e-10);
    }
}

TEST_CASE("symmetricLowest matches the dense solver") {
    MatrixXcd a = testMatrix(9, 9, 8);
    MatrixXd s = (a.real() + a.real().transpose()) / 2.0;
    linalg::SymmetricEig lo = linalg::symmetricLowest(s, 2);
    Eigen::SelfAdjointEigenSolver<MatrixXd> full(s);
    CHECK(lo.values(0) == doctest::Approx(full.eigenvalues()(0)).epsilon(1e-12));
    CHECK(lo.values(1) == doctest::Approx(full.eigenvalues()(1)).epsilon(1e-12));
    CHECK((s * lo.vectors.col(0) - lo.values(0) * lo.vectors.col(0)).norm() < 1e-10);
}
