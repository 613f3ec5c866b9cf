#include "xy/ed.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "xy/linalg.hpp"

namespace xy {

namespace {

constexpr int kMaxSites = 14;
constexpr double kDegeneracyGap = 1e-10;

bool fieldAxisIsReal(double theta) { return std::abs(std::sin(theta)) < 1e-15; }

// Real-symmetric assembly, valid when the field axis has no sy component.
Eigen::MatrixXd denseHamiltonianReal(const SpinChainModel& model) {
    const int n = model.n;
    const Eigen::Index dim = Eigen::Index(1) << n;
    const double c = std::cos(model.field.axisAngle);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
        for (int i = 1; i < n; ++i) {
            const int b1 = (a >> (n - i)) & 1, b2 = (a >> (n - i - 1)) & 1;
            if (b1 != b2) {
                Eigen::Index flipped =
                    a ^ ((Eigen::Index(1) << (n - i)) | (Eigen::Index(1) << (n - i - 1)));
                h(flipped, a) += -2.0;
            }
        }
        for (int i = 1; i <= n; ++i) {
            Eigen::Index flipped = a ^ (Eigen::Index(1) << (n - i));
            h(flipped, a) += -model.field.values[i - 1] * c;
        }
    }
    return h;
}

}  // namespace

Eigen::MatrixXcd denseHamiltonian(const SpinChainModel& model) {
    const int n = model.n;
    if (n > kMaxSites) throw std::invalid_argument("dense diagonalization limited to 14 sites");
    const Eigen::Index dim = Eigen::Index(1) << n;
    const std::complex<double> raise = std::polar(1.0, model.field.axisAngle);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
        for (int i = 1; i < n; ++i) {
            const int b1 = (a >> (n - i)) & 1, b2 = (a >> (n - i - 1)) & 1;
            if (b1 != b2) {
                Eigen::Index flipped =
                    a ^ ((Eigen::Index(1) << (n - i)) | (Eigen::Index(1) << (n - i - 1)));
                h(flipped, a) += -2.0;
            }
        }
        for (int i = 1; i <= n; ++i) {
            const int bit = (a >> (n - i)) & 1;
            Eigen::Index flipped = a ^ (Eigen::Index(1) << (n - i));
            // <1|sigma(theta)|0> = e^{i theta}
            h(flipped, a) += -model.field.values[i - 1] * (bit == 0 ? raise : std::conj(raise));
        }
    }
    return h;
}

Eigen::VectorXcd applyOneSite(const Eigen::VectorXcd& state, int n, int site,
                              const Eigen::Matrix2cd& op) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    if (state.size() != dim) throw std::invalid_argument("state size does not match site count");
    if (site < 1 || site > n) throw std::out_of_range("site out of range");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    const Eigen::Index mask = Eigen::Index(1) << (n - site);
    for (Eigen::Index a = 0; a < dim; ++a) {
        const int s = (a & mask) ? 1 : 0;
        out[a] += op(s, s) * state[a];
        out[a ^ mask] += op(1 - s, s) * state[a];
    }
    return out;
}

double edSiteExpectation(const Eigen::VectorXcd& state, int n, int site,
                         const Eigen::Matrix2cd& op) {
    return state.dot(applyOneSite(state, n, site, op)).real();
}

Eigen::VectorXd edMagnetizationProfile(const Eigen::VectorXcd& state, int n, double angle) {
    const Eigen::Matrix2cd op = sigmaAlongAxis(angle);
    Eigen::VectorXd profile(n);
    for (int i = 1; i <= n; ++i) profile[i - 1] = edSiteExpectation(state, n, i, op);
    return profile;
}

double edBlockEntropy(const Eigen::VectorXcd& state, int n, int p) {
    if (p < 1 || p > n - 1) throw std::out_of_range("cut position out of range");
    const Eigen::Index rows = Eigen::Index(1) << p;
    const Eigen::Index cols = Eigen::Index(1) << (n - p);
    if (state.size() != rows * cols)
        throw std::invalid_argument("state size does not match site count");
    // Leading p sites are the high bits, so the flattened index is row-major.
    Eigen::MatrixXcd block =
        Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>(state.data(), rows, cols);
    linalg::SvdResult svd = linalg::svd(block);
    double s = 0.0;
    for (Eigen::Index i = 0; i < svd.s.size(); ++i) {
        const double w = svd.s[i] * svd.s[i];
        if (w < 1e-14) continue;
        s -= w * std::log2(w);
    }
    return s;
}

EdSolution denseGroundState(const SpinChainModel& model) {
    const int n = model.n;
    if (n > kMaxSites) throw std::invalid_argument("dense diagonalization limited to 14 sites");

    EdSolution sol;
    Eigen::MatrixXcd vectors;
    if (fieldAxisIsReal(model.field.axisAngle)) {
        linalg::SymmetricEig eig = linalg::symmetricLowest(denseHamiltonianReal(model), 2);
        sol.e0 = eig.values[0];
        sol.e1 = eig.values[1];
        vectors = eig.vectors.cast<std::complex<double>>();
    } else {
        linalg::HermitianEig eig = linalg::hermitianLowest(denseHamiltonian(model), 2);
        sol.e0 = eig.values[0];
        sol.e1 = eig.values[1];
        vectors = std::move(eig.vectors);
    }

    sol.degenerate = (sol.e1 - sol.e0) < kDegeneracyGap;
    if (!sol.degenerate) {
        sol.ground = vectors.col(0);
        return sol;
    }

    // Resolve the degenerate pair: maximize the total magnetization along the
    // axis perpendicular (in-plane) to the field over the spanned subspace.
    const double perp = model.field.axisAngle + std::numbers::pi / 2;
    const Eigen::Matrix2cd op = sigmaAlongAxis(perp);
    Eigen::MatrixXcd transformed(vectors.rows(), 2);
    for (int a = 0; a < 2; ++a) {
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(vectors.rows());
        for (int i = 1; i <= n; ++i) acc += applyOneSite(vectors.col(a), n, i, op);
        transformed.col(a) = acc;
    }
    Eigen::Matrix2cd m;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) m(a, b) = vectors.col(a).dot(transformed.col(b));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
    Eigen::Vector2cd mix = es.eigenvectors().col(1);  // largest eigenvalue
    sol.ground = (vectors * mix).normalized();
    return sol;
}

}  // namespace xy
