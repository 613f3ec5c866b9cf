#include "xy/mps.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "xy/linalg.hpp"

namespace xy {

namespace {

constexpr double kSpectrumFloor = 1e-14;   // weights below this are always dropped
constexpr double kDegenerateRtol = 1e-12;  // relative tie tolerance at the chi cut

void checkSite(int site, int n) {
    if (site < 1 || site > n)
        throw std::out_of_range("site " + std::to_string(site) + " outside 1.." +
                                std::to_string(n));
}

void checkBond(int bond, int n) {
    if (bond < 1 || bond > n - 1)
        throw std::out_of_range("bond " + std::to_string(bond) + " outside 1.." +
                                std::to_string(n - 1));
}

// Number of Schmidt weights to keep out of a descending probability vector.
int keepCount(const Eigen::VectorXd& p, const TruncationPolicy& policy) {
    int m = static_cast<int>(p.size());
    int keep = m;
    double tail = 0.0;
    while (keep > 1) {
        double next = tail + p[keep - 1];
        if (p[keep - 1] < kSpectrumFloor || next <= policy.weightCutoff) {
            tail = next;
            --keep;
        } else {
            break;
        }
    }
    if (keep > policy.maxBond) {
        keep = policy.maxBond;
        if (policy.keepDegenerate) {
            // Extend past the cap rather than split a degenerate multiplet.
            while (keep < m && p[keep] >= p[keep - 1] * (1.0 - kDegenerateRtol) &&
                   p[keep] >= kSpectrumFloor)
                ++keep;
        }
    }
    return keep;
}

}  // namespace

MatrixProductState MatrixProductState::productState(
    const std::vector<Eigen::Vector2cd>& locals) {
    if (locals.empty()) throw std::invalid_argument("product state needs at least one site");
    MatrixProductState psi;
    psi.n_ = static_cast<int>(locals.size());
    psi.b_.resize(psi.n_);
    psi.lambda_.assign(psi.n_ + 1, Eigen::VectorXd::Ones(1));
    for (int i = 0; i < psi.n_; ++i) {
        double nrm = locals[i].norm();
        if (std::abs(nrm - 1.0) > 1e-12)
            throw std::invalid_argument("local state at site " + std::to_string(i + 1) +
                                        " is not normalized");
        for (int s = 0; s < 2; ++s) {
            psi.b_[i][s].resize(1, 1);
            psi.b_[i][s](0, 0) = locals[i](s);
        }
    }
    psi.canonical_ = true;
    return psi;
}

int MatrixProductState::bondDim(int bond) const {
    if (bond < 0 || bond > n_) throw std::out_of_range("bond out of range");
    return static_cast<int>(lambda_[bond].size());
}

int MatrixProductState::maxBondDim() const {
    int chi = 1;
    for (const auto& lam : lambda_) chi = std::max(chi, static_cast<int>(lam.size()));
    return chi;
}

const Eigen::VectorXd& MatrixProductState::schmidtSpectrum(int bond) const {
    checkBond(bond, n_);
    return lambda_[bond];
}

double MatrixProductState::blockEntropy(int p) const {
    checkBond(p, n_);
    const Eigen::VectorXd& lam = lambda_[p];
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (lam[i] > 0.0) s -= lam[i] * std::log2(lam[i]);
    return s;
}

double MatrixProductState::applyTwoSiteGate(int bond, const Eigen::Matrix4cd& gate,
                                            const TruncationPolicy& policy) {
    checkBond(bond, n_);
    const int i = bond - 1;  // left site, 0-based
    const int chiL = static_cast<int>(b_[i][0].rows());
    const int chiR = static_cast<int>(b_[i + 1][0].cols());

    // theta[t1*2+t2] = sum_{s1 s2} gate((t1 t2),(s1 s2)) B_i[s1] B_{i+1}[s2]
    std::array<Eigen::MatrixXcd, 4> prod;
    for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2) prod[2 * s1 + s2] = b_[i][s1] * b_[i + 1][s2];
    std::array<Eigen::MatrixXcd, 4> theta;
    for (int t = 0; t < 4; ++t) {
        theta[t] = Eigen::MatrixXcd::Zero(chiL, chiR);
        for (int s = 0; s < 4; ++s)
            if (gate(t, s) != std::complex<double>(0.0)) theta[t] += gate(t, s) * prod[s];
    }

    // Hastings split: weight by the left spectrum only, never divide by it.
    Eigen::VectorXd sqrtLam = lambda_[bond - 1].cwiseSqrt();
    Eigen::MatrixXcd phi(2 * chiL, 2 * chiR);
    for (int t1 = 0; t1 < 2; ++t1)
        for (int t2 = 0; t2 < 2; ++t2)
            phi.block(t1 * chiL, t2 * chiR, chiL, chiR) =
                sqrtLam.asDiagonal() * theta[2 * t1 + t2];

    linalg::SvdResult svd = linalg::svd(phi);
    double total = svd.s.squaredNorm();
    if (total <= 0.0) throw std::runtime_error("gate application annihilated the state");
    Eigen::VectorXd p = svd.s.cwiseAbs2() / total;

    int keep = keepCount(p, policy);
    double keptWeight = p.head(keep).sum();
    double discarded = 1.0 - keptWeight;
    if (discarded < 0.0) discarded = 0.0;
    discardedTotal_ += discarded;

    lambda_[bond] = p.head(keep) / keptWeight;

    // Right tensor from the kept right singular vectors.
    for (int s2 = 0; s2 < 2; ++s2)
        b_[i + 1][s2] = svd.vh.block(0, s2 * chiR, keep, chiR);

    // Left tensor from theta against the kept right vectors; the division
    // renormalizes the state (the gate itself changes the norm).
    double scale = 1.0 / std::sqrt(total * keptWeight);
    for (int t1 = 0; t1 < 2; ++t1) {
        b_[i][t1].resize(chiL, keep);
        b_[i][t1].noalias() =
            (theta[2 * t1] * b_[i + 1][0].adjoint() + theta[2 * t1 + 1] * b_[i + 1][1].adjoint()) *
            scale;
    }
    canonical_ = false;
    return discarded;
}

void MatrixProductState::canonicalize() {
    // Left-to-right QR pass: b_ becomes left-canonical, carrying the remainder.
    Eigen::MatrixXcd carry = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = 0; i < n_; ++i) {
        const int r = static_cast<int>(carry.rows());
        const int chiR = static_cast<int>(b_[i][0].cols());
        Eigen::MatrixXcd stacked(2 * r, chiR);
        for (int s = 0; s < 2; ++s) stacked.block(s * r, 0, r, chiR) = carry * b_[i][s];
        const int k = std::min(2 * r, chiR);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stacked);
        Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(2 * r, k);
        carry = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        for (int s = 0; s < 2; ++s) b_[i][s] = q.block(s * r, 0, r, k);
    }
    // carry is now 1x1: global norm and phase. Keep the phase, drop the norm.
    std::complex<double> tail = carry(0, 0);
    double nrm = std::abs(tail);
    if (nrm <= 0.0) throw std::runtime_error("cannot canonicalize the zero state");
    std::complex<double> phase = tail / nrm;
    for (int s = 0; s < 2; ++s) b_[n_ - 1][s] *= phase;

    // Right-to-left SVD pass: rebuild right-canonical tensors and all spectra.
    Eigen::MatrixXcd carryR = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = n_ - 1; i >= 0; --i) {
        const int r = static_cast<int>(carryR.cols());
        const int chiL = static_cast<int>(b_[i][0].rows());
        Eigen::MatrixXcd wide(chiL, 2 * r);
        for (int s = 0; s < 2; ++s) wide.block(0, s * r, chiL, r) = b_[i][s] * carryR;
        linalg::SvdResult svd = linalg::svd(wide);
        Eigen::VectorXd p = svd.s.cwiseAbs2();
        double total = p.sum();
        if (total <= 0.0) throw std::runtime_error("cannot canonicalize the zero state");
        p /= total;
        int keep = static_cast<int>(p.size());
        while (keep > 1 && p[keep - 1] < kSpectrumFloor) --keep;
        double keptWeight = p.head(keep).sum();
        lambda_[i] = p.head(keep) / keptWeight;
        for (int s = 0; s < 2; ++s) b_[i][s] = svd.vh.block(0, s * r, keep, r);
        carryR = svd.u.leftCols(keep) * svd.s.head(keep).asDiagonal() /
                 std::sqrt(total * keptWeight);
    }
    // carryR is 1x1 with unit magnitude; fold its phase into the first site.
    std::complex<double> headPhase = carryR(0, 0);
    headPhase /= std::abs(headPhase);
    for (int s = 0; s < 2; ++s) b_[0][s] = headPhase * b_[0][s];
    lambda_[0] = Eigen::VectorXd::Ones(1);
    lambda_[n_] = Eigen::VectorXd::Ones(1);
    canonical_ = true;
}

double MatrixProductState::expectationOneSite(int site, const Eigen::Matrix2cd& op) const {
    checkSite(site, n_);
    const int i = site - 1;
    const Eigen::VectorXd& lam = lambda_[i];
    std::complex<double> val = 0.0;
    for (int sp = 0; sp < 2; ++sp)
        for (int s = 0; s < 2; ++s) {
            if (op(sp, s) == std::complex<double>(0.0)) continue;
            std::complex<double> e =
                (lam.asDiagonal() * b_[i][s]).cwiseProduct(b_[i][sp].conjugate()).sum();
            val += op(sp, s) * e;
        }
    return val.real();
}

double MatrixProductState::expectationBond(int bond, const Eigen::Matrix4cd& op) const {
    checkBond(bond, n_);
    const int i = bond - 1;
    const Eigen::VectorXd sq = lambda_[i].cwiseSqrt();
    std::array<Eigen::MatrixXcd, 4> theta;
    std::array<bool, 4> built{};
    auto block = [&](int s) -> const Eigen::MatrixXcd& {
        if (!built[s]) {
            theta[s] = sq.asDiagonal() * b_[i][s >> 1] * b_[i + 1][s & 1];
            built[s] = true;
        }
        return theta[s];
    };
    std::complex<double> val = 0.0;
    for (int t = 0; t < 4; ++t)
        for (int s = 0; s < 4; ++s) {
            if (op(t, s) == std::complex<double>(0.0)) continue;
            val += op(t, s) * block(s).cwiseProduct(block(t).conjugate()).sum();
        }
    return val.real();
}

double MatrixProductState::expectationTwoSite(int i, int j, const Eigen::Matrix2cd& opI,
                                              const Eigen::Matrix2cd& opJ) const {
    checkSite(i, n_);
    checkSite(j, n_);
    if (i == j) return expectationOneSite(i, (opI * opJ).eval());
    if (i > j) return expectationTwoSite(j, i, opJ, opI);

    const int a = i - 1;
    const Eigen::VectorXd& lam = lambda_[a];
    // F(c, cbar) carries the open bond indices of ket and bra.
    const int chi = static_cast<int>(b_[a][0].cols());
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(chi, chi);
    for (int sp = 0; sp < 2; ++sp)
        for (int s = 0; s < 2; ++s) {
            if (opI(sp, s) == std::complex<double>(0.0)) continue;
            f.noalias() +=
                opI(sp, s) * (b_[a][s].transpose() * lam.asDiagonal() * b_[a][sp].conjugate());
        }
    for (int m = a + 1; m < j - 1; ++m) {
        const int chiR = static_cast<int>(b_[m][0].cols());
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(chiR, chiR);
        for (int s = 0; s < 2; ++s)
            next.noalias() += b_[m][s].transpose() * f * b_[m][s].conjugate();
        f.swap(next);
    }
    const int z = j - 1;
    std::complex<double> val = 0.0;
    for (int sp = 0; sp < 2; ++sp)
        for (int s = 0; s < 2; ++s) {
            if (opJ(sp, s) == std::complex<double>(0.0)) continue;
            val += opJ(sp, s) * (b_[z][s].transpose() * f * b_[z][sp].conjugate()).trace();
        }
    return val.real();
}

double MatrixProductState::norm() const {
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = 0; i < n_; ++i) {
        const int chiR = static_cast<int>(b_[i][0].cols());
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(chiR, chiR);
        for (int s = 0; s < 2; ++s)
            next.noalias() += b_[i][s].adjoint() * f * b_[i][s];
        f.swap(next);
    }
    return std::sqrt(std::abs(f(0, 0).real()));
}

Eigen::VectorXcd MatrixProductState::denseVector() const {
    if (n_ > 20) throw std::invalid_argument("dense amplitudes limited to 20 sites");
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = 0; i < n_; ++i) {
        const int chiR = static_cast<int>(b_[i][0].cols());
        Eigen::MatrixXcd next(2 * v.rows(), chiR);
        for (int s = 0; s < 2; ++s) {
            // Basis index grows as (previous bits, s): site 1 most significant.
            for (Eigen::Index r = 0; r < v.rows(); ++r)
                next.row(2 * r + s) = v.row(r) * b_[i][s];
        }
        v.swap(next);
    }
    return Eigen::VectorXcd(v.col(0));
}

const MatrixProductState::SiteTensor& MatrixProductState::siteTensor(int site) const {
    checkSite(site, n_);
    return b_[site - 1];
}

void MatrixProductState::setSiteTensor(int site, SiteTensor t) {
    checkSite(site, n_);
    b_[site - 1] = std::move(t);
    canonical_ = false;
}

void MatrixProductState::setSchmidtSpectrum(int bond, Eigen::VectorXd lambda) {
    if (bond < 0 || bond > n_) throw std::out_of_range("bond out of range");
    lambda_[bond] = std::move(lambda);
}

void MatrixProductState::setCanonicalFlag(bool canonical) { canonical_ = canonical; }

}  // namespace xy
