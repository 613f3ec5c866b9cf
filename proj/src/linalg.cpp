#include "xy/linalg.hpp"

#include <complex>
#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace xy::linalg {

namespace {

lapack_complex_double* lp(Eigen::MatrixXcd& m) {
    return reinterpret_cast<lapack_complex_double*>(m.data());
}

// Rotate each singular pair so the largest-|.| entry of the left vector is
// real positive. Ties (exact equal magnitudes) resolve to the lowest row
// index, which keeps the choice deterministic.
void fixGauge(Eigen::MatrixXcd& u, Eigen::MatrixXcd& vh) {
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const double a = std::abs(u(i, k));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (best <= 0.0) continue;
        const std::complex<double> phase = u(imax, k) / best;
        u.col(k) *= std::conj(phase);
        if (k < vh.rows()) vh.row(k) *= phase;
    }
}

}  // namespace

SvdResult svd(const Eigen::MatrixXcd& m) {
    const lapack_int rows = static_cast<lapack_int>(m.rows());
    const lapack_int cols = static_cast<lapack_int>(m.cols());
    const lapack_int r = std::min(rows, cols);

    SvdResult out;
    out.u.resize(rows, r);
    out.s.resize(r);
    out.vh.resize(r, cols);

    Eigen::MatrixXcd work = m;
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, lp(work),
                                     rows, out.s.data(), lp(out.u), rows,
                                     lp(out.vh), r);
    if (info != 0) {
        // zgesdd occasionally fails to converge on hard inputs; zgesvd is
        // slower but more robust.
        work = m;
        Eigen::VectorXd superb(r > 1 ? r - 1 : 1);
        info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', rows, cols, lp(work),
                              rows, out.s.data(), lp(out.u), rows, lp(out.vh),
                              r, superb.data());
        if (info != 0)
            throw std::runtime_error("svd: LAPACK failed to converge (info=" +
                                     std::to_string(info) + ")");
    }
    fixGauge(out.u, out.vh);
    return out;
}

HermitianEig hermitianLowest(Eigen::MatrixXcd h, int k) {
    if (h.rows() != h.cols()) throw std::invalid_argument("hermitianLowest: matrix not square");
    const lapack_int n = static_cast<lapack_int>(h.rows());
    if (k < 1 || k > n) throw std::invalid_argument("hermitianLowest: bad eigenpair count");

    HermitianEig out;
    out.values.resize(n);  // zheevr writes only the first k, sized for safety
    out.vectors.resize(n, k);
    lapack_int found = 0;
    std::vector<lapack_int> isuppz(2 * std::max(1, k));
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', n, lp(h), n, 0.0, 0.0, 1, k, 0.0,
        &found, out.values.data(), lp(out.vectors), n, isuppz.data());
    if (info != 0)
        throw std::runtime_error("hermitianLowest: zheevr failed (info=" +
                                 std::to_string(info) + ")");
    if (found != k)
        throw std::runtime_error("hermitianLowest: zheevr returned " +
                                 std::to_string(found) + " of " + std::to_string(k) +
                                 " eigenpairs");
    out.values.conservativeResize(k);
    return out;
}

SymmetricEig symmetricLowest(Eigen::MatrixXd h, int k) {
    if (h.rows() != h.cols()) throw std::invalid_argument("symmetricLowest: matrix not square");
    const lapack_int n = static_cast<lapack_int>(h.rows());
    if (k < 1 || k > n) throw std::invalid_argument("symmetricLowest: bad eigenpair count");

    SymmetricEig out;
    out.values.resize(n);
    out.vectors.resize(n, k);
    lapack_int found = 0;
    std::vector<lapack_int> isuppz(2 * std::max(1, k));
    const lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', n, h.data(), n, 0.0, 0.0, 1, k, 0.0,
        &found, out.values.data(), out.vectors.data(), n, isuppz.data());
    if (info != 0)
        throw std::runtime_error("symmetricLowest: dsyevr failed (info=" +
                                 std::to_string(info) + ")");
    if (found != k)
        throw std::runtime_error("symmetricLowest: dsyevr returned " +
                                 std::to_string(found) + " of " + std::to_string(k) +
                                 " eigenpairs");
    out.values.conservativeResize(k);
    return out;
}

}  // namespace xy::linalg
