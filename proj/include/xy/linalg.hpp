#pragma once

#include <Eigen/Dense>

// Thin wrappers around the LAPACKE decompositions we rely on. Everything
// here is deterministic: same input bytes, same output bytes. The SVD
// additionally fixes the phase gauge of each singular pair so that
// downstream truncation decisions are bit-reproducible across runs.

namespace xy::linalg {

struct SvdResult {
    Eigen::MatrixXcd u;   // m x r, columns are left singular vectors
    Eigen::VectorXd s;    // r, descending, non-negative
    Eigen::MatrixXcd vh;  // r x n, rows are conjugated right singular vectors
};

// Thin SVD of a complex matrix (r = min(m, n)). Uses zgesdd with a
// zgesvd retry, then fixes each pair's phase by rotating the
// largest-magnitude entry of the left vector to the positive real axis.
SvdResult svd(const Eigen::MatrixXcd& m);

struct HermitianEig {
    Eigen::VectorXd values;    // ascending
    Eigen::MatrixXcd vectors;  // one column per eigenpair
};

struct SymmetricEig {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

// Lowest k eigenpairs of a Hermitian (zheevr) / real symmetric (dsyevr)
// matrix. The input is taken by value: LAPACK overwrites it, and the
// caller usually has no further use for a 2^N x 2^N matrix anyway.
HermitianEig hermitianLowest(Eigen::MatrixXcd h, int k);
SymmetricEig symmetricLowest(Eigen::MatrixXd h, int k);

}  // namespace xy::linalg
