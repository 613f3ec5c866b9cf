#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

// Matrix product state in right-canonical form.
//
// Site tensors are stored as B[site][s] with s the physical spin index, each
// a (chiL x chiR) matrix. Bond b (1-based, between sites b and b+1) carries a
// Schmidt spectrum stored as probabilities lambda_i (the squared Schmidt
// coefficients), descending, with sum 1; the singular values are their
// square roots. Gate application follows Hastings' update: the two-site
// block is weighted by the left spectrum only for the SVD, so no division
// by small Schmidt coefficients ever happens.
//
// Sites run 1..N and bonds 1..N-1 throughout the public interface.

namespace xy {

struct TruncationPolicy {
    int maxBond = 64;
    double weightCutoff = 1e-10;  // drop trailing weights summing below this
    bool keepDegenerate = true;   // never split a degenerate multiplet at the chi cut
};

class MatrixProductState {
public:
    using SiteTensor = std::array<Eigen::MatrixXcd, 2>;

    // Product state from per-site local states; each must be normalized.
    static MatrixProductState productState(const std::vector<Eigen::Vector2cd>& locals);

    int siteCount() const { return n_; }
    int bondDim(int bond) const;  // bond 0..N; the edges are trivially 1
    int maxBondDim() const;
    double discardedWeightTotal() const { return discardedTotal_; }
    bool isCanonical() const { return canonical_; }

    // Schmidt probabilities at an interior bond, descending, sum 1.
    const Eigen::VectorXd& schmidtSpectrum(int bond) const;

    // Block entropy S(p) = -sum lambda_i log2 lambda_i of the first p sites, in bits.
    double blockEntropy(int p) const;

    // Apply a two-site gate at bond b and re-truncate; returns the discarded
    // Schmidt weight. Gate basis: |s_b s_{b+1}> with row/column index
    // 2*s_b + s_{b+1}. The gate need not be unitary (imaginary-time
    // propagators are not); the state is renormalized after the split.
    double applyTwoSiteGate(int bond, const Eigen::Matrix4cd& gate,
                            const TruncationPolicy& policy);

    // Restore exact right-canonical form: a left-to-right QR pass followed by
    // a right-to-left SVD pass that rebuilds every bond spectrum, then
    // normalize. Observables are exact afterwards.
    void canonicalize();

    // Expectation values. Exact in canonical form; during an evolution they
    // carry the O(accumulated truncation) error of the approximate form.
    double expectationOneSite(int site, const Eigen::Matrix2cd& op) const;
    double expectationTwoSite(int i, int j, const Eigen::Matrix2cd& opI,
                              const Eigen::Matrix2cd& opJ) const;
    double expectationBond(int bond, const Eigen::Matrix4cd& op) const;

    double norm() const;

    // Full 2^N amplitude vector, basis index (s_1 s_2 ... s_N) with site 1
    // the most significant bit. Test/oracle support; guarded to N <= 20.
    Eigen::VectorXcd denseVector() const;

    const SiteTensor& siteTensor(int site) const;
    void setSiteTensor(int site, SiteTensor t);  // checkpoint restore path
    void setSchmidtSpectrum(int bond, Eigen::VectorXd lambda);
    void setCanonicalFlag(bool canonical);  // restore path: tensors came from a canonical state

private:
    MatrixProductState() = default;

    int n_ = 0;
    std::vector<SiteTensor> b_;           // size N, 0-based internally
    std::vector<Eigen::VectorXd> lambda_; // size N+1, trivial at 0 and N
    double discardedTotal_ = 0.0;
    bool canonical_ = false;
};

}  // namespace xy
