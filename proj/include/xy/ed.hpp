#pragma once

#include <Eigen/Dense>

#include "xy/model.hpp"

// Dense exact diagonalization for small chains; the reference the tensor
// network is checked against. Basis index convention matches
// MatrixProductState::denseVector: site 1 is the most significant bit.

namespace xy {

struct EdSolution {
    double e0 = 0.0;
    double e1 = 0.0;
    Eigen::VectorXcd ground;
    bool degenerate = false;  // e1 - e0 below the degeneracy threshold
};

// Lowest two levels (at most 14 sites). When the gap is below 1e-10 the
// returned state is the combination within the two-dimensional subspace that
// maximizes the total transverse magnetization, i.e. a symmetry-broken
// representative instead of an arbitrary cat state.
EdSolution denseGroundState(const SpinChainModel& model);

Eigen::MatrixXcd denseHamiltonian(const SpinChainModel& model);

// op acting on one site of a dense state.
Eigen::VectorXcd applyOneSite(const Eigen::VectorXcd& state, int n, int site,
                              const Eigen::Matrix2cd& op);

double edSiteExpectation(const Eigen::VectorXcd& state, int n, int site,
                         const Eigen::Matrix2cd& op);

// Per-site <sigma(angle)> profile.
Eigen::VectorXd edMagnetizationProfile(const Eigen::VectorXcd& state, int n, double angle);

// Entanglement entropy of the first p sites, in bits; Schmidt weights below
// 1e-14 are skipped.
double edBlockEntropy(const Eigen::VectorXcd& state, int n, int p);

}  // namespace xy
