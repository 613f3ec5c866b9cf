#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

// Spin-1/2 XY chain in a site-dependent in-plane field:
//
//   H = -sum_i (sx_i sx_{i+1} + sy_i sy_{i+1}) - sum_i h_i n(theta).s_i
//
// with n(theta) = (cos theta, sin theta, 0) the field axis in the XY plane.
// Sites are 1-based; h_i lives at values[i-1].

namespace xy {

Eigen::Matrix2cd pauliX();
Eigen::Matrix2cd pauliY();
Eigen::Matrix2cd pauliZ();

// cos(theta) sx + sin(theta) sy
Eigen::Matrix2cd sigmaAlongAxis(double theta);

// kron(a, b) in the |s1 s2> basis with index 2*s1 + s2; a acts on the left site.
Eigen::Matrix4cd twoSiteKron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);

struct FieldSpec {
    enum class Kind { Uniform, Staggered, Sinusoidal, GaussianRandom, Explicit };

    Kind kind = Kind::Uniform;
    double strength = 0.0;    // uniform value / staggered or sinusoidal amplitude
    double waveNumber = 0.0;  // sinusoidal only, in (0, pi]
    double sigma = 0.0;       // gaussian width
    std::uint64_t seed = 0;   // gaussian draw seed
    std::vector<double> values;  // explicit profile

    static FieldSpec uniform(double h);
    static FieldSpec staggered(double amplitude);
    static FieldSpec sinusoidal(double amplitude, double waveNumber);
    static FieldSpec gaussianRandom(double sigma, std::uint64_t seed);
    static FieldSpec explicitValues(std::vector<double> values);
};

struct FieldConfiguration {
    Eigen::VectorXd values;  // per-site strengths h_1..h_N
    double axisAngle = 0.0;
};

// Realize a field spec on an n-site chain. Staggered means h_i = (-1)^i h0
// (site 1 gets -h0); sinusoidal means h_i = h sin(k i).
FieldConfiguration buildField(const FieldSpec& spec, int n, double axisAngle = 0.0);

struct SpinChainModel {
    int n = 0;
    FieldConfiguration field;
};

SpinChainModel makeModel(const FieldSpec& spec, int n, double axisAngle = 0.0);

// Two-site term at bond b (sites b, b+1) with the field split across bonds:
// a boundary site puts its whole field on its only bond, an interior site
// puts half on each neighbor. Summing all bond terms reassembles H exactly.
Eigen::Matrix4cd bondHamiltonian(const SpinChainModel& model, int bond);

// Imaginary-time propagators exp(-dt h_bond) for a second-order split:
// odd bonds 1,3,5,... and even bonds 2,4,6,... The odd gates come in both
// half-step and full-step flavors so sweeps can merge adjacent half steps.
struct TrotterGateSet {
    double stepSize = 0.0;
    std::vector<Eigen::Matrix4cd> oddHalfGates;
    std::vector<Eigen::Matrix4cd> oddFullGates;
    std::vector<Eigen::Matrix4cd> evenGates;
    std::vector<int> oddBonds;
    std::vector<int> evenBonds;
};

TrotterGateSet buildGates(const SpinChainModel& model, double stepSize);

}  // namespace xy
