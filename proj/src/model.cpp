#include "xy/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "xy/rng.hpp"

namespace xy {

namespace {
const std::complex<double> kI(0.0, 1.0);
}

Eigen::Matrix2cd pauliX() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd pauliY() {
    Eigen::Matrix2cd m;
    m << 0, -kI, kI, 0;
    return m;
}

Eigen::Matrix2cd pauliZ() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Eigen::Matrix2cd sigmaAlongAxis(double theta) {
    return std::cos(theta) * pauliX() + std::sin(theta) * pauliY();
}

Eigen::Matrix4cd twoSiteKron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
}

FieldSpec FieldSpec::uniform(double h) {
    FieldSpec s;
    s.kind = Kind::Uniform;
    s.strength = h;
    return s;
}

FieldSpec FieldSpec::staggered(double amplitude) {
    FieldSpec s;
    s.kind = Kind::Staggered;
    s.strength = amplitude;
    return s;
}

FieldSpec FieldSpec::sinusoidal(double amplitude, double waveNumber) {
    FieldSpec s;
    s.kind = Kind::Sinusoidal;
    s.strength = amplitude;
    s.waveNumber = waveNumber;
    return s;
}

FieldSpec FieldSpec::gaussianRandom(double sigma, std::uint64_t seed) {
    FieldSpec s;
    s.kind = Kind::GaussianRandom;
    s.sigma = sigma;
    s.seed = seed;
    return s;
}

FieldSpec FieldSpec::explicitValues(std::vector<double> values) {
    FieldSpec s;
    s.kind = Kind::Explicit;
    s.values = std::move(values);
    return s;
}

FieldConfiguration buildField(const FieldSpec& spec, int n, double axisAngle) {
    if (n < 1) throw std::invalid_argument("chain needs at least one site");
    FieldConfiguration f;
    f.axisAngle = axisAngle;
    f.values.resize(n);
    switch (spec.kind) {
        case FieldSpec::Kind::Uniform:
            f.values.setConstant(spec.strength);
            break;
        case FieldSpec::Kind::Staggered:
            for (int i = 1; i <= n; ++i)
                f.values[i - 1] = (i % 2 == 0 ? spec.strength : -spec.strength);
            break;
        case FieldSpec::Kind::Sinusoidal:
            if (!(spec.waveNumber > 0.0 && spec.waveNumber <= std::numbers::pi))
                throw std::invalid_argument("sinusoidal wave number must lie in (0, pi]");
            for (int i = 1; i <= n; ++i)
                f.values[i - 1] = spec.strength * std::sin(spec.waveNumber * i);
            break;
        case FieldSpec::Kind::GaussianRandom: {
            if (spec.sigma < 0.0) throw std::invalid_argument("gaussian width must be >= 0");
            std::vector<double> g = rng::gaussianVector(spec.seed, n);
            for (int i = 0; i < n; ++i) f.values[i] = spec.sigma * g[i];
            break;
        }
        case FieldSpec::Kind::Explicit:
            if (static_cast<int>(spec.values.size()) != n)
                throw std::invalid_argument("explicit field has " +
                                            std::to_string(spec.values.size()) +
                                            " entries for " + std::to_string(n) + " sites");
            for (int i = 0; i < n; ++i) f.values[i] = spec.values[i];
            break;
    }
    return f;
}

SpinChainModel makeModel(const FieldSpec& spec, int n, double axisAngle) {
    if (n < 2) throw std::invalid_argument("chain needs at least two sites");
    return SpinChainModel{n, buildField(spec, n, axisAngle)};
}

Eigen::Matrix4cd bondHamiltonian(const SpinChainModel& model, int bond) {
    if (bond < 1 || bond > model.n - 1)
        throw std::out_of_range("bond " + std::to_string(bond) + " outside 1.." +
                                std::to_string(model.n - 1));
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd axis = sigmaAlongAxis(model.field.axisAngle);
    const double wl = (bond == 1) ? 1.0 : 0.5;
    const double wr = (bond + 1 == model.n) ? 1.0 : 0.5;
    Eigen::Matrix4cd h = -twoSiteKron(pauliX(), pauliX()) - twoSiteKron(pauliY(), pauliY());
    h -= wl * model.field.values[bond - 1] * twoSiteKron(axis, id);
    h -= wr * model.field.values[bond] * twoSiteKron(id, axis);
    return h;
}

TrotterGateSet buildGates(const SpinChainModel& model, double stepSize) {
    if (!(stepSize > 0.0)) throw std::invalid_argument("step size must be positive");
    TrotterGateSet gates;
    gates.stepSize = stepSize;
    auto propagator = [](const Eigen::Matrix4cd& h, double dt) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
        Eigen::Vector4d w = (-dt * es.eigenvalues().array()).exp().matrix();
        return Eigen::Matrix4cd(es.eigenvectors() * w.asDiagonal() *
                                es.eigenvectors().adjoint());
    };
    for (int b = 1; b <= model.n - 1; ++b) {
        Eigen::Matrix4cd h = bondHamiltonian(model, b);
        if (b % 2 == 1) {
            gates.oddBonds.push_back(b);
            gates.oddHalfGates.push_back(propagator(h, 0.5 * stepSize));
            gates.oddFullGates.push_back(propagator(h, stepSize));
        } else {
            gates.evenBonds.push_back(b);
            gates.evenGates.push_back(propagator(h, stepSize));
        }
    }
    return gates;
}

}  // namespace xy
