#include "ncatom/spectrum.hpp"

#include <array>
#include <cmath>

namespace ncatom {

double energy_model(QuantumNumbers qn, Coupling c, double epsilon) {
    validate(qn);
    validate(c);
    if (!(epsilon >= 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in [0, 1)");
    const double eta = 1.0 - epsilon;
    return energy_schrodinger(qn, c) / (eta * eta);
}

double energy_schrodinger(QuantumNumbers qn, Coupling c) {
    validate(qn);
    validate(c);
    return -c.alphaZ * c.alphaZ / (2.0 * qn.n * qn.n);
}

double energy_klein_gordon(QuantumNumbers qn, Coupling c) {
    validate(qn);
    validate(c);
    const double aZ = c.alphaZ;
    const double half = qn.l + 0.5;
    if (aZ > half)
        throw BeyondCriticalCoupling("Klein-Gordon level falls to the center for alphaZ > " +
                                     std::to_string(half));
    const double root = std::sqrt(std::max(half * half - aZ * aZ, 0.0));
    const double denom = qn.n - qn.l - 0.5 + root;
    return -1.0 + 1.0 / std::sqrt(1.0 + aZ * aZ / (denom * denom));
}

double mean_radius(QuantumNumbers qn, Coupling c, double eta, const QuadratureSpec& spec) {
    const RadialState state = make_radial_state(qn, eta, c);
    // Integrate in the scale-free variable x = 2r/s so the e^-x decay is
    // always O(1) for the cut finder, whatever the coupling.
    const double s = state.length_scale;
    auto integrand = [&](double x) {
        const double r = 0.5 * s * x;
        const double chi = radial_chi(state, r);
        return chi * chi * r * (0.5 * s);
    };
    return integrate_semi_infinite(integrand, spec);
}

LevelResult solve_level(QuantumNumbers qn, Coupling c, const EtaSolveOptions& options) {
    const EtaSolution sol = solve_eta(qn, c, options);
    LevelResult out;
    out.qn = qn;
    out.coupling = c;
    out.epsilon = sol.epsilon;
    out.eta = sol.eta;
    out.energy_schrodinger = energy_schrodinger(qn, c);
    out.energy_model = out.energy_schrodinger / (sol.eta * sol.eta);
    try {
        out.energy_klein_gordon = energy_klein_gordon(qn, c);
    } catch (const BeyondCriticalCoupling&) {
        out.energy_klein_gordon = std::nullopt;  // model level may still exist here
    }
    out.mean_radius = mean_radius(qn, c, sol.eta, options.quadrature);
    out.root_count = sol.root_count;
    out.residual = sol.residual;
    return out;
}

std::optional<QuantumNumbers> ground_state(Coupling c,
                                           std::span<const QuantumNumbers> candidates,
                                           const EtaSolveOptions& options) {
    if (candidates.empty()) throw std::invalid_argument("candidate set must be nonempty");
    std::optional<QuantumNumbers> best;
    double best_energy = 0.0;
    for (const QuantumNumbers& qn : candidates) {
        try {
            const EtaSolution sol = solve_eta(qn, c, options);
            const double e = energy_model(qn, c, sol.epsilon);
            if (!best || e < best_energy) {
                best = qn;
                best_energy = e;
            }
        } catch (const NoBoundState&) {
            // state absent at this coupling; skip
        }
    }
    return best;
}

std::optional<QuantumNumbers> ground_state(Coupling c, const EtaSolveOptions& options) {
    static constexpr std::array<QuantumNumbers, 3> kDefault{
        QuantumNumbers{1, 0}, QuantumNumbers{2, 0}, QuantumNumbers{2, 1}};
    return ground_state(c, std::span<const QuantumNumbers>(kDefault), options);
}

CommutatorTable commutator_table(const MassPair& masses, double epsilon) {
    validate(masses);
    if (!(epsilon >= 0.0) || epsilon > 1.0)
        throw std::invalid_argument("epsilon must lie in [0, 1]");
    const double m1 = masses.m1 / masses.total();
    const double m2 = masses.m2 / masses.total();
    return {1.0 - m2 * epsilon, 1.0 - m1 * epsilon, m2 * epsilon, m1 * epsilon, 0.0, 0.0};
}

AngularCoefficients angular_coefficients(const MassPair& masses, double epsilon) {
    validate(masses);
    if (!(epsilon >= 0.0) || epsilon > 1.0)
        throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (epsilon == 1.0)
        throw DegenerateEpsilon("angular coefficients are singular at epsilon = 1");
    const double m1 = masses.m1 / masses.total();
    const double m2 = masses.m2 / masses.total();
    const double inv = 1.0 / (1.0 - epsilon);
    return {(1.0 - m1 * epsilon) * inv, -m1 * epsilon * inv, -m2 * epsilon * inv,
            (1.0 - m2 * epsilon) * inv};
}

}  // namespace ncatom
