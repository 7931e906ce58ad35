#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ncatom/types.hpp"

namespace ncatom {

// Independent numerical path for the self-consistent radial problem: a
// two-sided Numerov shooting eigensolver at fixed eta plus the damped
// fixed-point loop that closes the force-average equation. Works for any
// central potential with bound states, in the global units convention.

/// Uniform radial grid in Compton units.
struct RadialGrid {
    double r_min{1e-6};
    double r_max{50.0};
    int point_count{1000};

    double spacing() const { return (r_max - r_min) / (point_count - 1); }
    double radius(int i) const { return r_min + spacing() * i; }
};

inline void validate(const RadialGrid& grid) {
    if (!(grid.r_min > 0.0) || !(grid.r_min < grid.r_max))
        throw std::invalid_argument("radial grid requires 0 < r_min < r_max");
    if (grid.point_count < 1000)
        throw std::invalid_argument("radial grid requires at least 1000 points");
}

/// Central potential V(r) in mu c^2 units and its force magnitude |dV/dr| in
/// F0 units.
struct PotentialSpec {
    std::function<double(double)> potential;
    std::function<double(double)> force_magnitude;
};

/// Coulomb attraction V(r) = -alphaZ/r with force alphaZ/r^2.
PotentialSpec coulomb_potential(Coupling c);

/// Grid eigenfunction with its eigenvalue; chi is normalized so that
/// sum(chi^2) * spacing = 1 and has node_count = n - l - 1 interior nodes.
struct NumericEigenstate {
    RadialGrid grid;
    QuantumNumbers qn;
    Eigen::ArrayXd chi;
    double eigenvalue{0.0};
    int node_count{0};
};

struct SelfConsistentOptions {
    int max_iterations{200};
    double damping{0.5};
    double tolerance{1e-10};
};

struct SelfConsistentResult {
    double epsilon{0.0};
    NumericEigenstate eigenstate;
    int iterations{0};
    std::vector<double> epsilon_history;
};

/// Box and resolution sized to the state: r_max = 50 n^2 eta^2 / alphaZ and
/// spacing at 1/400 of the exponential length scale n eta^2 / alphaZ.
RadialGrid default_grid(QuantumNumbers qn, Coupling c, double eta);

/// Solves the radial equation -(eta^2/2)(chi'' - l(l+1) chi/r^2) + V chi =
/// E chi by Numerov integration from both ends with log-derivative matching
/// at the outer turning point; the energy is isolated by node-count bisection
/// and refined on the matching defect.
///
/// Throws EigenvalueNotBracketed when no energy window isolates the level and
/// GridTooSmall when the grid cannot represent it.
NumericEigenstate shoot_eigenvalue(QuantumNumbers qn, const PotentialSpec& pot, double eta,
                                   const RadialGrid& grid);

/// Damped fixed-point iteration of eps -> density average of F/(F+1):
/// starts at eps = 0, re-solves the eigenstate at eta = 1 - eps each sweep and
/// applies half of the update until |delta eps| < tolerance.
///
/// Throws IterationDiverged (budget exhausted or oscillation) and NoBoundState
/// when the eigensolver fails mid-iteration, the numerical signature of a
/// supercritical coupling.
SelfConsistentResult self_consistent_solve(QuantumNumbers qn, const PotentialSpec& pot,
                                           const RadialGrid& grid,
                                           const SelfConsistentOptions& options = {});

}  // namespace ncatom
