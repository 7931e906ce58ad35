#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ncatom/coulomb.hpp"
#include "ncatom/types.hpp"

namespace ncatom {

/// Full per-state output: self-consistent model level next to the Schrodinger
/// and Klein-Gordon baselines. Energies in mu c^2, lengths in Compton units.
struct LevelResult {
    QuantumNumbers qn;
    Coupling coupling;
    double epsilon;
    double eta;
    double energy_model;
    double energy_schrodinger;
    std::optional<double> energy_klein_gordon;  // absent above the KG critical coupling
    double mean_radius;
    int root_count;
    double residual;
};

/// Quantum Poisson brackets {x_k, p_m} etc. for the two-particle system.
struct CommutatorTable {
    double x1p1, x2p2, x1p2, x2p1, x1x2, p1p2;
};

/// Coefficients combining [r_k x p_m] into the conserved angular momentum.
struct AngularCoefficients {
    double c11, c12, c21, c22;
};

/// Model level energy -(alphaZ)^2 / (2 n^2 (1 - eps)^2).
double energy_model(QuantumNumbers qn, Coupling c, double epsilon);

/// Schrodinger baseline -(alphaZ)^2 / (2 n^2).
double energy_schrodinger(QuantumNumbers qn, Coupling c);

/// Klein-Gordon level for a spinless particle of reduced mass in the Coulomb
/// field. Throws BeyondCriticalCoupling for alphaZ > l + 1/2, where the level
/// falls to the center.
double energy_klein_gordon(QuantumNumbers qn, Coupling c);

/// Mean interparticle distance <r> by quadrature over the radial density.
double mean_radius(QuantumNumbers qn, Coupling c, double eta,
                   const QuadratureSpec& spec = {});

/// Solves the self-consistency equation and assembles the level report.
/// Propagates NoBoundState above the critical coupling.
LevelResult solve_level(QuantumNumbers qn, Coupling c, const EtaSolveOptions& options = {});

/// State of lowest model energy among the candidates that still exist;
/// std::nullopt when none does.
std::optional<QuantumNumbers> ground_state(Coupling c,
                                           std::span<const QuantumNumbers> candidates,
                                           const EtaSolveOptions& options = {});

/// Default candidate set {1S, 2S, 2P}.
std::optional<QuantumNumbers> ground_state(Coupling c, const EtaSolveOptions& options = {});

CommutatorTable commutator_table(const MassPair& masses, double epsilon);

/// Throws DegenerateEpsilon at epsilon = 1 (strongly bound limit).
AngularCoefficients angular_coefficients(const MassPair& masses, double epsilon);

}  // namespace ncatom
