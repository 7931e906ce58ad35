#pragma once

#include <Eigen/Dense>
#include <functional>

#include "ncatom/quadrature.hpp"
#include "ncatom/roots.hpp"
#include "ncatom/types.hpp"

namespace ncatom {

// Analytic machinery of the Coulomb self-consistent problem, in the global
// units convention: lengths in reduced Compton wavelengths hbar/(mu c),
// energies in mu c^2, forces in F0 = (mu c^2)^2 / (hbar c). The Coulomb force
// magnitude is then alphaZ/r^2 and the noncommutativity operator reads
// eps(r) = alphaZ / (alphaZ + r^2).

enum class EtaBranch {
    UpperRoot,  // largest root of g(eta) = eta, the physical branch
    Tangent,    // two roots merged within the tangency tolerance (critical point)
};

/// Converged root of the self-consistency equation eta = g(eta).
struct EtaSolution {
    double eta;       // eta = 1 - epsilon, in (0, 1]
    double epsilon;   // noncommutativity parameter
    double residual;  // |g(eta) - eta| at the returned root
    int root_count;   // roots located on the scan interval
    EtaBranch branch;
};

/// Knobs of the eta root search. The scan floor 0.01 is below every physical
/// upper root; lower it only to chart the unphysical branch.
struct EtaSolveOptions {
    double eta_min{0.01};
    int scan_points{512};
    double root_tolerance{1e-12};
    double tangency_tolerance{1e-6};
    QuadratureSpec quadrature{};
};

/// Normalized bound-state radial function chi(r) = N r^{l+1} F(-n+l+1, 2l+2,
/// 2r/s) exp(-r/s) with the Bohr-type length scale s = n eta^2 / alphaZ.
struct RadialState {
    QuantumNumbers qn;
    double eta;
    double normalization;  // N
    double length_scale;   // s, in Compton units
};

/// Terminating confluent hypergeometric series F(a, b, x) for non-positive
/// integer a, evaluated by Horner on the exact rational coefficients.
/// Throws InvalidDegree for a > 0.
double confluent_hypergeometric_poly(int a, int b, double x);

/// Prefactor S_nl = (n+l)! / [ ((2l+1)!)^2 * 2n * (n-l-1)! ].
double snl_factor(QuantumNumbers qn);

RadialState make_radial_state(QuantumNumbers qn, double eta, Coupling c);

/// Radial amplitude chi(r) of a state, r in Compton units.
double radial_chi(const RadialState& state, double r);

/// Right-hand side g(eta) of the self-consistency equation: the radial density
/// average of the force factor, g(eta) = S_nl Int x^{2l+2} e^-x F^2(x)
/// (1 + 4 alphaZ^3/(n^2 eta^4 x^2))^-1 dx.
double rhs_eta(double eta, QuantumNumbers qn, Coupling c, const QuadratureSpec& spec = {});

/// Location and value of the maximum of g(eta) - eta over (eta_min, 1].
/// Nonnegative excess means the self-consistency equation has a root; the
/// maximizer at the existence boundary is the tangency point.
struct EtaExcess {
    double eta;
    double excess;
};
EtaExcess max_eta_excess(QuantumNumbers qn, Coupling c, double eta_min = 0.01,
                         const QuadratureSpec& spec = {});

/// Solves eta = g(eta), returning the largest root. Throws NoBoundState when
/// no root exists (supercritical coupling).
EtaSolution solve_eta(QuantumNumbers qn, Coupling c, const EtaSolveOptions& options = {});

/// Largest alphaZ for which the state (n, l) still exists, located by
/// bisecting the existence predicate max_eta(g - eta) >= 0.
Coupling critical_coupling(QuantumNumbers qn, double tol = 1e-7,
                           const QuadratureSpec& spec = {});

/// Density-weighted force average eps = Int chi^2(r) F(r)/(F(r)+1) dr on a
/// uniform grid (forces in F0 units). The density must integrate to 1 within
/// 1e-8, else NotNormalized.
double epsilon_from_density(const Eigen::ArrayXd& r, const Eigen::ArrayXd& chi_squared,
                            const std::function<double(double)>& force_magnitude);

}  // namespace ncatom
