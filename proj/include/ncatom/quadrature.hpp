#pragma once

#include <functional>

#include "ncatom/types.hpp"

namespace ncatom {

/// Tolerance contract for adaptive quadrature. The returned integral carries
/// an estimated error below max(relative_tolerance*|I|, absolute_tolerance).
struct QuadratureSpec {
    double relative_tolerance{1e-12};
    double absolute_tolerance{1e-14};
    int max_subdivisions{4000};
};

inline void validate(const QuadratureSpec& spec) {
    if (!(spec.relative_tolerance > 0.0) || !(spec.absolute_tolerance > 0.0))
        throw std::invalid_argument("quadrature tolerances must be strictly positive");
    if (spec.max_subdivisions < 1)
        throw std::invalid_argument("max_subdivisions must be >= 1");
}

/// Integral of f over [0, inf) for integrands decaying at least exponentially.
/// The upper cut point is found adaptively from samples of |f|; the finite part
/// is handled by adaptive Gauss-Kronrod (G7,K15) subdivision. Deterministic:
/// identical inputs evaluate identical nodes.
///
/// Throws NonConvergence when the subdivision budget is exhausted.
double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec = {});

}  // namespace ncatom
