#pragma once

#include <functional>
#include <vector>

#include "ncatom/types.hpp"

namespace ncatom {

/// Sign-change bracket: lo < hi with f_lo and f_hi of opposite sign (or zero).
struct Bracket {
    double lo, hi;
    double f_lo, f_hi;
};

/// Refined root together with the residual |f(root)|.
struct RootEstimate {
    double x;
    double residual;
};

/// Scans f on a uniform grid of scan_points over [lo, hi], brackets every sign
/// change and refines each bracket by hybrid bisection/secant until the bracket
/// width drops below tol. Returns all roots in ascending order; an empty list
/// means no sign change was seen (the caller interprets).
std::vector<RootEstimate> find_roots_on_interval(const std::function<double(double)>& f,
                                                 double lo, double hi, int scan_points = 512,
                                                 double tol = 1e-12);

/// Boundary point where a monotone boolean predicate flips, to within tol.
/// Throws InvalidBracket when p(lo) == p(hi).
double bisect_predicate_boundary(const std::function<bool(double)>& p, double lo, double hi,
                                 double tol);

}  // namespace ncatom
