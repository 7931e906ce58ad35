#include "ncatom/roots.hpp"

#include <cmath>

namespace ncatom {
namespace {

RootEstimate refine(const std::function<double(double)>& f, Bracket br, double tol) {
    double lo = br.lo, hi = br.hi, flo = br.f_lo, fhi = br.f_hi;
    // Secant step when it lands well inside the bracket, bisection otherwise.
    // The 1/8 interior guard bounds the worst-case contraction at 7/8 per step.
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        double x = mid;
        if (fhi != flo) {
            const double xs = hi - fhi * (hi - lo) / (fhi - flo);
            const double guard = 0.125 * (hi - lo);
            if (xs > lo + guard && xs < hi - guard) x = xs;
        }
        const double fx = f(x);
        if (fx == 0.0) {
            lo = hi = x;
            flo = fhi = 0.0;
            break;
        }
        if (std::signbit(fx) == std::signbit(flo)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    const double root = 0.5 * (lo + hi);
    return {root, std::abs(f(root))};
}

}  // namespace

std::vector<RootEstimate> find_roots_on_interval(const std::function<double(double)>& f,
                                                 double lo, double hi, int scan_points,
                                                 double tol) {
    if (!(lo < hi)) throw std::invalid_argument("find_roots_on_interval requires lo < hi");
    if (scan_points < 8) throw std::invalid_argument("scan_points must be >= 8");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

    std::vector<double> xs(scan_points), fs(scan_points);
    const double step = (hi - lo) / (scan_points - 1);
    for (int i = 0; i < scan_points; ++i) {
        xs[i] = (i == scan_points - 1) ? hi : lo + i * step;
        fs[i] = f(xs[i]);
    }

    std::vector<RootEstimate> roots;
    auto push = [&](RootEstimate r) {
        if (!roots.empty() && r.x - roots.back().x < tol) return;  // duplicate at a scan node
        roots.push_back(r);
    };
    for (int i = 0; i + 1 < scan_points; ++i) {
        if (fs[i] == 0.0) {
            push({xs[i], 0.0});
        } else if (std::signbit(fs[i]) != std::signbit(fs[i + 1]) && fs[i + 1] != 0.0) {
            push(refine(f, {xs[i], xs[i + 1], fs[i], fs[i + 1]}, tol));
        }
    }
    if (fs[scan_points - 1] == 0.0) push({hi, 0.0});
    return roots;
}

double bisect_predicate_boundary(const std::function<bool(double)>& p, double lo, double hi,
                                 double tol) {
    if (!(lo < hi)) throw std::invalid_argument("bisect_predicate_boundary requires lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const bool plo = p(lo);
    if (p(hi) == plo)
        throw InvalidBracket("predicate has the same value at both bracket ends");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // rounding limit
        (p(mid) == plo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ncatom
