#include "ncatom/coulomb.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ncatom {
namespace {

double factorial(int k) {
    double v = 1.0;
    for (int i = 2; i <= k; ++i) v *= i;
    return v;
}

// Ascending series coefficients of the terminating F(a, b, x).
std::vector<double> hypergeometric_coefficients(int a, int b) {
    if (a > 0) throw InvalidDegree("confluent hypergeometric series requires a <= 0");
    if (b < 1) throw std::invalid_argument("confluent hypergeometric series requires b >= 1");
    const int degree = -a;
    std::vector<double> coeff(degree + 1);
    coeff[0] = 1.0;
    for (int k = 0; k < degree; ++k)
        coeff[k + 1] = coeff[k] * (a + k) / (static_cast<double>(b + k) * (k + 1));
    return coeff;
}

double horner(const std::vector<double>& coeff, double x) {
    double v = 0.0;
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) v = v * x + *it;
    return v;
}

}  // namespace

double confluent_hypergeometric_poly(int a, int b, double x) {
    return horner(hypergeometric_coefficients(a, b), x);
}

double snl_factor(QuantumNumbers qn) {
    validate(qn);
    // (n+l)!/(n-l-1)! as a product keeps everything in exact small integers.
    double ratio = 1.0;
    for (int k = qn.n - qn.l; k <= qn.n + qn.l; ++k) ratio *= k;
    const double f = factorial(2 * qn.l + 1);
    return ratio / (f * f * 2.0 * qn.n);
}

RadialState make_radial_state(QuantumNumbers qn, double eta, Coupling c) {
    validate(qn);
    validate(c);
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("eta must lie in (0, 1]");
    const double s = qn.n * eta * eta / c.alphaZ;
    const double norm = 1.0 / factorial(2 * qn.l + 1) *
                        std::sqrt(factorial(qn.n + qn.l) /
                                  (2.0 * qn.n * factorial(qn.n - qn.l - 1))) *
                        std::pow(2.0 / s, qn.l + 1.5);
    return {qn, eta, norm, s};
}

double radial_chi(const RadialState& state, double r) {
    if (r < 0.0) throw std::invalid_argument("radius must be nonnegative");
    if (r == 0.0) return 0.0;
    const int n = state.qn.n, l = state.qn.l;
    const double x = 2.0 * r / state.length_scale;
    return state.normalization * std::pow(r, l + 1) *
           confluent_hypergeometric_poly(-n + l + 1, 2 * l + 2, x) *
           std::exp(-r / state.length_scale);
}

double rhs_eta(double eta, QuantumNumbers qn, Coupling c, const QuadratureSpec& spec) {
    validate(qn);
    validate(c);
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("eta must lie in (0, 1]");
    const int n = qn.n, l = qn.l;
    const auto coeff = hypergeometric_coefficients(-n + l + 1, 2 * l + 2);
    const double aZ = c.alphaZ;
    const double force_scale = 4.0 * aZ * aZ * aZ / (n * n * eta * eta * eta * eta);
    const double s = snl_factor(qn);
    auto integrand = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double F = horner(coeff, x);
        return std::pow(x, 2 * l + 2) * std::exp(-x) * F * F /
               (1.0 + force_scale / (x * x));
    };
    return s * integrate_semi_infinite(integrand, spec);
}

EtaExcess max_eta_excess(QuantumNumbers qn, Coupling c, double eta_min,
                         const QuadratureSpec& spec) {
    auto excess = [&](double eta) { return rhs_eta(eta, qn, c, spec) - eta; };
    constexpr int kScan = 256;
    double best_eta = eta_min, best = excess(eta_min);
    int best_i = 0;
    const double step = (1.0 - eta_min) / (kScan - 1);
    for (int i = 1; i < kScan; ++i) {
        const double eta = (i == kScan - 1) ? 1.0 : eta_min + i * step;
        const double v = excess(eta);
        if (v > best) {
            best = v;
            best_eta = eta;
            best_i = i;
        }
    }
    // Golden-section polish inside the bracketing cell pair. Near the maximum
    // the excess is quadratic, so an eta width of 1e-8 pins the value far
    // beyond the bisection needs of the critical-coupling search.
    double a = eta_min + std::max(best_i - 1, 0) * step;
    double b = std::min(eta_min + (best_i + 1) * step, 1.0);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = excess(x1), f2 = excess(x2);
    while (b - a > 1e-8) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = excess(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = excess(x1);
        }
    }
    const double eta = 0.5 * (a + b);
    const double v = excess(eta);
    return (v >= best) ? EtaExcess{eta, v} : EtaExcess{best_eta, best};
}

EtaSolution solve_eta(QuantumNumbers qn, Coupling c, const EtaSolveOptions& options) {
    validate(qn);
    validate(c);
    auto defect = [&](double eta) { return rhs_eta(eta, qn, c, options.quadrature) - eta; };
    // Free limit: when the upper root sits within the root tolerance of 1 it
    // is indistinguishable from the endpoint in floating point, so the scan
    // cannot bracket it; report the endpoint fixed point directly.
    const double g_at_one = rhs_eta(1.0, qn, c, options.quadrature);
    if (1.0 - g_at_one <= options.root_tolerance) {
        const double eta = std::min(g_at_one, 1.0);
        return {eta, 1.0 - eta, std::abs(defect(eta)), 1, EtaBranch::UpperRoot};
    }
    const auto roots = find_roots_on_interval(defect, options.eta_min, 1.0,
                                              options.scan_points, options.root_tolerance);
    if (roots.empty())
        throw NoBoundState("self-consistency equation has no root for n=" +
                           std::to_string(qn.n) + " l=" + std::to_string(qn.l) +
                           " alphaZ=" + std::to_string(c.alphaZ));
    const RootEstimate top = roots.back();
    EtaBranch branch = EtaBranch::UpperRoot;
    if (roots.size() >= 2 &&
        top.x - roots[roots.size() - 2].x < options.tangency_tolerance)
        branch = EtaBranch::Tangent;
    return {top.x, 1.0 - top.x, top.residual, static_cast<int>(roots.size()), branch};
}

Coupling critical_coupling(QuantumNumbers qn, double tol, const QuadratureSpec& spec) {
    validate(qn);
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    auto exists = [&](double aZ) {
        return max_eta_excess(qn, Coupling{aZ}, 0.01, spec).excess >= 0.0;
    };
    const double lo = 1e-3;
    double hi = 1.0;
    while (exists(hi)) {
        hi *= 2.0;
        if (hi > 64.0)
            throw NonConvergence("no supercritical coupling found below alphaZ = 64");
    }
    return Coupling{bisect_predicate_boundary(exists, lo, hi, tol)};
}

double epsilon_from_density(const Eigen::ArrayXd& r, const Eigen::ArrayXd& chi_squared,
                            const std::function<double(double)>& force_magnitude) {
    const Eigen::Index n = r.size();
    if (n < 3 || chi_squared.size() != n)
        throw std::invalid_argument("density and radius arrays must match with >= 3 points");
    if ((chi_squared < 0.0).any())
        throw std::invalid_argument("density must be nonnegative");
    const double h = r[1] - r[0];
    if (!(h > 0.0) || std::abs((r[n - 1] - r[0]) - h * static_cast<double>(n - 1)) >
                          1e-6 * h)
        throw std::invalid_argument("uniform radial grid required");

    // Composite Simpson; a trailing trapezoid panel covers an even point count.
    auto simpson = [&](const Eigen::ArrayXd& y) {
        const Eigen::Index last = (n % 2 == 1) ? n - 1 : n - 2;
        double acc = y[0] + y[last];
        for (Eigen::Index i = 1; i < last; i += 2) acc += 4.0 * y[i];
        for (Eigen::Index i = 2; i < last; i += 2) acc += 2.0 * y[i];
        acc *= h / 3.0;
        if (n % 2 == 0) acc += 0.5 * h * (y[n - 2] + y[n - 1]);
        return acc;
    };

    const double norm = simpson(chi_squared);
    if (std::abs(norm - 1.0) > 1e-8)
        throw NotNormalized("density integrates to " + std::to_string(norm));

    Eigen::ArrayXd weighted(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double force = force_magnitude(r[i]);
        if (std::isnan(force) || force < 0.0)
            throw std::invalid_argument("force magnitude must be nonnegative");
        weighted[i] = chi_squared[i] * (std::isinf(force) ? 1.0 : force / (force + 1.0));
    }
    return simpson(weighted);
}

}  // namespace ncatom
