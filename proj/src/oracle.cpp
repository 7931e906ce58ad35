#include "ncatom/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncatom {
namespace {

constexpr double kRescale = 1e250;  // overflow guard for shooting sweeps

// Workspace for repeated Numerov sweeps at different trial energies.
class Shooter {
  public:
    Shooter(QuantumNumbers qn, const PotentialSpec& pot, double eta, const RadialGrid& grid)
        : qn_(qn), grid_(grid), n_(grid.point_count), h_(grid.spacing()), eta2_(eta * eta) {
        r_.resize(n_);
        v_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            r_[i] = grid.radius(i);
            v_[i] = pot.potential(r_[i]);
        }
        // Q(r) = l(l+1)/r^2 + 2(V - E)/eta^2, split into an E-free base.
        const double ll = static_cast<double>(qn.l) * (qn.l + 1);
        qbase_ = ll / r_.square() + 2.0 * v_ / eta2_;
        f_.resize(n_);
        out_.resize(n_);
        in_.resize(n_);
        // Near-origin series chi = r^{l+1}(1 + c1 r + c2 r^2) with the
        // potential fitted as u + w/r through the first two grid points, so
        // both Coulomb-like and regular potentials seed correctly.
        const double w = (v_[1] - v_[2]) / (1.0 / r_[1] - 1.0 / r_[2]);
        const double u = v_[1] - w / r_[1];
        series_k_ = -2.0 * w / eta2_;
        series_u_ = u;
    }

    int size() const { return n_; }
    double spacing() const { return h_; }
    double radius(int i) const { return r_[i]; }

    void set_energy(double e) {
        energy_ = e;
        f_ = 1.0 - (h_ * h_ / 12.0) * (qbase_ - 2.0 * e / eta2_);
    }

    double seed(double r) const {
        const double c1 = -series_k_ / (2.0 * qn_.l + 2.0);
        const double q = 2.0 * (series_u_ - energy_) / eta2_;
        const double c2 = (-series_k_ * c1 + q) / (2.0 * (2.0 * qn_.l + 3.0));
        return std::pow(r, qn_.l + 1) * (1.0 + c1 * r + c2 * r * r);
    }

    // Interior sign changes of the regular solution integrated to the box
    // edge; by the oscillation theorem this counts eigenvalues below E.
    int nodes() {
        double prev = seed(r_[1]);
        double cur = seed(r_[2]);
        int count = (prev * cur < 0.0) ? 1 : 0;
        double fprev = f_[1], fcur = f_[2];
        for (int i = 3; i < n_; ++i) {
            const double next = ((12.0 - 10.0 * fcur) * cur - fprev * prev) / f_[i];
            if (cur * next < 0.0) ++count;
            prev = cur;
            cur = next;
            fprev = fcur;
            fcur = f_[i];
            if (std::abs(cur) > kRescale) {
                prev /= kRescale;
                cur /= kRescale;
            }
        }
        return count;
    }

    // Matching index: outermost classical turning point (last Q < 0, i.e.
    // f > 1), clamped away from both ends so the 5-point stencils fit.
    int matching_index() const {
        int m = -1;
        for (int i = n_ - 1; i >= 0; --i) {
            if (f_[i] > 1.0) {
                m = i;
                break;
            }
        }
        if (m < 0) return -1;
        return std::clamp(m, 8, n_ - 8);
    }

    struct Defect {
        bool valid{false};
        double value{0.0};
        int m{-1};
    };

    Defect defect() {
        const int m = matching_index();
        if (m < 0) return {};
        integrate_outward(m + 2);
        integrate_inward(m - 2);
        if (out_[m] == 0.0 || in_[m] == 0.0) return {};
        auto logderiv = [&](const Eigen::ArrayXd& a, int i) {
            return (a[i - 2] - 8.0 * a[i - 1] + 8.0 * a[i + 1] - a[i + 2]) /
                   (12.0 * h_ * a[i]);
        };
        return {true, logderiv(out_, m) - logderiv(in_, m), m};
    }

    // Stitched, normalized eigenfunction at the current energy.
    void assemble(Eigen::ArrayXd& chi, int m) {
        integrate_outward(m + 2);
        integrate_inward(m - 2);
        chi.resize(n_);
        const double scale = out_[m] / in_[m];
        for (int i = 0; i < m; ++i) chi[i] = out_[i];
        for (int i = m; i < n_; ++i) chi[i] = in_[i] * scale;
        chi /= std::sqrt(chi.square().sum() * h_);
    }

  private:
    void integrate_outward(int last) {
        out_[0] = seed(r_[0]);
        out_[1] = seed(r_[1]);
        out_[2] = seed(r_[2]);
        for (int i = 3; i <= last; ++i)
            out_[i] = ((12.0 - 10.0 * f_[i - 1]) * out_[i - 1] - f_[i - 2] * out_[i - 2]) /
                      f_[i];
    }

    void integrate_inward(int first) {
        in_[n_ - 1] = 0.0;
        in_[n_ - 2] = 1e-250;
        for (int i = n_ - 3; i >= first; --i) {
            in_[i] = ((12.0 - 10.0 * f_[i + 1]) * in_[i + 1] - f_[i + 2] * in_[i + 2]) /
                     f_[i];
            if (std::abs(in_[i]) > kRescale)
                for (int j = n_ - 1; j >= i; --j) in_[j] /= kRescale;
        }
    }

    QuantumNumbers qn_;
    RadialGrid grid_;
    int n_;
    double h_;
    double eta2_;
    double energy_{0.0};
    double series_k_{0.0};
    double series_u_{0.0};
    Eigen::ArrayXd r_, v_, qbase_, f_, out_, in_;
};

int count_interior_nodes(const Eigen::ArrayXd& chi) {
    int count = 0;
    for (Eigen::Index i = 1; i + 1 < chi.size(); ++i)
        if (chi[i] * chi[i + 1] < 0.0) ++count;
    return count;
}

}  // namespace

PotentialSpec coulomb_potential(Coupling c) {
    validate(c);
    const double aZ = c.alphaZ;
    return {[aZ](double r) { return -aZ / r; }, [aZ](double r) { return aZ / (r * r); }};
}

RadialGrid default_grid(QuantumNumbers qn, Coupling c, double eta) {
    validate(qn);
    validate(c);
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("eta must lie in (0, 1]");
    const double scale = qn.n * eta * eta / c.alphaZ;
    const double r_min = 1e-6;
    const double r_max = 50.0 * qn.n * qn.n * eta * eta / c.alphaZ;
    const double spacing = scale / 400.0;
    const int points = std::max(1000, static_cast<int>(std::ceil((r_max - r_min) / spacing)) + 1);
    return {r_min, r_max, points};
}

NumericEigenstate shoot_eigenvalue(QuantumNumbers qn, const PotentialSpec& pot, double eta,
                                   const RadialGrid& grid) {
    validate(qn);
    validate(grid);
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("eta must lie in (0, 1]");
    if (!pot.potential) throw std::invalid_argument("potential callback required");

    Shooter shooter(qn, pot, eta, grid);
    const int target = qn.n - qn.l - 1;

    auto nodes_at = [&](double e) {
        shooter.set_energy(e);
        return shooter.nodes();
    };

    // Bound-state window: node count jumps past `target` exactly at the level.
    double e_hi = -1e-14;
    if (nodes_at(e_hi) <= target)
        throw EigenvalueNotBracketed("grid holds fewer than n-l bound levels");
    double e_lo = -1.0;
    for (int guard = 0; nodes_at(e_lo) > target; ++guard) {
        if (guard > 60)
            throw EigenvalueNotBracketed("no energy found below the requested level");
        e_lo *= 4.0;
    }

    // Node-count bisection until the window isolates a single level.
    for (int it = 0; it < 200; ++it) {
        const bool narrow = (e_hi - e_lo) < 1e-2 * std::abs(e_hi);
        if (narrow && nodes_at(e_hi) == target + 1 && nodes_at(e_lo) == target) break;
        const double mid = 0.5 * (e_lo + e_hi);
        if (mid <= e_lo || mid >= e_hi) break;
        (nodes_at(mid) > target ? e_hi : e_lo) = mid;
    }

    // Refine on the log-derivative matching defect where its sign flips
    // across the window; node bisection then closes whatever width is left
    // (a no-op when the defect phase already converged).
    const double width_goal = 1e-15;
    shooter.set_energy(e_lo);
    Shooter::Defect d_lo = shooter.defect();
    shooter.set_energy(e_hi);
    Shooter::Defect d_hi = shooter.defect();
    if (d_lo.valid && d_hi.valid && std::signbit(d_lo.value) != std::signbit(d_hi.value)) {
        for (int it = 0; it < 200 && (e_hi - e_lo) > width_goal * std::abs(e_lo); ++it) {
            const double mid = 0.5 * (e_lo + e_hi);
            if (mid <= e_lo || mid >= e_hi) break;
            shooter.set_energy(mid);
            const Shooter::Defect dm = shooter.defect();
            if (!dm.valid) break;
            if (std::signbit(dm.value) == std::signbit(d_lo.value)) {
                e_lo = mid;
                d_lo = dm;
            } else {
                e_hi = mid;
            }
        }
    }
    for (int it = 0; it < 200 && (e_hi - e_lo) > width_goal * std::abs(e_lo); ++it) {
        const double mid = 0.5 * (e_lo + e_hi);
        if (mid <= e_lo || mid >= e_hi) break;
        (nodes_at(mid) > target ? e_hi : e_lo) = mid;
    }

    const double energy = 0.5 * (e_lo + e_hi);
    shooter.set_energy(energy);
    const int m = shooter.matching_index();
    if (m < 0) throw EigenvalueNotBracketed("no classically allowed region at the level");

    NumericEigenstate state;
    state.grid = grid;
    state.qn = qn;
    state.eigenvalue = energy;
    shooter.assemble(state.chi, m);
    state.node_count = count_interior_nodes(state.chi);
    if (state.node_count != target)
        throw EigenvalueNotBracketed("isolated level has " + std::to_string(state.node_count) +
                                     " nodes, expected " + std::to_string(target));

    // Resolution check: the state must spread over many grid steps.
    const double h = grid.spacing();
    double mean_r = 0.0;
    for (int i = 0; i < grid.point_count; ++i)
        mean_r += state.chi[i] * state.chi[i] * shooter.radius(i);
    mean_r *= h;
    if (mean_r < 12.0 * h)
        throw GridTooSmall("grid spacing too coarse for the state (mean radius " +
                           std::to_string(mean_r) + ")");
    // Box check: the wavefunction must have decayed before the outer edge.
    const int tail_start = grid.point_count - 1 - std::max(3, grid.point_count / 50);
    const double peak = state.chi.abs().maxCoeff();
    const double tail = state.chi.tail(grid.point_count - tail_start).abs().maxCoeff();
    if (tail > 1e-3 * peak)
        throw GridTooSmall("radial box too small: tail amplitude " + std::to_string(tail / peak));
    return state;
}

SelfConsistentResult self_consistent_solve(QuantumNumbers qn, const PotentialSpec& pot,
                                           const RadialGrid& grid,
                                           const SelfConsistentOptions& options) {
    validate(qn);
    validate(grid);
    if (!pot.force_magnitude) throw std::invalid_argument("force magnitude callback required");
    if (options.max_iterations < 1 || !(options.tolerance > 0.0) ||
        !(options.damping > 0.0 && options.damping <= 1.0))
        throw std::invalid_argument("invalid self-consistent options");

    const int n_pts = grid.point_count;
    const double h = grid.spacing();
    Eigen::ArrayXd force_weight(n_pts);
    for (int i = 0; i < n_pts; ++i) {
        const double force = pot.force_magnitude(grid.radius(i));
        if (std::isnan(force) || force < 0.0)
            throw std::invalid_argument("force magnitude must be nonnegative");
        force_weight[i] = std::isinf(force) ? 1.0 : force / (force + 1.0);
    }

    SelfConsistentResult result;
    double eps = 0.0;
    int flips = 0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const double eta = 1.0 - eps;
        try {
            result.eigenstate = shoot_eigenvalue(qn, pot, eta, grid);
        } catch (const EigenvalueNotBracketed& e) {
            throw NoBoundState("eigensolver failed at iteration " + std::to_string(it) +
                               " (eta=" + std::to_string(eta) + "): " + e.what());
        } catch (const GridTooSmall& e) {
            throw NoBoundState("eigensolver failed at iteration " + std::to_string(it) +
                               " (eta=" + std::to_string(eta) + "): " + e.what());
        }
        const double eps_new =
            (result.eigenstate.chi.square() * force_weight).sum() * h;
        const double step = eps + options.damping * (eps_new - eps);
        if (!(step >= 0.0 && step < 1.0))
            throw IterationDiverged("epsilon left [0, 1) at iteration " + std::to_string(it));
        result.epsilon_history.push_back(step);
        const std::size_t k = result.epsilon_history.size();
        if (k >= 3) {
            const double d1 = result.epsilon_history[k - 1] - result.epsilon_history[k - 2];
            const double d0 = result.epsilon_history[k - 2] - result.epsilon_history[k - 3];
            if (d1 * d0 < 0.0 && std::abs(d1) > 10.0 * options.tolerance && ++flips > 3)
                throw IterationDiverged("epsilon iterates oscillate");
        }
        result.iterations = it;
        if (std::abs(step - eps) < options.tolerance) {
            result.epsilon = step;
            return result;
        }
        eps = step;
    }
    throw IterationDiverged("no self-consistency within " +
                            std::to_string(options.max_iterations) + " iterations");
}

}  // namespace ncatom
