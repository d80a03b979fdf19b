#include "dlab/uvm.hpp"

#include "dlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace dlab {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

// Linear interpolation on a uniform axis, extended linearly past the ends.
double interp(const std::vector<double>& axis, const double* values, double q) {
    const std::size_t last = axis.size() - 1;
    const double step = axis[1] - axis[0];
    const double pos = (q - axis.front()) / step;
    std::size_t j = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), last - 1);
    const double w = pos - static_cast<double>(j);
    const double v0 = values[j];
    const double v1 = values[j + 1];
    return v0 + w * (v1 - v0);
}

}  // namespace

double TensorField::value(double xq, double aq) const {
    const std::size_t na = a.size();
    // Interpolate in a on the two bracketing x rows, then in x.
    const double step = x[1] - x[0];
    const double pos = (xq - x.front()) / step;
    const std::size_t last = x.size() - 1;
    std::size_t i = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), last - 1);
    const double w = pos - static_cast<double>(i);
    const double lo = interp(a, &v0[i * na], aq);
    const double hi = interp(a, &v0[(i + 1) * na], aq);
    return lo + w * (hi - lo);
}

TensorField bsb_solve_tensor(const UvmProblem& problem) {
    problem.validate();
    const TimeGrid& grid = problem.grid();
    const WeightMeasure& mu = problem.mu;
    const std::size_t n = grid.n_steps();
    const double dt = grid.dt();

    double x_lo, x_hi;
    if (problem.x_axis.lo) {
        x_lo = *problem.x_axis.lo;
        x_hi = *problem.x_axis.hi;
    } else {
        const double half = std::max(5.0 * problem.sigma_hi * std::sqrt(grid.horizon()) *
                                         problem.x_axis.scale,
                                     1e-6 * std::max(1.0, std::abs(problem.x0)));
        x_lo = problem.x0 - half;
        x_hi = problem.x0 + half;
    }
    // The a-axis is centred: b = a - x0 mu([0, t)), so its range does not grow with |x0|.
    const double accrue = mu.mass_before(n);
    double a_lo, a_hi;
    if (problem.a_axis.lo) {
        a_lo = *problem.a_axis.lo;
        a_hi = *problem.a_axis.hi;
    } else {
        const double reach = std::max(problem.x0 - x_lo, x_hi - problem.x0) * accrue;
        const double pad = std::max(1e-6, 0.05 * reach) * problem.a_axis.scale;
        a_lo = -reach - pad;
        a_hi = reach + pad;
    }
    TensorField field;
    field.x = linspace(x_lo, x_hi, problem.x_axis.nodes);
    field.a = linspace(a_lo, a_hi, problem.a_axis.nodes);
    const std::size_t nx = field.x.size();
    const std::size_t na = field.a.size();
    const double dx = field.x[1] - field.x[0];
    const double da = field.a[1] - field.a[0];
    auto at = [na](std::size_t i, std::size_t j) { return i * na + j; };

    std::vector<double> v(nx * na);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            v[at(i, j)] = problem.payoff(field.a[j] + problem.x0 * accrue + field.x[i] * mu.atom_mass(n));
        }
    }

    const double hi2 = problem.sigma_hi * problem.sigma_hi;
    const double lo2 = problem.sigma_lo * problem.sigma_lo;
    std::vector<double> next(v.size());
    for (std::size_t k = n; k-- > 0;) {
        // Diffusion in x over [t_k, t_{k+1}], Barenblatt sup pointwise.
        if (problem.sigma_hi > 0.0) {
            const std::size_t s = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(2.0 * hi2 * dt / (dx * dx) - 1e-12)));
            const double unit = 0.5 * dt / (static_cast<double>(s) * dx * dx);
            for (std::size_t r = 0; r < s; ++r) {
                next = v;
                for (std::size_t i = 1; i + 1 < nx; ++i) {
                    for (std::size_t j = 0; j < na; ++j) {
                        const double gamma = v[at(i + 1, j)] - 2.0 * v[at(i, j)] + v[at(i - 1, j)];
                        next[at(i, j)] = v[at(i, j)] + (gamma >= 0.0 ? hi2 : lo2) * unit * gamma;
                    }
                }
                v.swap(next);
            }
        }
        // Density part: db/dt = w (x - x0), upwind in b.
        const double w = mu.density()[k];
        if (w > 0.0) {
            const double speed = w * std::max(problem.x0 - x_lo, x_hi - problem.x0);
            const std::size_t s = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(speed * dt / da - 1e-12)));
            const double tau = dt / static_cast<double>(s);
            for (std::size_t r = 0; r < s; ++r) {
                next = v;
                for (std::size_t i = 0; i < nx; ++i) {
                    const double c = w * (field.x[i] - problem.x0);
                    for (std::size_t j = 0; j < na; ++j) {
                        double grad;
                        if (c >= 0.0) {
                            grad = j + 1 < na ? (v[at(i, j + 1)] - v[at(i, j)]) / da
                                              : (v[at(i, j)] - v[at(i, j - 1)]) / da;
                        } else {
                            grad = j > 0 ? (v[at(i, j)] - v[at(i, j - 1)]) / da
                                         : (v[at(i, j + 1)] - v[at(i, j)]) / da;
                        }
                        next[at(i, j)] = v[at(i, j)] + tau * c * grad;
                    }
                }
                v.swap(next);
            }
        }
        // Atom: v(t_k-, x, b) = v(t_k, x, b + (x - x0) mu({t_k})).
        const double atom = mu.atom_mass(k);
        if (atom > 0.0) {
            for (std::size_t i = 0; i < nx; ++i) {
                for (std::size_t j = 0; j < na; ++j) {
                    next[at(i, j)] = interp(field.a, &v[at(i, 0)], field.a[j] + (field.x[i] - problem.x0) * atom);
                }
            }
            v.swap(next);
        }
    }
    field.v0 = std::move(v);
    return field;
}

}  // namespace dlab
