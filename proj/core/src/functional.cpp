#include "dlab/functional.hpp"

#include "dlab/error.hpp"
#include "dlab/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dlab {

double default_first_bump(double level) {
    return std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(level));
}

double default_second_bump(double level) {
    return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(level));
}

namespace {

double checked(double v, const char* what, double t, double h) {
    if (!std::isfinite(v)) {
        throw EvaluationError(fmt::format("{} produced a non-finite value at t={}, h={}", what, t, h),
                              t, h);
    }
    return v;
}

std::vector<double> unit_bump(std::size_t dim, std::size_t component, double h) {
    std::vector<double> y(dim, 0.0);
    y[component] = h;
    return y;
}

}  // namespace

double vertical_derivative_at(const PathFunctional& f, std::size_t k, const DiscretePath& x,
                              std::optional<double> h, std::size_t component) {
    if (component >= x.dim()) {
        throw DomainError("derivative component out of range");
    }
    const double t = x.grid().time(k);
    if (f.vertical) {
        return checked(f.vertical(k, x, component), "vertical derivative", t, 0.0);
    }
    const DiscretePath stopped = stop_at(x, k);
    const double step = h.value_or(default_first_bump(x.at(component, k)));
    if (!(step > 0.0)) {
        throw DomainError("vertical bump h must be positive");
    }
    const double up = checked(
        f(k, vertical_bump_at(stopped, k, unit_bump(x.dim(), component, step))), f.name.c_str(), t,
        step);
    const double down = checked(
        f(k, vertical_bump_at(stopped, k, unit_bump(x.dim(), component, -step))), f.name.c_str(),
        t, step);
    return (up - down) / (2.0 * step);
}

double vertical_derivative(const PathFunctional& f, double t, const DiscretePath& x,
                           std::optional<double> h, std::size_t component) {
    return vertical_derivative_at(f, x.grid().snap(t), x, h, component);
}

std::vector<double> vertical_gradient_at(const PathFunctional& f, std::size_t k,
                                         const DiscretePath& x, std::optional<double> h) {
    std::vector<double> g(x.dim());
    for (std::size_t c = 0; c < x.dim(); ++c) {
        g[c] = vertical_derivative_at(f, k, x, h, c);
    }
    return g;
}

double horizontal_derivative_at(const PathFunctional& f, std::size_t k, const DiscretePath& x,
                                std::optional<double> h) {
    const TimeGrid& grid = x.grid();
    const DiscretePath stopped = stop_at(x, k);
    const double t = grid.time(k);
    if (f.horizontal) {
        return checked(f.horizontal(k, stopped), "horizontal derivative", t, 0.0);
    }
    const double span = h.value_or(grid.dt());
    if (span < grid.dt() * (1.0 - 1e-9)) {
        throw DomainError(fmt::format("horizontal step {} is below dt = {}", span, grid.dt()));
    }
    const std::size_t m = std::max<std::size_t>(1, grid.steps_in(span));
    if (k + m > grid.n_steps()) {
        throw DomainError(fmt::format("t + h = {} beyond the horizon", t + span));
    }
    const double later = checked(f(k + m, stopped), f.name.c_str(), t, span);
    const double now = checked(f(k, stopped), f.name.c_str(), t, span);
    return (later - now) / (grid.time(k + m) - t);
}

double horizontal_derivative(const PathFunctional& f, double t, const DiscretePath& x,
                             std::optional<double> h) {
    return horizontal_derivative_at(f, x.grid().snap(t), x, h);
}

double second_vertical_derivative_at(const PathFunctional& f, std::size_t k,
                                     const DiscretePath& x, std::optional<double> h,
                                     std::size_t component) {
    if (component >= x.dim()) {
        throw DomainError("derivative component out of range");
    }
    const double t = x.grid().time(k);
    if (f.vertical2) {
        return checked(f.vertical2(k, x, component), "second vertical derivative", t, 0.0);
    }
    const DiscretePath stopped = stop_at(x, k);
    const double step = h.value_or(default_second_bump(x.at(component, k)));
    if (!(step > 0.0)) {
        throw DomainError("vertical bump h must be positive");
    }
    const double up = checked(
        f(k, vertical_bump_at(stopped, k, unit_bump(x.dim(), component, step))), f.name.c_str(), t,
        step);
    const double mid = checked(f(k, stopped), f.name.c_str(), t, step);
    const double down = checked(
        f(k, vertical_bump_at(stopped, k, unit_bump(x.dim(), component, -step))), f.name.c_str(),
        t, step);
    return (up - 2.0 * mid + down) / (step * step);
}

double second_vertical_derivative(const PathFunctional& f, double t, const DiscretePath& x,
                                  std::optional<double> h, std::size_t component) {
    return second_vertical_derivative_at(f, x.grid().snap(t), x, h, component);
}

ModulusTable modulus_probe(const PathFunctional& f, const TimeGrid& grid, double bound_k,
                           std::size_t n_samples, std::uint64_t seed, std::size_t n_bins) {
    if (!(bound_k > 0.0)) {
        throw DomainError("modulus probe needs K > 0");
    }
    if (n_bins == 0) {
        throw DomainError("modulus probe needs at least one bin");
    }
    const CounterRng rng(seed);
    const std::size_t n = grid.n_steps();
    const double r_max = grid.horizon() + bound_k;
    ModulusTable table;
    table.bound_k = bound_k;
    table.bins.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        table.bins[b].r_lo = r_max * static_cast<double>(b) / static_cast<double>(n_bins);
        table.bins[b].r_hi = r_max * static_cast<double>(b + 1) / static_cast<double>(n_bins);
    }

    std::vector<double> walk(grid.n_knots());
    for (std::size_t i = 0; i < n_samples; ++i) {
        // Random walk rescaled into the ball ||x|| <= K.
        walk[0] = 0.0;
        double peak = 0.0;
        for (std::size_t j = 1; j < walk.size(); ++j) {
            walk[j] = walk[j - 1] + rng.normal(i, j, 0);
            peak = std::max(peak, std::abs(walk[j]));
        }
        const double level = (2.0 * rng.uniform(i, 0, 1) - 1.0) * bound_k;
        const double radius = rng.uniform(i, 0, 2) * bound_k;
        std::vector<double> v(walk.size());
        for (std::size_t j = 0; j < v.size(); ++j) {
            const double shape = peak > 0.0 ? walk[j] / peak : 0.0;
            v[j] = std::clamp(level + radius * shape, -bound_k, bound_k);
        }
        const DiscretePath x(grid, std::move(v));

        const auto k = std::min<std::size_t>(n, static_cast<std::size_t>(rng.uniform(i, 0, 3) *
                                                                         static_cast<double>(n + 1)));
        // Small increments are sampled more densely: h and y are log-uniform-ish.
        const double u_h = rng.uniform(i, 0, 4);
        const double u_y = rng.uniform(i, 0, 5);
        const std::size_t max_m = n - k;
        const auto m = std::min<std::size_t>(
            max_m, static_cast<std::size_t>(u_h * u_h * static_cast<double>(max_m + 1)));
        const double y = (rng.uniform(i, 0, 6) < 0.5 ? -1.0 : 1.0) * bound_k * u_y * u_y * u_y;

        const DiscretePath stopped = stop_at(x, k);
        const double base = f(k, x);
        const double shifted = f(k + m, stopped);
        const double bumped = f(k, vertical_bump_at(stopped, k, y));
        const double increment = std::abs(base - shifted) + std::abs(base - bumped);
        const double r = grid.time(k + m) - grid.time(k) + std::abs(y);

        auto b = static_cast<std::size_t>(r / r_max * static_cast<double>(n_bins));
        b = std::min(b, n_bins - 1);
        table.bins[b].max_increment = std::max(table.bins[b].max_increment, increment);
        ++table.bins[b].count;
    }

    double global = 0.0;
    for (const auto& bin : table.bins) {
        global = std::max(global, bin.max_increment);
    }
    const double noise = 1e-12 * std::max(1.0, global);
    // Bin maxima are sample maxima, so sparse bins at large r sit below the true modulus.
    // A smaller-r bin may exceed a larger-r one by a quarter of the global maximum.
    const double slack = 0.25 * global + noise;
    constexpr std::size_t min_count = 10;
    bool ok = true;
    double envelope = 0.0;
    const ModulusBin* first = nullptr;
    for (std::size_t b = n_bins; b-- > 0;) {
        const ModulusBin& bin = table.bins[b];
        if (bin.count < min_count) {
            continue;
        }
        if (envelope > 0.0 && bin.max_increment > envelope + slack) {
            ok = false;
        }
        envelope = std::max(envelope, bin.max_increment);
        first = &bin;
    }
    if (first != nullptr && global > noise && first->max_increment > 0.5 * global) {
        ok = false;
    }
    table.consistent = ok;
    return table;
}

namespace catalog {

PathFunctional markovian(std::string name, MarkovFn f, MarkovFn df, MarkovFn d2f) {
    PathFunctional F;
    F.name = std::move(name);
    F.traits.markovian = true;
    F.eval = [f](std::size_t k, const DiscretePath& x) {
        const auto p = x.point(k);
        return f(x.grid().time(k), p);
    };
    if (df) {
        F.vertical = [df](std::size_t k, const DiscretePath& x, std::size_t component) {
            if (component != 0) {
                throw DomainError("analytic Markovian derivative covers component 0 only");
            }
            const auto p = x.point(k);
            return df(x.grid().time(k), p);
        };
    }
    if (d2f) {
        F.vertical2 = [d2f](std::size_t k, const DiscretePath& x, std::size_t component) {
            if (component != 0) {
                throw DomainError("analytic Markovian derivative covers component 0 only");
            }
            const auto p = x.point(k);
            return d2f(x.grid().time(k), p);
        };
    }
    return F;
}

PathFunctional running_integral(const WeightMeasure& mu) {
    PathFunctional F;
    F.name = "running_integral";
    F.traits.frechet = true;
    F.eval = [mu](std::size_t k, const DiscretePath& x) { return mu.integral_through(x, k); };
    F.vertical = [mu](std::size_t k, const DiscretePath&, std::size_t) { return mu.atom_mass(k); };
    F.vertical2 = [](std::size_t, const DiscretePath&, std::size_t) { return 0.0; };
    return F;
}

PathFunctional integral_payoff(std::function<double(double)> g, std::function<double(double)> dg,
                               const WeightMeasure& mu) {
    PathFunctional F;
    F.name = "integral_payoff";
    F.traits.frechet = true;
    F.eval = [g, mu](std::size_t k, const DiscretePath& x) {
        return g(mu.integral_of_stopped(x, k));
    };
    if (dg) {
        F.vertical = [dg, mu](std::size_t k, const DiscretePath& x, std::size_t) {
            return dg(mu.integral_of_stopped(x, k)) * mu.mass_from(k);
        };
    }
    return F;
}

PathFunctional running_max() {
    PathFunctional F;
    F.name = "running_max";
    F.eval = [](std::size_t k, const DiscretePath& x) {
        double m = x[0];
        for (std::size_t j = 1; j <= k; ++j) {
            m = std::max(m, x[j]);
        }
        return m;
    };
    return F;
}

PathFunctional power(int p) {
    if (p < 1) {
        throw DomainError("power functional needs p >= 1");
    }
    const double e = static_cast<double>(p);
    return markovian(
        fmt::format("power_{}", p),
        [e](double, std::span<const double> x) { return std::pow(x[0], e); },
        [e](double, std::span<const double> x) { return e * std::pow(x[0], e - 1.0); },
        [e](double, std::span<const double> x) {
            return e == 1.0 ? 0.0 : e * (e - 1.0) * std::pow(x[0], e - 2.0);
        });
}

}  // namespace catalog

}  // namespace dlab
