#include "dlab/regularize.hpp"

#include "dlab/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dlab {

Epsilon epsilon_from_time(const TimeGrid& grid, double eps) {
    if (!std::isfinite(eps) || eps < grid.dt() * (1.0 - 1e-9) ||
        eps > grid.horizon() * (1.0 + 1e-9)) {
        throw DomainError(fmt::format("epsilon {} must lie in [dt, T] = [{}, {}]", eps, grid.dt(),
                                      grid.horizon()));
    }
    const double ratio = eps / grid.dt();
    const double whole = std::round(ratio);
    if (std::abs(ratio - whole) > 1e-6) {
        throw DomainError(fmt::format("epsilon {} is not a multiple of dt = {}", eps, grid.dt()));
    }
    return Epsilon{static_cast<std::size_t>(whole)};
}

std::vector<Epsilon> default_eps_ladder(const TimeGrid& grid, int k_min, int k_max) {
    std::vector<Epsilon> ladder;
    for (int k = k_min; k <= k_max; ++k) {
        const double eps = grid.horizon() / std::ldexp(1.0, k);
        const auto steps = static_cast<std::size_t>(std::round(eps / grid.dt()));
        if (steps == 0) {
            break;
        }
        if (ladder.empty() || steps < ladder.back().steps) {
            ladder.push_back(Epsilon{steps});
        }
    }
    return ladder;
}

namespace {

void check_eps(const TimeGrid& grid, Epsilon eps) {
    if (eps.steps == 0 || eps.steps > grid.n_steps()) {
        throw DomainError("epsilon must be between one step and the horizon");
    }
}

// Sum over s < k of f(s, min(s + m, k)) where f(s, e) is an increment product. Full windows
// (s + m <= k) are accumulated once in a running prefix; the truncated tail is summed directly.
template <class Term>
std::vector<double> windowed_curve(std::size_t n_knots, std::size_t m, double scale, Term term) {
    std::vector<double> curve(n_knots, 0.0);
    double full = 0.0;
    for (std::size_t k = 1; k < n_knots; ++k) {
        if (k >= m) {
            full += term(k - m, k);
        }
        double tail = 0.0;
        for (std::size_t s = (k >= m ? k - m + 1 : 0); s < k; ++s) {
            tail += term(s, k);
        }
        curve[k] = (full + tail) * scale;
    }
    return curve;
}

template <class Term>
double windowed_value(std::size_t k, std::size_t m, double scale, Term term) {
    double sum = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
        sum += term(s, std::min(s + m, k));
    }
    return sum * scale;
}

}  // namespace

double forward_integral_eps(const DiscretePath& h, const DiscretePath& x, Epsilon eps,
                            std::size_t k) {
    require_same_grid(h, x);
    check_eps(x.grid(), eps);
    const double scale = x.grid().dt() / eps.time(x.grid());
    return windowed_value(k, eps.steps, scale,
                          [&](std::size_t s, std::size_t e) { return h[s] * (x[e] - x[s]); });
}

std::vector<double> forward_integral_curve(const DiscretePath& h, const DiscretePath& x,
                                           Epsilon eps) {
    require_same_grid(h, x);
    check_eps(x.grid(), eps);
    const double scale = x.grid().dt() / eps.time(x.grid());
    return windowed_curve(x.size(), eps.steps, scale,
                          [&](std::size_t s, std::size_t e) { return h[s] * (x[e] - x[s]); });
}

double coquadratic_eps(const DiscretePath& x, const DiscretePath& y, Epsilon eps, std::size_t k) {
    require_same_grid(x, y);
    check_eps(x.grid(), eps);
    const double scale = x.grid().dt() / eps.time(x.grid());
    return windowed_value(k, eps.steps, scale, [&](std::size_t s, std::size_t e) {
        return (x[e] - x[s]) * (y[e] - y[s]);
    });
}

std::vector<double> coquadratic_curve(const DiscretePath& x, const DiscretePath& y, Epsilon eps) {
    require_same_grid(x, y);
    check_eps(x.grid(), eps);
    const double scale = x.grid().dt() / eps.time(x.grid());
    return windowed_curve(x.size(), eps.steps, scale, [&](std::size_t s, std::size_t e) {
        return (x[e] - x[s]) * (y[e] - y[s]);
    });
}

EpsSweep coquadratic_sweep(const DiscretePath& x, const DiscretePath& y,
                           std::span<const Epsilon> ladder) {
    EpsSweep sweep{x.grid(), {ladder.begin(), ladder.end()}, {}};
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (i > 0 && !(ladder[i] < ladder[i - 1])) {
            throw DomainError("epsilon ladder must be strictly decreasing");
        }
        sweep.curves.push_back(coquadratic_curve(x, y, ladder[i]));
    }
    return sweep;
}

EpsSweep quadratic_variation_curve(const DiscretePath& x, std::span<const Epsilon> ladder) {
    return coquadratic_sweep(x, x, ladder);
}

void write_sweep_csv(std::ostream& out, const EpsSweep& sweep) {
    out << "t,eps,value\n";
    for (std::size_t i = 0; i < sweep.epsilons.size(); ++i) {
        const std::string eps = format_double(sweep.epsilons[i].time(sweep.grid));
        for (std::size_t k = 0; k < sweep.curves[i].size(); ++k) {
            out << format_double(sweep.grid.time(k)) << ',' << eps << ','
                << format_double(sweep.curves[i][k]) << '\n';
        }
    }
}

const char* to_string(UcpVerdict v) {
    return v == UcpVerdict::Convergent ? "CONVERGENT" : "INCONCLUSIVE";
}

UcpReport ucp_diagnostic(const EpsSweep& sweep, const UcpOptions& options) {
    return ucp_diagnostic(std::span<const EpsSweep>(&sweep, 1), options);
}

UcpReport ucp_diagnostic(std::span<const EpsSweep> samples, const UcpOptions& options) {
    if (samples.empty()) {
        throw DomainError("u.c.p. diagnostic needs at least one sweep");
    }
    const EpsSweep& first = samples.front();
    const std::size_t levels = first.epsilons.size();
    if (levels < 3) {
        throw DomainError("u.c.p. diagnostic needs at least three epsilon values");
    }
    for (const EpsSweep& s : samples) {
        if (s.epsilons != first.epsilons || s.curves.size() != levels) {
            throw DomainError("all sweeps must share the same epsilon ladder");
        }
    }
    if (options.reference && options.reference->size() != first.grid.n_knots()) {
        throw GridMismatch("reference curve length does not match the grid");
    }

    UcpReport report;
    for (const Epsilon& e : first.epsilons) {
        report.epsilons.push_back(e.time(first.grid));
    }
    const double n_samples = static_cast<double>(samples.size());
    report.sup_differences.assign(levels - 1, 0.0);
    for (const EpsSweep& s : samples) {
        for (std::size_t i = 0; i + 1 < levels; ++i) {
            double sup = 0.0;
            for (std::size_t k = 0; k < s.curves[i].size(); ++k) {
                sup = std::max(sup, std::abs(s.curves[i][k] - s.curves[i + 1][k]));
            }
            report.sup_differences[i] += sup / n_samples;
        }
        if (options.reference) {
            double sup = 0.0;
            const auto& last = s.curves.back();
            for (std::size_t k = 0; k < last.size(); ++k) {
                sup = std::max(sup, std::abs(last[k] - (*options.reference)[k]));
            }
            report.limit_error += sup / n_samples;
        }
    }

    report.monotone = true;
    for (std::size_t i = 1; i < report.sup_differences.size(); ++i) {
        if (report.sup_differences[i] >
            report.sup_differences[i - 1] * (1.0 + options.monotone_slack)) {
            report.monotone = false;
        }
    }

    const bool any_zero = std::any_of(report.sup_differences.begin(), report.sup_differences.end(),
                                      [](double d) { return !(d > 0.0); });
    if (!any_zero) {
        // Least-squares slope of log d_i against log eps_i.
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double m = static_cast<double>(report.sup_differences.size());
        for (std::size_t i = 0; i < report.sup_differences.size(); ++i) {
            const double lx = std::log(report.epsilons[i]);
            const double ly = std::log(report.sup_differences[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double denom = m * sxx - sx * sx;
        if (denom > 0.0) {
            report.rate = (m * sxy - sx * sy) / denom;
        }
    }

    const bool small = report.sup_differences.back() < options.tolerance &&
                       (!options.reference || report.limit_error <= options.tolerance);
    report.verdict = report.monotone && small ? UcpVerdict::Convergent : UcpVerdict::Inconclusive;
    return report;
}

}  // namespace dlab
