#include "dlab/ito_verify.hpp"

#include "dlab/error.hpp"
#include "dlab/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dlab {

DecompositionResult decompose(const PathFunctional& f, const DiscretePath& x, const DiscretePath& m,
                              std::optional<double> h) {
    require_same_grid(x, m);
    const std::size_t knots = x.size();
    DecompositionResult r;
    r.f_path.resize(knots);
    r.gradient.resize(knots);
    r.integral_path.assign(knots, 0.0);
    r.gamma.assign(knots, 0.0);
    for (std::size_t k = 0; k < knots; ++k) {
        r.f_path[k] = f(k, x);
        if (!std::isfinite(r.f_path[k])) {
            throw EvaluationError(fmt::format("{} is not finite at knot {}", f.name, k),
                                  x.grid().time(k), 0.0);
        }
        try {
            r.gradient[k] = vertical_derivative_at(f, k, x, h);
        } catch (const EvaluationError& e) {
            throw EvaluationError(fmt::format("knot {}: {}", k, e.what()), e.time(), e.bump());
        }
    }
    for (std::size_t k = 1; k < knots; ++k) {
        r.integral_path[k] = r.integral_path[k - 1] + r.gradient[k - 1] * (m[k] - m[k - 1]);
    }
    for (std::size_t k = 1; k < knots; ++k) {
        r.gamma[k] = (r.f_path[k] - r.f_path[0]) - r.integral_path[k];
    }
    return r;
}

std::vector<TestMartingale> default_martingale_family(const SamplePath& sample,
                                                      const SeedPlan& plan) {
    const TimeGrid& grid = sample.x.grid();
    const DiscretePath& w = sample.w;
    std::vector<double> sq(grid.n_knots()), ito(grid.n_knots(), 0.0), centred(grid.n_knots());
    for (std::size_t k = 0; k < grid.n_knots(); ++k) {
        sq[k] = w[k] * w[k] - grid.time(k);
        centred[k] = sample.x[k] - sample.x[0];
        if (k > 0) {
            ito[k] = ito[k - 1] + sample.x[k - 1] * (w[k] - w[k - 1]);
        }
    }
    std::vector<TestMartingale> family;
    family.push_back({"W", w});
    family.push_back({"W_indep", brownian_path(grid, plan, sample.index, streams::independent)});
    family.push_back({"W2_minus_t", DiscretePath(grid, std::move(sq))});
    family.push_back({"int_X_dW", DiscretePath(grid, std::move(ito))});
    family.push_back({"X", DiscretePath(grid, std::move(centred))});
    return family;
}

OrthogonalityReport orthogonality_test(std::span<const OrthogonalitySample> samples,
                                       std::span<const Epsilon> ladder,
                                       const UcpOptions& options) {
    if (samples.empty() || samples.front().family.empty()) {
        throw ConfigError("orthogonality test needs at least one sample and one martingale");
    }
    const std::size_t n_family = samples.front().family.size();
    for (const auto& s : samples) {
        if (s.family.size() != n_family) {
            throw ConfigError("every sample must carry the same martingale family");
        }
    }
    UcpOptions opts = options;
    opts.reference = std::vector<double>(samples.front().gamma.size(), 0.0);

    OrthogonalityReport report;
    report.pass = true;
    for (std::size_t i = 0; i < n_family; ++i) {
        std::vector<EpsSweep> sweeps;
        sweeps.reserve(samples.size());
        double terminal = 0.0;
        for (const auto& s : samples) {
            if (s.family[i].name != samples.front().family[i].name) {
                throw ConfigError("martingale families differ in order across samples");
            }
            sweeps.push_back(coquadratic_sweep(s.gamma, s.family[i].path, ladder));
            terminal += sweeps.back().curves.back().back();
        }
        OrthogonalityVerdict v;
        v.name = samples.front().family[i].name;
        v.report = ucp_diagnostic(sweeps, opts);
        v.terminal = terminal / static_cast<double>(samples.size());
        v.pass = v.report.verdict == UcpVerdict::Convergent;
        report.pass = report.pass && v.pass;
        report.verdicts.push_back(std::move(v));
    }
    return report;
}

OrthogonalityReport orthogonality_test(const DiscretePath& gamma,
                                       std::span<const TestMartingale> family,
                                       std::span<const Epsilon> ladder,
                                       const UcpOptions& options) {
    const OrthogonalitySample sample{gamma, {family.begin(), family.end()}};
    return orthogonality_test(std::span<const OrthogonalitySample>(&sample, 1), ladder, options);
}

DiscretePath frozen_reconstruction(const DiscretePath& x, std::size_t s, Epsilon eps) {
    if (s + eps.steps > x.grid().n_steps()) {
        throw DomainError("s + eps beyond the horizon");
    }
    return tail_shift_at(stop_at(x, s), s + eps.steps, x[s + eps.steps] - x[s]);
}

namespace {

// Walks the (s, eps) lattice, handing each pair the difference F(X) - F(recon) at s + eps.
// The reconstruction is written in place: the frozen window is filled, the tail already
// equals X.
template <class Visit>
void lattice(const PathFunctional& f, const DiscretePath& x, Epsilon eps, Visit visit) {
    const TimeGrid& grid = x.grid();
    const std::size_t m = eps.steps;
    if (m == 0 || m > grid.n_steps()) {
        throw DomainError("epsilon must be between one step and the horizon");
    }
    if (x.dim() != 1) {
        throw DomainError("condition checks are implemented for scalar paths");
    }
    std::vector<double> buffer(x.values().begin(), x.values().end());
    for (std::size_t s = 0; s + m <= grid.n_steps(); ++s) {
        for (std::size_t j = s + 1; j < s + m; ++j) {
            buffer[j] = x[s];
        }
        const DiscretePath recon(grid, buffer);
        const double diff = f(s + m, x) - f(s + m, recon);
        visit(s, diff);
        for (std::size_t j = s + 1; j < s + m; ++j) {
            buffer[j] = x[j];
        }
    }
}

}  // namespace

double condition_E_eps(const PathFunctional& f, const DiscretePath& x, Epsilon eps) {
    double sum = 0.0;
    lattice(f, x, eps, [&](std::size_t, double diff) { sum += diff * diff; });
    return sum * x.grid().dt() / eps.time(x.grid());
}

std::vector<double> condition_E_eps(const PathFunctional& f, const DiscretePath& x,
                                    std::span<const Epsilon> ladder) {
    std::vector<double> out;
    out.reserve(ladder.size());
    for (const Epsilon& e : ladder) {
        out.push_back(condition_E_eps(f, x, e));
    }
    return out;
}

namespace {

template <class Rhs>
BoundReport run_bound(std::string name, const PathFunctional& f, const DiscretePath& x,
                      std::span<const Epsilon> ladder, Rhs rhs) {
    BoundReport r;
    r.name = std::move(name);
    const double dt = x.grid().dt();
    for (const Epsilon& e : ladder) {
        double e_sum = 0.0;
        double implied = 0.0;
        lattice(f, x, e, [&](std::size_t s, double diff) {
            const double bound = rhs(s, e);
            const double excess = std::abs(diff) - bound;
            ++r.pairs;
            if (excess > 1e-12 * (1.0 + std::abs(bound))) {
                ++r.violations;
            }
            r.max_violation = std::max(r.max_violation, excess);
            e_sum += diff * diff;
            implied += bound * bound;
        });
        r.eps.push_back(e.time(x.grid()));
        r.e_eps.push_back(e_sum * dt / e.time(x.grid()));
        r.implied.push_back(implied * dt / e.time(x.grid()));
    }
    r.max_violation = std::max(r.max_violation, 0.0);
    r.pass = r.violations == 0;
    return r;
}

}  // namespace

BoundReport bound_check_prop211(const PathFunctional& f, const DiscretePath& x,
                                const DominationPhi& phi, const DiscretePath& b,
                                std::span<const Epsilon> ladder) {
    require_same_grid(x, b);
    for (std::size_t k = 1; k < b.size(); ++k) {
        if (b[k] < b[k - 1]) {
            throw ConfigError("dominating b must be non-decreasing");
        }
    }
    return run_bound("integral_domination", f, x, ladder, [&](std::size_t s, Epsilon e) {
        double sum = 0.0;
        for (std::size_t u = s + 1; u < s + e.steps; ++u) {
            const double db = u + 1 < b.size() ? b[u + 1] - b[u] : 0.0;
            sum += phi(x, std::abs(x[u] - x[s])) * db;
        }
        return sum;
    });
}

BoundReport bound_check_frechet(const PathFunctional& f, const DiscretePath& x,
                                const WeightMeasure& dominating, std::span<const Epsilon> ladder) {
    if (!(dominating.grid() == x.grid())) {
        throw GridMismatch("dominating measure and path use different grids");
    }
    BoundReport r = bound_check_prop211(
        f, x, [](const DiscretePath&, double y) { return y; }, dominating.cumulative(), ladder);
    r.name = "frechet_domination";
    return r;
}

BoundReport bound_check_prop213(const PathFunctional& f, const DiscretePath& x,
                                const DominationPhi2& phi2, std::span<const Epsilon> ladder) {
    return run_bound("semimartingale_domination", f, x, ladder, [&](std::size_t s, Epsilon e) {
        double sup = 0.0;
        for (std::size_t u = s; u <= s + e.steps; ++u) {
            sup = std::max(sup, std::abs(x[u] - x[s]));
        }
        return phi2(x, sup, e.time(x.grid()));
    });
}

DoobMeyerResult doob_meyer_extract(const PathFunctional& f, const DiscretePath& x,
                                   double noise_scale, std::optional<double> h) {
    const DecompositionResult d = decompose(f, x, x, h);
    DoobMeyerResult r;
    r.integral_path = d.integral_path;
    r.a_path = d.gamma;
    r.threshold = noise_scale * std::sqrt(x.grid().dt());
    std::vector<double> ups;
    std::size_t above = 0;
    for (std::size_t k = 1; k < r.a_path.size(); ++k) {
        const double da = r.a_path[k] - r.a_path[k - 1];
        ups.push_back(std::max(da, 0.0));
        if (da > r.threshold) {
            ++above;
        }
    }
    r.up_fraction = ups.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(ups.size());
    r.up_q99 = ups.empty() ? 0.0 : quantile(ups, 0.99);
    r.non_increasing = r.up_q99 <= r.threshold;
    return r;
}

}  // namespace dlab
