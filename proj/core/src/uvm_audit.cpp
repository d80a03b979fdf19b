#include "dlab/error.hpp"
#include "dlab/parallel.hpp"
#include "dlab/simulate.hpp"
#include "dlab/stats.hpp"
#include "dlab/uvm.hpp"

#include <algorithm>
#include <cmath>

namespace dlab {

namespace {

struct Probe {
    // (a) time shift and (b) path Lipschitz
    double shift_excess = 0.0;
    double path_excess = 0.0;
    // (c) delta against path distance, (d) delta against time shift
    bool holder_ok = false;
    double path_r = 0.0;
    double path_dh = 0.0;
    double path_scale = 0.0;
    bool time_ok = false;
    double time_r = 0.0;
    double time_dh = 0.0;
    double time_scale = 0.0;
};

bool near_atom(const WeightMeasure& mu, std::size_t lo, std::size_t hi) {
    // Any atom in [lo - 1, hi + 1]: the delta genuinely jumps across atoms.
    for (const Atom& a : mu.atoms()) {
        if (a.index + 1 >= lo && a.index <= hi + 1) {
            return true;
        }
    }
    return false;
}

// Fits log(max increment per bin) against log(bin centre) on log-spaced bins.
// Increments at or below `noise` are rounding and carry no exponent.
std::optional<double> binned_exponent(const std::vector<double>& r, const std::vector<double>& d,
                                      double noise, std::size_t n_bins = 8) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] > 0.0 && d[i] > noise) {
            lo = std::min(lo, r[i]);
            hi = std::max(hi, r[i]);
        }
    }
    if (!(hi > lo)) {
        return std::nullopt;
    }
    const double span = std::log(hi / lo);
    std::vector<double> best(n_bins, 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] > 0.0 && d[i] > noise) {
            auto b = static_cast<std::size_t>(std::log(r[i] / lo) / span * static_cast<double>(n_bins));
            b = std::min(b, n_bins - 1);
            best[b] = std::max(best[b], d[i]);
        }
    }
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (best[b] > 0.0) {
            xs.push_back(lo * std::exp(span * (static_cast<double>(b) + 0.5) / static_cast<double>(n_bins)));
            ys.push_back(best[b]);
        }
    }
    if (xs.size() < 3) {
        return std::nullopt;
    }
    return fit_log_log(xs, ys).slope;
}

}  // namespace

AuditReport regularity_audit(const ValueField& field, const AuditOptions& options) {
    if (options.n_probes == 0) {
        throw ConfigError("regularity audit needs at least one probe");
    }
    const UvmProblem& p = field.problem();
    const TimeGrid& grid = field.grid();
    const WeightMeasure& mu = p.mu;
    const std::size_t n = grid.n_steps();
    const double lip = p.payoff.lipschitz();
    const double alpha = p.payoff.alpha;

    AuditReport report;
    const auto z = field.z_nodes();
    for (std::size_t k = 0; k < n; ++k) {
        const auto layer = field.layer(k);
        for (std::size_t j = 1; j + 1 < z.size(); ++j) {
            report.sup_delta = std::max(
                report.sup_delta, std::abs(mu.mass_from(k) * (layer[j + 1] - layer[j - 1]) /
                                           (2.0 * field.dz())));
        }
    }
    const double dx = field.dz() / mu.total_mass();
    report.slack = 2.0 * dx * report.sup_delta;
    const double floor = 1e-12 * std::max(1.0, std::abs(field.u(0, field.z_of(0, p.x0, 0.0))));
    const double slack = std::max(report.slack, floor);

    ModelSpec model;
    model.kind = ModelKind::UvmPolicy;
    model.x0 = p.x0;
    model.sigma_lo = p.sigma_lo;
    model.sigma_hi = p.sigma_hi;
    model.policy = regime_switching_policy(p.sigma_lo, p.sigma_hi, 0.1);
    const SeedPlan plan{options.seed};
    const CounterRng rng = plan.rng();
    const double scale = p.sigma_hi * std::sqrt(grid.horizon());

    std::vector<Probe> probes(options.n_probes);
    parallel_for(options.n_probes, [&](std::size_t i) {
        auto draw = [&](std::uint32_t slot) { return rng.uniform(i, slot, streams::probe); };
        const DiscretePath x = sample_one(model, grid, plan, i).x;
        const DiscretePath xi = brownian_path(grid, plan, i, streams::independent);

        const auto k = std::min<std::size_t>(n - 1, static_cast<std::size_t>(draw(0) * static_cast<double>(n)));
        const double room = static_cast<double>(n - k);
        const auto m = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(std::exp(draw(1) * std::log(room)))), 1, n - k);
        const double delta = scale * std::pow(10.0, -3.0 + 3.0 * draw(2));
        const double peak = sup_norm(xi);
        std::vector<double> shifted(x.values().begin(), x.values().end());
        if (peak > 0.0) {
            for (std::size_t j = 0; j < shifted.size(); ++j) {
                shifted[j] += delta * xi[j] / peak;
            }
        }
        const DiscretePath xp(grid, std::move(shifted));

        Probe& out = probes[i];
        const ValueAndDelta base = value_and_delta(field, k, x);
        const ValueAndDelta other = value_and_delta(field, k, xp);
        const double zk = field.z_of(k, x[k], base.accrued);

        // (a) |V(t+h, x_{t^}) - V(t, x)| <= L sigma_hi sqrt(h) mu([t, T]); the stopped path
        // keeps z fixed.
        const double h = grid.time(k + m) - grid.time(k);
        const double lhs_a = std::abs(field.u(k + m, zk) - base.value);
        const double rhs_a = lip * p.sigma_hi * std::sqrt(h) * mu.mass_from(k);
        out.shift_excess = std::max(0.0, lhs_a - rhs_a) / slack;

        // (b) |V(t, x') - V(t, x)| <= L integral |x'_{t^} - x_{t^}| dmu
        double before = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            before += std::abs(xp[j] - x[j]) * mu.knot_mass(j);
        }
        const double now = std::abs(xp[k] - x[k]);
        const double rhs_b = lip * (before + now * mu.mass_from(k));
        out.path_excess = std::max(0.0, std::abs(other.value - base.value) - rhs_b) / slack;

        // (c) delta against path distance
        if (!near_atom(mu, k, k)) {
            out.holder_ok = true;
            out.path_r = std::max(before, now);
            out.path_dh = std::abs(other.delta - base.delta);
            out.path_scale = std::pow(before, alpha) + std::pow(now, alpha);
        }
        // (d) delta against time shift along the stopped path
        if (!near_atom(mu, k, k + m) && k + m < n) {
            out.time_ok = true;
            out.time_r = h;
            out.time_dh =
                std::abs(mu.mass_from(k + m) * field.u_z(k + m, zk) - base.delta);
            out.time_scale = std::pow(h, alpha / (2.0 + 2.0 * alpha)) + mu.mass_between(k, k + m);
        }
    });

    BoundCheck shift, path, holder, timemod;
    shift.name = "time_shift";
    shift.probes = probes.size();
    path.name = "path_lipschitz";
    path.probes = probes.size();
    holder.name = "delta_path_holder";
    timemod.name = "delta_time_modulus";
    std::vector<double> pr, pd, tr, td;
    for (const Probe& q : probes) {
        shift.max_normalized_violation = std::max(shift.max_normalized_violation, q.shift_excess);
        shift.violations += q.shift_excess > 1.0 ? 1 : 0;
        path.max_normalized_violation = std::max(path.max_normalized_violation, q.path_excess);
        path.violations += q.path_excess > 1.0 ? 1 : 0;
        if (q.holder_ok) {
            ++holder.probes;
            pr.push_back(q.path_r);
            pd.push_back(q.path_dh);
            if (q.path_scale > 0.0) {
                holder.fitted_constant = std::max(holder.fitted_constant, q.path_dh / q.path_scale);
            }
        }
        if (q.time_ok) {
            ++timemod.probes;
            tr.push_back(q.time_r);
            td.push_back(q.time_dh);
            if (q.time_scale > 0.0) {
                timemod.fitted_constant = std::max(timemod.fitted_constant, q.time_dh / q.time_scale);
            }
        }
    }
    shift.pass = shift.violations == 0;
    path.pass = path.violations == 0;
    const double noise = 1e-9 * std::max(1.0, report.sup_delta);
    holder.exponent = binned_exponent(pr, pd, noise);
    holder.pass = !holder.exponent || *holder.exponent >= options.exponent_fraction * alpha;
    timemod.exponent = binned_exponent(tr, td, noise);
    timemod.pass = !timemod.exponent ||
                   *timemod.exponent >= options.exponent_fraction * alpha / (2.0 + 2.0 * alpha);

    report.checks = {shift, path, holder, timemod};
    report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const BoundCheck& c) { return c.pass; });
    return report;
}

}  // namespace dlab
