#include "dlab/hedge.hpp"

#include "dlab/error.hpp"
#include "dlab/parallel.hpp"
#include "dlab/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dlab {

std::vector<Adversary> default_adversaries(std::shared_ptr<const ValueField> field,
                                           double switch_prob,
                                           std::shared_ptr<ExtrapolationCounter> counter) {
    const UvmProblem& p = field->problem();
    return {{"sigma_lo", constant_policy(p.sigma_lo)},
            {"sigma_hi", constant_policy(p.sigma_hi)},
            {"regime_switching", regime_switching_policy(p.sigma_lo, p.sigma_hi, switch_prob)},
            {"worst_case", worst_case_policy(field, std::move(counter))}};
}

double recompute_pnl(double capital, std::span<const double> positions,
                     std::span<const double> increments, double payoff) {
    if (positions.size() != increments.size()) {
        throw DomainError("position and increment ledgers differ in length");
    }
    double gains = 0.0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        gains += positions[k] * increments[k];
    }
    return (capital + gains) - payoff;
}

nlohmann::json HedgeReport::summary_json() const {
    const HedgeSummary& s = summary;
    return {{"adversary", adversary},
            {"v0", v0},
            {"capital", capital},
            {"dt", dt},
            {"n_paths", paths.size()},
            {"pnl_mean", s.mean},
            {"pnl_std", s.stddev},
            {"pnl_stderr", s.stderr_mean},
            {"pnl_rmse", s.rmse},
            {"pnl_min", s.min},
            {"pnl_max", s.max},
            {"pnl_q01", s.q01},
            {"pnl_q50", s.q50},
            {"pnl_q99", s.q99},
            {"shortfall_q999", s.shortfall_q999},
            {"shortfall_fraction", s.shortfall_fraction},
            {"sup_position", s.sup_position},
            {"extrapolated_paths", s.extrapolated_paths}};
}

namespace {

HedgeSummary summarize(const std::vector<PathRecord>& paths) {
    std::vector<double> pnl, shortfall;
    pnl.reserve(paths.size());
    shortfall.reserve(paths.size());
    HedgeSummary s;
    double sq = 0.0;
    std::size_t short_count = 0;
    for (const PathRecord& r : paths) {
        pnl.push_back(r.pnl);
        shortfall.push_back(r.shortfall);
        sq += r.pnl * r.pnl;
        short_count += r.shortfall > 0.0 ? 1 : 0;
        s.sup_position = std::max(s.sup_position, r.sup_position);
        s.extrapolated_paths += r.extrapolated ? 1 : 0;
    }
    s.mean = mean(pnl);
    s.stddev = stddev(pnl);
    s.stderr_mean = standard_error(pnl);
    s.rmse = std::sqrt(sq / static_cast<double>(pnl.size()));
    s.min = *std::min_element(pnl.begin(), pnl.end());
    s.max = *std::max_element(pnl.begin(), pnl.end());
    s.q01 = quantile(pnl, 0.01);
    s.q50 = quantile(pnl, 0.5);
    s.q99 = quantile(pnl, 0.99);
    s.shortfall_q999 = quantile(shortfall, 0.999);
    s.shortfall_fraction = static_cast<double>(short_count) / static_cast<double>(paths.size());
    return s;
}

}  // namespace

HedgeReport hedge_paths(const ValueField& field, const ModelSpec& model, const std::string& name,
                        const HedgeOptions& options) {
    if (options.n_paths == 0) {
        throw ConfigError("n_paths must be at least 1");
    }
    const TimeGrid& grid = field.grid();
    const WeightMeasure& mu = field.problem().mu;
    const std::size_t n = grid.n_steps();
    ModelSpec run = model;
    if (!run.accrual) {
        run.accrual = mu;
    }
    run.validate();

    HedgeReport report;
    report.adversary = name;
    report.dt = grid.dt();
    report.v0 = field.value(0, field.problem().x0, 0.0);
    report.capital = report.v0 - options.capital_deficit;
    report.paths.resize(options.n_paths);

    parallel_for(options.n_paths, [&](std::size_t i) {
        const SamplePath sp = sample_one(run, grid, options.plan, i);
        const DiscretePath& x = sp.x;
        PathRecord& rec = report.paths[i];
        rec.path_id = i;
        std::vector<double> positions(n), increments(n);
        double a = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double z = a + x[k] * mu.mass_from(k);
            if (z < field.z_nodes().front() || z > field.z_nodes().back()) {
                rec.extrapolated = true;
            }
            // Left-point position: only knots up to k are read.
            positions[k] = mu.mass_from(k + 1) * field.u_z(k, z);
            increments[k] = x[k + 1] - x[k];
            rec.sup_position = std::max(rec.sup_position, std::abs(positions[k]));
            a += x[k] * mu.knot_mass(k);
        }
        rec.payoff = field.problem().payoff(a + x[n] * mu.mass_from(n));
        rec.pnl = recompute_pnl(report.capital, positions, increments, rec.payoff);
        rec.shortfall = std::max(0.0, -rec.pnl);
        if (options.keep_positions) {
            rec.positions = std::move(positions);
            rec.increments = std::move(increments);
        }
    });
    report.summary = summarize(report.paths);
    return report;
}

HedgeReport replication_backtest(const ValueField& field, double sigma,
                                 const HedgeOptions& options) {
    const UvmProblem& p = field.problem();
    const double tol = 1e-12 * std::max(1.0, sigma);
    if (std::abs(p.sigma_lo - sigma) > tol || std::abs(p.sigma_hi - sigma) > tol) {
        throw ConfigError(fmt::format(
            "replication needs the field solved at sigma = {}, got band [{}, {}]", sigma,
            p.sigma_lo, p.sigma_hi));
    }
    ModelSpec model;
    model.kind = ModelKind::UvmPolicy;
    model.x0 = p.x0;
    model.sigma_lo = sigma;
    model.sigma_hi = sigma;
    model.policy = constant_policy(sigma);
    return hedge_paths(field, model, "replication", options);
}

std::vector<HedgeReport> superhedge_backtest(const ValueField& field,
                                             std::span<const Adversary> adversaries,
                                             const HedgeOptions& options) {
    const UvmProblem& p = field.problem();
    std::vector<HedgeReport> out;
    for (std::size_t i = 0; i < adversaries.size(); ++i) {
        ModelSpec model;
        model.kind = ModelKind::UvmPolicy;
        model.x0 = p.x0;
        model.sigma_lo = p.sigma_lo;
        model.sigma_hi = p.sigma_hi;
        model.policy = adversaries[i].policy;
        try {
            out.push_back(hedge_paths(field, model, adversaries[i].name, options));
        } catch (const DomainError& e) {
            throw ConfigError(
                fmt::format("adversary {} ({}) left the band: {}", i, adversaries[i].name, e.what()));
        }
    }
    return out;
}

PriceGapReport price_gap_probe(const ValueField& field, double delta, const Adversary& adversary,
                               const HedgeOptions& options) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw DomainError("price gap delta must be finite and non-negative");
    }
    HedgeOptions shifted = options;
    shifted.capital_deficit = delta;
    PriceGapReport r;
    r.delta = delta;
    r.hedge = std::move(superhedge_backtest(field, std::span<const Adversary>(&adversary, 1), shifted)
                            .front());
    r.shortfall_fraction = r.hedge.summary.shortfall_fraction;
    return r;
}

LadderReport superhedge_ladder(const std::function<UvmProblem(std::size_t n_steps)>& make_problem,
                               std::span<const std::size_t> ladder, const HedgeOptions& options,
                               double switch_prob) {
    if (ladder.size() < 2) {
        throw ConfigError("a dt ladder needs at least two levels");
    }
    LadderReport out;
    for (std::size_t n_steps : ladder) {
        const auto field = bsb_solve(make_problem(n_steps));
        const auto adversaries = default_adversaries(field, switch_prob);
        LadderLevel level;
        level.n_steps = n_steps;
        level.dt = field->grid().dt();
        level.v0 = field->value(0, field->problem().x0, 0.0);
        level.reports = superhedge_backtest(*field, adversaries, options);
        for (const HedgeReport& r : level.reports) {
            if (r.summary.shortfall_q999 >= level.shortfall_q999) {
                level.shortfall_q999 = r.summary.shortfall_q999;
                level.worst_adversary = r.adversary;
            }
            if (r.adversary == "worst_case") {
                level.worst_case_mean = r.summary.mean;
                level.worst_case_stderr = r.summary.stderr_mean;
            }
        }
        out.levels.push_back(std::move(level));
    }

    const std::size_t last = out.levels.size() - 1;
    for (std::size_t i = 0; i < last; ++i) {
        const LadderLevel& l = out.levels[i];
        const double root = std::sqrt(l.dt);
        out.c = std::max(out.c, l.shortfall_q999 / root);
        out.big_c = std::max(
            out.big_c, std::max(0.0, std::abs(l.worst_case_mean) - 3.0 * l.worst_case_stderr) / root);
    }
    const LadderLevel& fine = out.levels[last];
    out.shortfall_within = fine.shortfall_q999 <= out.c * std::sqrt(fine.dt);
    out.duality_within = std::abs(fine.worst_case_mean) <=
                         3.0 * fine.worst_case_stderr + out.big_c * std::sqrt(fine.dt);
    out.shortfall_decreasing = true;
    for (std::size_t i = 1; i < out.levels.size(); ++i) {
        const double prev = out.levels[i - 1].shortfall_q999;
        const double cur = out.levels[i].shortfall_q999;
        if (!(cur < prev || (cur == 0.0 && prev == 0.0))) {
            out.shortfall_decreasing = false;
        }
    }
    out.pass = out.shortfall_within && out.duality_within && out.shortfall_decreasing;
    return out;
}

void write_pnl_csv(std::ostream& out, const HedgeReport& report) {
    out << "path_id,pnl,shortfall\n";
    for (const PathRecord& r : report.paths) {
        out << r.path_id << ',' << format_double(r.pnl) << ',' << format_double(r.shortfall) << '\n';
    }
}

void write_positions_csv(std::ostream& out, const HedgeReport& report) {
    out << "path_id,step,position,increment\n";
    for (const PathRecord& r : report.paths) {
        if (r.positions.empty() && !report.paths.empty() && report.dt > 0.0) {
            throw ConfigError("positions were not kept for this report");
        }
        for (std::size_t k = 0; k < r.positions.size(); ++k) {
            out << r.path_id << ',' << k << ',' << format_double(r.positions[k]) << ','
                << format_double(r.increments[k]) << '\n';
        }
    }
}

}  // namespace dlab
