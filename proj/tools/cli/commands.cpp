#include "commands.hpp"

#include <dlab/hedge.hpp>
#include <dlab/ito_verify.hpp>
#include <dlab/parallel.hpp>
#include <dlab/path.hpp>
#include <dlab/payoff.hpp>
#include <dlab/stats.hpp>
#include <dlab/uvm.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace fs = std::filesystem;

namespace dlab::cli {

std::ofstream Context::open(const std::string& name) {
    const fs::path file = out / name;
    fs::create_directories(file.parent_path());
    std::ofstream stream(file);
    if (!stream) {
        throw ConfigError("cannot write " + file.string());
    }
    outputs.push_back(name);
    return stream;
}

namespace {

std::string g(double v) { return format_double(v); }

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

}  // namespace

// simulate ---------------------------------------------------------------------------------

Outcome cmd_simulate(Context& ctx) {
    const Node root(ctx.config, "");
    root.allow({"grid", "model", "n_paths", "first_index", "seed"});
    const TimeGrid grid = parse_grid(root.child("grid"));
    const ModelSpec model = parse_model(root.child("model"));
    const auto n_paths = root.get_or<std::size_t>("n_paths", 100);
    if (n_paths == 0) {
        throw ConfigError("/n_paths: must be at least 1");
    }
    const auto first = root.get_or<std::uint64_t>("first_index", 0);
    const auto paths = sample(model, grid, SeedPlan{ctx.seed}, n_paths, first);

    auto csv = ctx.open("paths.csv");
    csv << "path_id,t,x,m,a,w\n";
    std::vector<double> terminal, qv;
    for (const SamplePath& s : paths) {
        for (std::size_t k = 0; k < grid.n_knots(); ++k) {
            csv << s.index << ',' << g(grid.time(k)) << ',' << g(s.x[k]) << ',' << g(s.m[k]) << ','
                << g(s.orthogonal[k]) << ',' << g(s.w[k]) << '\n';
        }
        terminal.push_back(s.x[grid.n_steps()]);
        qv.push_back(coquadratic_eps(s.x, s.x, Epsilon{1}, grid.n_steps()));
    }
    return {{{"model", to_string(model.kind)},
             {"n_paths", n_paths},
             {"n_steps", grid.n_steps()},
             {"x_T_mean", mean(terminal)},
             {"x_T_stderr", standard_error(terminal)},
             {"realized_qv_T_mean", mean(qv)}},
            0};
}

// derivative -------------------------------------------------------------------------------

Outcome cmd_derivative(Context& ctx) {
    const Node root(ctx.config, "");
    root.allow({"grid", "functional", "path", "h", "h2", "horizontal_steps", "modulus", "seed"});
    const TimeGrid grid = parse_grid(root.child("grid"));
    const PathFunctional f = parse_functional(grid, root.child("functional"));

    const Node pn = root.child("path");
    pn.allow({"values", "model", "index"});
    std::optional<DiscretePath> maybe_x;
    if (pn.has("values")) {
        if (pn.has("model")) {
            throw ConfigError(pn.at("values") + ": give either values or model");
        }
        auto values = pn.get<std::vector<double>>("values");
        if (values.size() != grid.n_knots()) {
            throw ConfigError(fmt::format("{}: expected {} values, got {}", pn.at("values"),
                                          grid.n_knots(), values.size()));
        }
        maybe_x.emplace(grid, std::move(values));
    } else {
        const ModelSpec model = parse_model(pn.child("model"));
        maybe_x.emplace(
            sample_one(model, grid, SeedPlan{ctx.seed}, pn.get_or<std::uint64_t>("index", 0)).x);
    }
    const DiscretePath& x = *maybe_x;

    const auto h = root.has("h") ? std::optional(root.get<double>("h")) : std::nullopt;
    const auto h2 = root.has("h2") ? std::optional(root.get<double>("h2")) : std::nullopt;
    const auto steps = root.get_or<std::size_t>("horizontal_steps", 1);
    if (steps == 0) {
        throw ConfigError("/horizontal_steps: must be at least 1");
    }

    auto csv = ctx.open("derivatives.csv");
    csv << "t,value,vertical,second_vertical,horizontal\n";
    double max_vertical = 0.0;
    for (std::size_t k = 0; k < grid.n_knots(); ++k) {
        const double v = f(k, x);
        const double d1 = vertical_derivative_at(f, k, x, h);
        const double d2 = second_vertical_derivative_at(f, k, x, h2);
        max_vertical = std::max(max_vertical, std::abs(d1));
        csv << g(grid.time(k)) << ',' << g(v) << ',' << g(d1) << ',' << g(d2) << ',';
        if (k + steps <= grid.n_steps()) {
            csv << g(horizontal_derivative_at(f, k, x, static_cast<double>(steps) * grid.dt()));
        }
        csv << '\n';
    }
    Outcome out{{{"functional", f.name},
                 {"knots", grid.n_knots()},
                 {"vertical_max_abs", max_vertical},
                 {"value_T", f(grid.n_steps(), x)}},
                0};

    if (auto m = root.maybe("modulus")) {
        m->allow({"bound_k", "n_samples", "n_bins"});
        const ModulusTable table =
            modulus_probe(f, grid, m->get_or("bound_k", 1.0), m->get_or<std::size_t>("n_samples", 10000),
                          ctx.seed, m->get_or<std::size_t>("n_bins", 10));
        auto mcsv = ctx.open("modulus.csv");
        mcsv << "r_lo,r_hi,max_increment,count\n";
        for (const auto& b : table.bins) {
            mcsv << g(b.r_lo) << ',' << g(b.r_hi) << ',' << g(b.max_increment) << ',' << b.count
                 << '\n';
        }
        out.summary["modulus_consistent"] = table.consistent;
        out.summary["verdict"] = verdict(table.consistent);
        out.exit_code = table.consistent ? 0 : 2;
    }
    return out;
}

// check-ito --------------------------------------------------------------------------------

namespace {

struct BoundSpec {
    std::string kind;
    std::optional<WeightMeasure> mu;
    double constant = 1.0;
};

BoundReport run_bound(const BoundSpec& spec, const PathFunctional& f, const DiscretePath& x,
                      std::span<const Epsilon> ladder) {
    if (spec.kind == "frechet") {
        return bound_check_frechet(f, x, *spec.mu, ladder);
    }
    if (spec.kind == "integral") {
        const double c = spec.constant;
        return bound_check_prop211(
            f, x, [c](const DiscretePath&, double y) { return c * y; }, spec.mu->cumulative(),
            ladder);
    }
    const double c = spec.constant;
    return bound_check_prop213(f, x, [c](const DiscretePath&, double y, double) { return c * y; },
                               ladder);
}

}  // namespace

Outcome cmd_check_ito(Context& ctx) {
    const Node root(ctx.config, "");
    root.allow({"grid", "functional", "model", "n_seeds", "seed", "eps", "tolerance",
                "monotone_slack", "bound"});
    const TimeGrid grid = parse_grid(root.child("grid"));
    const PathFunctional f = parse_functional(grid, root.child("functional"));
    const ModelSpec model = parse_model(root.child("model"));
    const auto ladder = parse_ladder(grid, root.maybe("eps"));
    if (ladder.size() < 3) {
        throw ConfigError("/eps: the diagnostic needs at least 3 widths");
    }
    const auto n_seeds = root.get_or<std::size_t>("n_seeds", 20);
    if (n_seeds == 0) {
        throw ConfigError("/n_seeds: must be at least 1");
    }
    UcpOptions opts;
    opts.tolerance = root.get_or("tolerance", 1e-2);
    opts.monotone_slack = root.get_or("monotone_slack", 0.0);

    std::optional<BoundSpec> bound;
    if (auto b = root.maybe("bound")) {
        b->allow({"kind", "mu", "constant"});
        BoundSpec spec{b->get<std::string>("kind"), std::nullopt, b->get_or("constant", 1.0)};
        if (spec.kind == "frechet" || spec.kind == "integral") {
            spec.mu = parse_measure(grid, b->child("mu"));
        } else if (spec.kind != "sup_increment") {
            throw ConfigError(b->at("kind") + ": expected frechet, integral or sup_increment");
        }
        bound = std::move(spec);
    }

    struct PerSeed {
        DecompositionResult d;
        std::vector<double> e_eps;
        OrthogonalitySample sample;
        std::optional<BoundReport> bound;
        double gradient_jump = 0.0;
    };
    std::vector<std::optional<PerSeed>> runs(n_seeds);
    parallel_for(n_seeds, [&](std::size_t i) {
        const SeedPlan plan{ctx.seed + i};
        const SamplePath s = sample_one(model, grid, plan, 0);
        PerSeed r{decompose(f, s.x, s.m), condition_E_eps(f, s.x, ladder),
                  OrthogonalitySample{DiscretePath::constant(grid, 0.0),
                                      default_martingale_family(s, plan)},
                  std::nullopt, 0.0};
        r.sample.gamma = DiscretePath(grid, r.d.gamma);
        if (bound) {
            r.bound = run_bound(*bound, f, s.x, ladder);
        }
        for (std::size_t k = 1; k < r.d.gradient.size(); ++k) {
            r.gradient_jump = std::max(r.gradient_jump, std::abs(r.d.gradient[k] - r.d.gradient[k - 1]));
        }
        runs[i] = std::move(r);
    });

    std::vector<OrthogonalitySample> samples;
    for (auto& r : runs) {
        samples.push_back(r->sample);
    }
    const OrthogonalityReport orth = orthogonality_test(samples, ladder, opts);

    // Curves averaged over seeds.
    auto gcsv = ctx.open("gamma_mean.csv");
    gcsv << "t,f_mean,integral_mean,gamma_mean\n";
    double gamma_sup = 0.0;
    for (std::size_t k = 0; k < grid.n_knots(); ++k) {
        double fm = 0.0, im = 0.0, gm = 0.0;
        for (const auto& r : runs) {
            fm += r->d.f_path[k];
            im += r->d.integral_path[k];
            gm += r->d.gamma[k];
        }
        const double n = static_cast<double>(n_seeds);
        gamma_sup = std::max(gamma_sup, std::abs(gm / n));
        gcsv << g(grid.time(k)) << ',' << g(fm / n) << ',' << g(im / n) << ',' << g(gm / n) << '\n';
    }

    auto ecsv = ctx.open("e_eps.csv");
    ecsv << "seed,eps,e_eps\n";
    double e_max = 0.0;
    std::vector<double> medians;
    for (std::size_t j = 0; j < ladder.size(); ++j) {
        std::vector<double> column;
        for (std::size_t i = 0; i < n_seeds; ++i) {
            const double e = runs[i]->e_eps[j];
            e_max = std::max(e_max, e);
            column.push_back(e);
            ecsv << ctx.seed + i << ',' << g(ladder[j].time(grid)) << ',' << g(e) << '\n';
        }
        medians.push_back(median(column));
    }
    bool e_decreasing = true;
    for (std::size_t j = 1; j < medians.size(); ++j) {
        e_decreasing = e_decreasing && medians[j] <= medians[j - 1];
    }
    const bool e_ok = e_decreasing && medians.back() <= opts.tolerance;

    auto ocsv = ctx.open("orthogonality.csv");
    ocsv << "martingale,eps,sup_difference\n";
    nlohmann::json orth_json = nlohmann::json::object();
    for (const auto& v : orth.verdicts) {
        for (std::size_t i = 0; i < v.report.sup_differences.size(); ++i) {
            ocsv << v.name << ',' << g(v.report.epsilons[i + 1]) << ','
                 << g(v.report.sup_differences[i]) << '\n';
        }
        orth_json[v.name] = {{"verdict", to_string(v.report.verdict)},
                             {"terminal", v.terminal},
                             {"limit_error", v.report.limit_error}};
        auto sweep = ctx.open(fmt::format("bracket_{}_seed{}.csv", v.name, ctx.seed));
        const auto& first = runs.front()->sample;
        for (const auto& m : first.family) {
            if (m.name == v.name) {
                write_sweep_csv(sweep, coquadratic_sweep(first.gamma, m.path, ladder));
            }
        }
    }

    double gradient_jump = 0.0;
    for (const auto& r : runs) {
        gradient_jump = std::max(gradient_jump, r->gradient_jump);
    }
    bool pass = orth.pass && e_ok;
    Outcome out{{{"functional", f.name},
                 {"n_seeds", n_seeds},
                 {"E_eps_max", e_max},
                 {"E_eps_median", medians},
                 {"E_eps_decreasing", e_decreasing},
                 {"gamma_mean_sup", gamma_sup},
                 {"orthogonality", orth_json},
                 // Largest jump of the vertical gradient between knots; reported only.
                 {"gradient_jump_max", gradient_jump}},
                0};
    if (bound) {
        std::size_t violations = 0, pairs = 0;
        double worst = 0.0;
        for (const auto& r : runs) {
            violations += r->bound->violations;
            pairs += r->bound->pairs;
            worst = std::max(worst, r->bound->max_violation);
        }
        out.summary["bound"] = {{"kind", bound->kind},
                                {"pairs", pairs},
                                {"violations", violations},
                                {"max_violation", worst}};
        pass = pass && violations == 0;
    }
    out.summary["verdict"] = verdict(pass);
    out.exit_code = pass ? 0 : 2;
    return out;
}

// uvm-solve --------------------------------------------------------------------------------

Outcome cmd_uvm_solve(Context& ctx) {
    const Node root(ctx.config, "");
    root.allow({"problem", "write_layers", "audit", "vn", "tensor_check", "seed"});
    const UvmProblem problem = parse_problem(root.child("problem"));
    const auto field = bsb_solve(problem);
    const double price = field->value(0, problem.x0, 0.0);
    const double mass = problem.mu.total_mass();

    auto csv = ctx.open("value_t0.csv");
    csv << "x,v,delta\n";
    for (double z : field->z_nodes()) {
        const double x = z / mass;
        csv << g(x) << ',' << g(field->value(0, x, 0.0)) << ',' << g(field->dx(0, x, 0.0)) << '\n';
    }
    Outcome out{{{"price", price},
                 {"delta", field->dx(0, problem.x0, 0.0)},
                 {"total_mass", mass},
                 {"n_steps", problem.grid().n_steps()},
                 {"z_nodes", field->z_nodes().size()},
                 {"dz", field->dz()},
                 {"substeps", field->substeps()}},
                0};

    if (root.get_or("write_layers", false)) {
        field->write((ctx.out / "field").string());
        for (std::size_t k = 0; k < problem.grid().n_knots(); ++k) {
            ctx.outputs.push_back(fmt::format("field/layer_{:05}.csv", k));
        }
        ctx.outputs.push_back("field/manifest.json");
    }
    if (root.has("vn")) {
        auto vcsv = ctx.open("vn.csv");
        vcsv << "n,value,gap\n";
        nlohmann::json rows = nlohmann::json::array();
        for (auto n : root.get<std::vector<std::size_t>>("vn")) {
            double vn;
            try {
                vn = discrete_value_vn(problem, n);
            } catch (const ConfigError& e) {
                rethrow_under("/vn", e);
            }
            vcsv << n << ',' << g(vn) << ',' << g(std::abs(vn - price)) << '\n';
            rows.push_back({{"n", n}, {"value", vn}, {"gap", std::abs(vn - price)}});
        }
        out.summary["vn"] = rows;
    }
    // Tabulated payoffs fall outside the family the regularity bounds are stated for.
    out.summary["payoff_audited"] = problem.payoff.kind != PayoffKind::CustomTable;
    if (root.get_or("tensor_check", false)) {
        const TensorField t = bsb_solve_tensor(problem);
        const double tp = t.value(problem.x0, 0.0);
        out.summary["tensor_price"] = tp;
        out.summary["tensor_gap"] = std::abs(tp - price);
    }
    if (auto a = root.maybe("audit")) {
        a->allow({"n_probes", "seed", "exponent_fraction"});
        AuditOptions opts;
        opts.n_probes = a->get_or("n_probes", opts.n_probes);
        opts.seed = a->get_or("seed", ctx.seed);
        opts.exponent_fraction = a->get_or("exponent_fraction", opts.exponent_fraction);
        const AuditReport report = regularity_audit(*field, opts);
        auto acsv = ctx.open("audit.csv");
        acsv << "check,probes,violations,max_normalized_violation,exponent,fitted_constant,pass\n";
        for (const auto& c : report.checks) {
            acsv << c.name << ',' << c.probes << ',' << c.violations << ','
                 << g(c.max_normalized_violation) << ',' << (c.exponent ? g(*c.exponent) : "")
                 << ',' << g(c.fitted_constant) << ',' << (c.pass ? 1 : 0) << '\n';
        }
        out.summary["audit"] = report.to_json();
        out.summary["verdict"] = verdict(report.pass);
        out.exit_code = report.pass ? 0 : 2;
    }
    return out;
}

// hedge ------------------------------------------------------------------------------------

namespace {

std::vector<Adversary> parse_adversaries(const Node& root, std::shared_ptr<const ValueField> field,
                                         double switch_prob) {
    if (!root.has("adversaries")) {
        return default_adversaries(field, switch_prob);
    }
    const UvmProblem& p = field->problem();
    std::vector<Adversary> out;
    std::map<std::string, int> seen;
    for (const Node& a : root.items("adversaries")) {
        a.allow({"kind", "sigma", "switch_prob", "name"});
        const auto kind = a.get<std::string>("kind");
        Adversary adv;
        if (kind == "constant") {
            const double s = a.get<double>("sigma");
            adv = {fmt::format("constant_{}", s), constant_policy(s)};
        } else if (kind == "sigma_lo") {
            adv = {"sigma_lo", constant_policy(p.sigma_lo)};
        } else if (kind == "sigma_hi") {
            adv = {"sigma_hi", constant_policy(p.sigma_hi)};
        } else if (kind == "regime_switching") {
            adv = {"regime_switching",
                   regime_switching_policy(p.sigma_lo, p.sigma_hi,
                                           a.get_or("switch_prob", switch_prob))};
        } else if (kind == "worst_case") {
            adv = {"worst_case", worst_case_policy(field)};
        } else {
            throw ConfigError(a.at("kind") + ": unknown adversary kind '" + kind + "'");
        }
        adv.name = a.get_or("name", adv.name);
        if (seen[adv.name]++ > 0) {
            adv.name += fmt::format("_{}", out.size());
        }
        out.push_back(std::move(adv));
    }
    if (out.empty()) {
        throw ConfigError("/adversaries: list is empty");
    }
    return out;
}

void write_report(Context& ctx, const HedgeReport& r, bool positions, const std::string& prefix = "") {
    auto pnl = ctx.open(fmt::format("{}pnl_{}.csv", prefix, r.adversary));
    write_pnl_csv(pnl, r);
    if (positions) {
        auto pos = ctx.open(fmt::format("{}positions_{}.csv", prefix, r.adversary));
        write_positions_csv(pos, r);
    }
}

}  // namespace

Outcome cmd_hedge(Context& ctx) {
    const Node root(ctx.config, "");
    root.allow({"problem", "mode", "sigma", "n_paths", "seed", "adversaries", "adversary",
                "switch_prob", "ladder", "delta", "keep_positions"});
    const Node pnode = root.child("problem");
    const auto mode = root.get_or<std::string>("mode", "superhedge");
    HedgeOptions opts;
    opts.n_paths = root.get_or<std::size_t>("n_paths", 1000);
    opts.plan = SeedPlan{ctx.seed};
    opts.keep_positions = root.get_or("keep_positions", false);
    const double switch_prob = root.get_or("switch_prob", 0.1);
    if (opts.n_paths == 0) {
        throw ConfigError("/n_paths: must be at least 1");
    }

    if (mode == "ladder") {
        if (root.has("adversaries") || root.has("adversary")) {
            throw ConfigError("/adversaries: ladder mode always runs the default adversaries");
        }
        const auto ladder = root.get_or<std::vector<std::size_t>>("ladder", {256, 512, 1024, 2048});
        const LadderReport rep = superhedge_ladder(
            [&](std::size_t n) { return parse_problem_with_steps(pnode, n); }, ladder, opts,
            switch_prob);
        auto csv = ctx.open("ladder.csv");
        csv << "n_steps,dt,v0,adversary,pnl_mean,pnl_stderr,shortfall_q999,shortfall_fraction\n";
        nlohmann::json levels = nlohmann::json::array();
        for (const auto& level : rep.levels) {
            for (const auto& r : level.reports) {
                csv << level.n_steps << ',' << g(level.dt) << ',' << g(level.v0) << ','
                    << r.adversary << ',' << g(r.summary.mean) << ',' << g(r.summary.stderr_mean)
                    << ',' << g(r.summary.shortfall_q999) << ',' << g(r.summary.shortfall_fraction)
                    << '\n';
                write_report(ctx, r, opts.keep_positions, fmt::format("n{}/", level.n_steps));
            }
            levels.push_back({{"n_steps", level.n_steps},
                              {"v0", level.v0},
                              {"shortfall_q999", level.shortfall_q999},
                              {"worst_adversary", level.worst_adversary},
                              {"worst_case_mean", level.worst_case_mean},
                              {"worst_case_stderr", level.worst_case_stderr}});
        }
        return {{{"mode", mode},
                 {"levels", levels},
                 {"c", rep.c},
                 {"C", rep.big_c},
                 {"shortfall_decreasing", rep.shortfall_decreasing},
                 {"shortfall_within", rep.shortfall_within},
                 {"duality_within", rep.duality_within},
                 {"verdict", verdict(rep.pass)}},
                rep.pass ? 0 : 2};
    }

    const UvmProblem problem = parse_problem(pnode);
    const auto field = bsb_solve(problem);
    if (mode == "replication") {
        const double sigma = root.get_or("sigma", problem.sigma_hi);
        const HedgeReport r = replication_backtest(*field, sigma, opts);
        write_report(ctx, r, opts.keep_positions);
        return {{{"mode", mode}, {"report", r.summary_json()}}, 0};
    }
    if (mode == "superhedge") {
        const auto adversaries = parse_adversaries(root, field, switch_prob);
        const auto reports = superhedge_backtest(*field, adversaries, opts);
        nlohmann::json all = nlohmann::json::array();
        for (const auto& r : reports) {
            write_report(ctx, r, opts.keep_positions);
            all.push_back(r.summary_json());
        }
        return {{{"mode", mode}, {"v0", reports.front().v0}, {"reports", all}}, 0};
    }
    if (mode == "price_gap") {
        const double delta = root.get<double>("delta");
        if (!(delta >= 0.0)) {
            throw ConfigError("/delta: must be non-negative");
        }
        Adversary adv{"worst_case", worst_case_policy(field)};
        if (auto a = root.maybe("adversary")) {
            json wrapped = {{"adversaries", json::array({a->raw()})}};
            adv = parse_adversaries(Node(wrapped, ""), field, switch_prob).front();
        }
        const PriceGapReport r = price_gap_probe(*field, delta, adv, opts);
        write_report(ctx, r.hedge, opts.keep_positions);
        return {{{"mode", mode},
                 {"delta", delta},
                 {"shortfall_fraction", r.shortfall_fraction},
                 {"report", r.hedge.summary_json()}},
                0};
    }
    throw ConfigError("/mode: expected replication, superhedge, price_gap or ladder");
}

// report -----------------------------------------------------------------------------------

Outcome cmd_report(Context& ctx) {
    const Node root(ctx.config, "");
    root.allow({"runs", "seed"});
    const auto runs = root.get<std::vector<std::string>>("runs");
    if (runs.empty()) {
        throw ConfigError("/runs: list is empty");
    }
    auto csv = ctx.open("report.csv");
    csv << "run,subcommand,verdict,config_hash,exit_code\n";
    nlohmann::json all = nlohmann::json::array();
    std::size_t failed = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const fs::path dir = runs[i];
        auto load = [&](const char* name) {
            std::ifstream in(dir / name);
            if (!in) {
                throw ConfigError(fmt::format("/runs/{}: {} not found in {}", i, name, dir.string()));
            }
            try {
                return nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(fmt::format("/runs/{}: {}: {}", i, name, e.what()));
            }
        };
        const auto summary = load("summary.json");
        const auto manifest = load("manifest.json");
        const std::string v = summary.value("verdict", "COMPLETE");
        failed += v == "FAIL" ? 1 : 0;
        csv << dir.string() << ',' << manifest.value("subcommand", "") << ',' << v << ','
            << manifest.value("config_hash", "") << ',' << manifest.value("exit_code", -1) << '\n';
        all.push_back({{"run", dir.string()},
                       {"subcommand", manifest.value("subcommand", "")},
                       {"verdict", v},
                       {"wall_time_s", manifest.value("wall_time_s", 0.0)},
                       {"summary", summary}});
    }
    return {{{"runs", all}, {"failed", failed}, {"verdict", verdict(failed == 0)}},
            failed == 0 ? 0 : 2};
}

}  // namespace dlab::cli
