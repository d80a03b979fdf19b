#include <dlab/error.hpp>
#include <dlab/ito_verify.hpp>
#include <dlab/stats.hpp>
#include <dlab/uvm.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace dlab;

namespace {

ModelSpec brownian(double x0 = 0.0, double sigma = 1.0) {
    ModelSpec m;
    m.kind = ModelKind::Brownian;
    m.x0 = x0;
    m.sigma = sigma;
    return m;
}

PathFunctional identity() {
    return catalog::markovian("x", [](double, std::span<const double> x) { return x[0]; });
}

// Reads the path increment into the middle knot, so every window straddling T/2 sees an
// O(1) change however small the window.
PathFunctional middle_increment() {
    PathFunctional f;
    f.name = "middle_increment";
    f.eval = [](std::size_t k, const DiscretePath& x) {
        const std::size_t mid = x.grid().n_steps() / 2;
        if (k < mid) {
            return 0.0;
        }
        const double d = x[mid] - x[mid - 1];
        return d * d / x.grid().dt();
    };
    return f;
}

WeightMeasure smooth_density(const TimeGrid& grid, double scale = 1.0) {
    std::vector<double> w(grid.n_steps());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = scale * (1.0 + 0.5 * std::sin(3.0 * grid.time(i)));
    }
    return WeightMeasure(grid, w);
}

double medians_slope(const std::vector<std::vector<double>>& e, const std::vector<Epsilon>& ladder,
                     const TimeGrid& grid) {
    std::vector<double> eps, med;
    for (std::size_t j = 0; j < ladder.size(); ++j) {
        eps.push_back(ladder[j].time(grid));
        std::vector<double> col;
        for (const auto& row : e) {
            col.push_back(row[j]);
        }
        med.push_back(median(col));
    }
    return fit_log_log(eps, med).slope;
}

}  // namespace

TEST(Decompose, IdentityHasNoRemainder) {
    const TimeGrid grid(1.0, 4096);
    const auto s = sample_one(brownian(0.7), grid, SeedPlan{1}, 0);
    const auto d = decompose(catalog::power(1), s.x, s.m);
    for (double g : d.gamma) {
        EXPECT_NEAR(g, 0.0, 1e-12);
    }
}

TEST(Decompose, DensityRunningIntegralIsPureFiniteVariation) {
    const TimeGrid grid(1.0, 1024);
    const auto mu = smooth_density(grid);
    const auto s = sample_one(brownian(), grid, SeedPlan{2}, 0);
    const auto f = catalog::running_integral(mu);
    const auto d = decompose(f, s.x, s.m);
    for (std::size_t k = 0; k < grid.n_knots(); ++k) {
        EXPECT_EQ(d.gradient[k], 0.0);
        EXPECT_EQ(d.gamma[k], f(k, s.x) - f(0, s.x));
    }
}

TEST(Decompose, SquareRecoversQuadraticVariation) {
    const TimeGrid grid(1.0, 1u << 14);
    std::vector<double> mean_gamma(grid.n_knots(), 0.0);
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto s = sample_one(brownian(), grid, SeedPlan{300 + i}, 0);
        const auto d = decompose(catalog::power(2), s.x, s.m);
        for (std::size_t k = 0; k < grid.n_knots(); ++k) {
            mean_gamma[k] += d.gamma[k] / 20.0;
        }
    }
    double err = 0.0;
    for (std::size_t k = 0; k < grid.n_knots(); ++k) {
        err = std::max(err, std::abs(mean_gamma[k] - grid.time(k)));
    }
    EXPECT_LE(err, 0.05);
}

TEST(Orthogonality, SmoothDeterministicGammaPasses) {
    const TimeGrid grid(1.0, 1u << 12);
    const auto ladder = default_eps_ladder(grid, 3, 9);
    std::vector<OrthogonalitySample> samples;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const SeedPlan plan{70 + i};
        const auto s = sample_one(brownian(), grid, plan, 0);
        samples.push_back({DiscretePath::from_function(grid, [](double t) { return t * t; }),
                           default_martingale_family(s, plan)});
    }
    const auto report = orthogonality_test(samples, ladder);
    EXPECT_TRUE(report.pass);
    EXPECT_EQ(report.verdicts.size(), 5u);
}

TEST(Orthogonality, ZeroGammaPasses) {
    const TimeGrid grid(1.0, 256);
    const auto s = sample_one(brownian(), grid, SeedPlan{5}, 0);
    const auto family = default_martingale_family(s, SeedPlan{5});
    const auto report = orthogonality_test(DiscretePath::constant(grid, 0.0), family,
                                           default_eps_ladder(grid, 2, 6));
    EXPECT_TRUE(report.pass);
    for (const auto& v : report.verdicts) {
        EXPECT_EQ(v.terminal, 0.0);
    }
}

TEST(Orthogonality, SelfBracketFails) {
    const TimeGrid grid(1.0, 1u << 12);
    std::vector<OrthogonalitySample> samples;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const SeedPlan plan{90 + i};
        const auto s = sample_one(brownian(), grid, plan, 0);
        samples.push_back({s.w, {{"W", s.w}}});
    }
    const auto report = orthogonality_test(samples, default_eps_ladder(grid, 3, 9));
    EXPECT_FALSE(report.pass);
    EXPECT_NEAR(report.verdicts.front().terminal, grid.horizon(), 0.15);
}

TEST(Orthogonality, FamiliesMustAgree) {
    const TimeGrid grid(1.0, 64);
    const auto w = DiscretePath::constant(grid, 0.0);
    std::vector<OrthogonalitySample> samples = {{w, {{"W", w}}}, {w, {{"X", w}}}};
    EXPECT_THROW(orthogonality_test(samples, default_eps_ladder(grid, 2, 4)), ConfigError);
}

TEST(FrozenReconstruction, HoldsThenShifts) {
    const TimeGrid grid(1.0, 5);
    const DiscretePath x(grid, {0, 1, 3, 2, 5, 4});
    const auto r = frozen_reconstruction(x, 1, Epsilon{2});
    EXPECT_EQ(std::vector<double>(r.values().begin(), r.values().end()),
              (std::vector<double>{0, 1, 1, 2, 2, 2}));
    EXPECT_THROW(frozen_reconstruction(x, 4, Epsilon{2}), DomainError);
}

TEST(ConditionE, MarkovianIsExactlyZero) {
    const TimeGrid grid(1.0, 512);
    const auto s = sample_one(brownian(1.0), grid, SeedPlan{6}, 0);
    const auto ladder = default_eps_ladder(grid, 1, 9);
    for (const auto& f :
         {identity(), catalog::power(2), catalog::power(3),
          catalog::markovian("tx", [](double t, std::span<const double> x) { return t * std::exp(x[0]); })}) {
        for (double e : condition_E_eps(f, s.x, ladder)) {
            EXPECT_EQ(e, 0.0) << f.name;
        }
    }
}

TEST(ConditionE, DensityRunningIntegralDecays) {
    const TimeGrid grid(1.0, 1024);
    const auto mu = smooth_density(grid);
    const auto f = catalog::running_integral(mu);
    const auto ladder = default_eps_ladder(grid, 2, 8);
    std::vector<std::vector<double>> e;
    for (std::uint64_t i = 0; i < 100; ++i) {
        e.push_back(condition_E_eps(f, sample_one(brownian(), grid, SeedPlan{1000 + i}, 0).x, ladder));
    }
    std::vector<double> med;
    for (std::size_t j = 0; j < ladder.size(); ++j) {
        std::vector<double> col;
        for (const auto& row : e) {
            col.push_back(row[j]);
        }
        med.push_back(median(col));
        if (j > 0) {
            EXPECT_LT(med[j], med[j - 1]);
        }
    }
    const double mass = mu.total_mass();
    EXPECT_LT(med.back(), 1e-2 * mass * mass * grid.horizon());
    // (F diff)^2 ~ eps^3 per window, so E^eps ~ eps^2.
    EXPECT_NEAR(medians_slope(e, ladder, grid), 2.0, 0.3);
}

TEST(ConditionE, InteriorAtomDecaysOnlyLinearly) {
    const TimeGrid grid(1.0, 1024);
    const WeightMeasure mu(grid, std::vector<double>(grid.n_steps(), 0.0), {{512, 1.0}});
    const auto ladder = default_eps_ladder(grid, 2, 8);
    std::vector<std::vector<double>> e;
    for (std::uint64_t i = 0; i < 100; ++i) {
        e.push_back(condition_E_eps(catalog::running_integral(mu),
                                    sample_one(brownian(), grid, SeedPlan{2000 + i}, 0).x, ladder));
    }
    EXPECT_NEAR(medians_slope(e, ladder, grid), 1.0, 0.3);
}

TEST(ConditionE, IncrementReadingFunctionalStalls) {
    const TimeGrid grid(1.0, 1024);
    const auto ladder = default_eps_ladder(grid, 2, 7);
    std::vector<std::vector<double>> e;
    for (std::uint64_t i = 0; i < 100; ++i) {
        e.push_back(condition_E_eps(middle_increment(),
                                    sample_one(brownian(), grid, SeedPlan{3000 + i}, 0).x, ladder));
    }
    std::vector<double> med;
    for (std::size_t j = 0; j < ladder.size(); ++j) {
        std::vector<double> col;
        for (const auto& row : e) {
            col.push_back(row[j]);
        }
        med.push_back(median(col));
    }
    // Far above any convergence tolerance at every width of the ladder, and the decay is
    // well short of the rate of the density case.
    for (double m : med) {
        EXPECT_GT(m, 1.0);
    }
    EXPECT_LT(medians_slope(e, ladder, grid), 1.0);
}

TEST(BoundCheck, RunningIntegralHasNoViolations) {
    const TimeGrid grid(1.0, 256);
    const auto mu = smooth_density(grid);
    const auto f = catalog::running_integral(mu);
    const auto ladder = default_eps_ladder(grid, 1, 8);
    for (std::uint64_t i = 0; i < 10; ++i) {
        const auto x = sample_one(brownian(), grid, SeedPlan{40 + i}, 0).x;
        const auto a = bound_check_prop211(
            f, x, [](const DiscretePath&, double y) { return y; }, mu.cumulative(), ladder);
        EXPECT_GT(a.pairs, 0u);
        EXPECT_EQ(a.violations, 0u);
        EXPECT_TRUE(a.pass);
        const auto b = bound_check_frechet(f, x, mu, ladder);
        EXPECT_EQ(b.violations, 0u);
        for (std::size_t j = 0; j < ladder.size(); ++j) {
            EXPECT_LE(b.e_eps[j], b.implied[j] + 1e-15);
        }
    }
}

TEST(BoundCheck, MarkovianHasNoViolations) {
    const TimeGrid grid(1.0, 128);
    const auto x = sample_one(brownian(), grid, SeedPlan{8}, 0).x;
    const auto r = bound_check_prop213(
        catalog::power(3), x, [](const DiscretePath&, double, double) { return 0.0; },
        default_eps_ladder(grid, 1, 7));
    EXPECT_EQ(r.violations, 0u);
}

TEST(BoundCheck, HalfMassIsCaught) {
    const TimeGrid grid(1.0, 256);
    const auto mu = smooth_density(grid);
    const auto x = sample_one(brownian(), grid, SeedPlan{9}, 0).x;
    const auto r = bound_check_frechet(catalog::running_integral(mu), x, mu.scaled(0.5),
                                       default_eps_ladder(grid, 1, 8));
    EXPECT_GT(r.violations, 0u);
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.max_violation, 0.0);
}

TEST(BoundCheck, SupIncrementBoundForRunningMax) {
    const TimeGrid grid(1.0, 256);
    const auto x = sample_one(brownian(), grid, SeedPlan{10}, 0).x;
    // The running max moves by at most the largest excursion inside the window.
    const auto r = bound_check_prop213(
        catalog::running_max(), x, [](const DiscretePath&, double y, double) { return y; },
        default_eps_ladder(grid, 1, 8));
    EXPECT_EQ(r.violations, 0u);
}

TEST(DoobMeyer, ConstantFunctionalHasZeroDrift) {
    const TimeGrid grid(1.0, 64);
    PathFunctional c;
    c.name = "const";
    c.eval = [](std::size_t, const DiscretePath&) { return 3.0; };
    const auto x = sample_one(brownian(), grid, SeedPlan{11}, 0).x;
    const auto r = doob_meyer_extract(c, x, 1.0);
    for (double a : r.a_path) {
        EXPECT_EQ(a, 0.0);
    }
    EXPECT_TRUE(r.non_increasing);
}

namespace {

UvmProblem asian(double lo, double hi, std::size_t n) {
    const TimeGrid grid(1.0, n);
    return UvmProblem{.sigma_lo = lo,
                      .sigma_hi = hi,
                      .x0 = 100.0,
                      .mu = WeightMeasure::uniform(grid, 1.0),
                      .payoff = Payoff{.kind = PayoffKind::CallOnAvg, .strike = 100.0, .smoothing = 0.05},
                      .x_axis = {},
                      .a_axis = {}};
}

ModelSpec policy_model(const UvmProblem& p, VolPolicy policy) {
    ModelSpec m;
    m.kind = ModelKind::UvmPolicy;
    m.x0 = p.x0;
    m.sigma_lo = p.sigma_lo;
    m.sigma_hi = p.sigma_hi;
    m.policy = std::move(policy);
    m.accrual = p.mu;
    return m;
}

}  // namespace

TEST(DoobMeyer, SuperhedgingValueIsSupermartingale) {
    const auto p = asian(0.1, 0.2, 128);
    const auto field = bsb_solve(p);
    const auto v = value_functional(field);
    for (auto policy : {constant_policy(0.1), constant_policy(0.2),
                        regime_switching_policy(0.1, 0.2, 0.2)}) {
        const auto x = sample_one(policy_model(p, policy), p.grid(), SeedPlan{12}, 0).x;
        const auto r = doob_meyer_extract(v, x, 0.2);
        EXPECT_TRUE(r.non_increasing) << "q99 " << r.up_q99 << " threshold " << r.threshold;
    }
}

TEST(DoobMeyer, MatchedVolatilityGivesMartingale) {
    const auto p = asian(0.15, 0.15, 256);
    const auto field = bsb_solve(p);
    const auto v = value_functional(field);
    const auto x = sample_one(policy_model(p, constant_policy(0.15)), p.grid(), SeedPlan{13}, 0).x;
    const auto r = doob_meyer_extract(v, x, 0.2);
    double sup = 0.0;
    for (double a : r.a_path) {
        sup = std::max(sup, std::abs(a));
    }
    // Discrete hedging error of a price around 0.03.
    EXPECT_LT(sup, 5e-3);
}
