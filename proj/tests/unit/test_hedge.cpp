#include <dlab/error.hpp>
#include <dlab/hedge.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace dlab;

namespace {

UvmProblem make(double lo, double hi, std::size_t n, Payoff payoff) {
    const TimeGrid grid(1.0, n);
    UvmProblem p{.sigma_lo = lo,
                 .sigma_hi = hi,
                 .x0 = 100.0,
                 .mu = WeightMeasure(grid, std::vector<double>(n, 0.5), {{n, 0.5}}),
                 .payoff = payoff,
                 .x_axis = {},
                 .a_axis = {}};
    p.x_axis.nodes = 801;
    return p;
}

Payoff call() { return Payoff{.kind = PayoffKind::CallOnAvg, .strike = 100.0}; }

HedgeOptions opts(std::size_t n_paths, std::uint64_t seed = 7) {
    HedgeOptions o;
    o.n_paths = n_paths;
    o.plan = SeedPlan{seed};
    return o;
}

}  // namespace

TEST(Replication, LinearPayoffIsReplicatedExactly) {
    const auto field = bsb_solve(make(0.2, 0.2, 64, Payoff{.kind = PayoffKind::Linear}));
    const auto r = replication_backtest(*field, 0.2, opts(200));
    for (const auto& rec : r.paths) {
        EXPECT_LE(std::abs(rec.pnl), 1e-6 * 100.0);
    }
}

TEST(Replication, ZeroPayoffHasZeroPnl) {
    Payoff zero{.kind = PayoffKind::Linear, .scale = 0.0};
    const auto field = bsb_solve(make(0.2, 0.2, 16, zero));
    const auto r = replication_backtest(*field, 0.2, opts(50));
    for (const auto& rec : r.paths) {
        EXPECT_EQ(rec.pnl, 0.0);
    }
}

TEST(Replication, CallErrorHalvesWhenStepsQuadruple) {
    const double coarse = replication_backtest(*bsb_solve(make(0.2, 0.2, 64, call())), 0.2, opts(2000))
                              .summary.rmse;
    const double fine = replication_backtest(*bsb_solve(make(0.2, 0.2, 256, call())), 0.2, opts(2000))
                            .summary.rmse;
    EXPECT_NEAR(fine / coarse, 0.5, 0.15) << coarse << " " << fine;
}

TEST(Replication, RequiresMatchedBand) {
    const auto field = bsb_solve(make(0.1, 0.2, 16, call()));
    EXPECT_THROW(replication_backtest(*field, 0.2, opts(10)), ConfigError);
}

TEST(Ledger, PnlIsSelfFinancing) {
    const auto field = bsb_solve(make(0.2, 0.2, 32, call()));
    auto o = opts(100);
    o.keep_positions = true;
    const auto r = replication_backtest(*field, 0.2, o);
    for (const auto& rec : r.paths) {
        ASSERT_EQ(rec.positions.size(), 32u);
        EXPECT_EQ(recompute_pnl(r.capital, rec.positions, rec.increments, rec.payoff), rec.pnl);
    }
}

TEST(Ledger, CapitalShiftMovesPnl) {
    const auto field = bsb_solve(make(0.2, 0.2, 32, call()));
    auto shifted = opts(100);
    shifted.capital_deficit = 0.25;
    const auto a = replication_backtest(*field, 0.2, opts(100));
    const auto b = replication_backtest(*field, 0.2, shifted);
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        EXPECT_NEAR(b.paths[i].pnl, a.paths[i].pnl - 0.25, 1e-12);
    }
}

TEST(Ledger, PositionsArePredictable) {
    const auto field = bsb_solve(make(0.1, 0.2, 32, call()));
    auto o = opts(20);
    o.keep_positions = true;
    const auto adversaries = default_adversaries(field);
    const auto reports = superhedge_backtest(*field, adversaries, o);
    const Adversary& adv = adversaries[2];
    ASSERT_EQ(reports[2].adversary, adv.name);

    ModelSpec model;
    model.kind = ModelKind::UvmPolicy;
    model.x0 = 100.0;
    model.sigma_lo = 0.1;
    model.sigma_hi = 0.2;
    model.policy = adv.policy;
    model.accrual = field->problem().mu;
    const TimeGrid& grid = field->grid();
    for (std::size_t i = 0; i < 20; ++i) {
        const DiscretePath x = sample_one(model, grid, o.plan, i).x;
        for (std::size_t k = 0; k < 32; k += 5) {
            // Rewriting the future must not move the position taken at t_k.
            std::vector<double> v(x.values().begin(), x.values().end());
            for (std::size_t j = k + 1; j < v.size(); ++j) {
                v[j] += 3.0;
            }
            const double pos = reports[2].paths[i].positions[k];
            EXPECT_NEAR(value_and_delta(*field, k, DiscretePath(grid, v)).hedge, pos, 1e-12);
            EXPECT_NEAR(value_and_delta(*field, k, x).hedge, pos, 1e-12);
        }
    }
}

TEST(Superhedge, DegenerateBandIsReplication) {
    const auto field = bsb_solve(make(0.2, 0.2, 32, call()));
    const auto rep = replication_backtest(*field, 0.2, opts(100));
    const auto adversaries = default_adversaries(field);
    const auto reports = superhedge_backtest(*field, adversaries, opts(100));
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.paths.size(); ++i) {
            EXPECT_NEAR(r.paths[i].pnl, rep.paths[i].pnl, 1e-12) << r.adversary;
        }
    }
}

TEST(Superhedge, ConvexPayoffProfitsAgainstLowVolatility) {
    const auto field = bsb_solve(make(0.1, 0.2, 128, call()));
    const auto adversaries = default_adversaries(field);
    const auto reports = superhedge_backtest(*field, adversaries, opts(2000));
    const auto& lo = reports[0];
    ASSERT_EQ(lo.adversary, "sigma_lo");
    EXPECT_GT(lo.summary.mean, 3.0 * lo.summary.stderr_mean);
    const auto& worst = reports[3];
    ASSERT_EQ(worst.adversary, "worst_case");
    const double bound = 3.0 * worst.summary.stderr_mean + 0.2 * std::sqrt(worst.dt);
    EXPECT_LE(std::abs(worst.summary.mean), bound);
}

TEST(Superhedge, OutOfBandAdversaryIsNamed) {
    const auto field = bsb_solve(make(0.1, 0.2, 16, call()));
    const std::vector<Adversary> adversaries = {{"ok", constant_policy(0.15)},
                                                {"wild", constant_policy(0.5)}};
    try {
        superhedge_backtest(*field, adversaries, opts(5));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("adversary 1 (wild)"), std::string::npos) << e.what();
    }
}

TEST(PriceGap, ZeroGapIsTheSuperhedge) {
    const auto field = bsb_solve(make(0.1, 0.2, 32, call()));
    const auto adversaries = default_adversaries(field);
    const auto gap = price_gap_probe(*field, 0.0, adversaries[3], opts(200));
    const auto full = superhedge_backtest(*field, std::span(&adversaries[3], 1), opts(200));
    EXPECT_EQ(gap.hedge.summary.mean, full.front().summary.mean);
    EXPECT_EQ(gap.shortfall_fraction, full.front().summary.shortfall_fraction);
}

TEST(PriceGap, UnderfundingCausesShortfalls) {
    const auto field = bsb_solve(make(0.1, 0.2, 32, call()));
    const auto adversaries = default_adversaries(field);
    const double delta = 5.0 * std::sqrt(field->grid().dt()) * 0.2;
    const auto gap = price_gap_probe(*field, delta, adversaries[3], opts(500));
    EXPECT_GE(gap.shortfall_fraction, 0.1);
    EXPECT_THROW(price_gap_probe(*field, -0.1, adversaries[3], opts(5)), DomainError);
}

TEST(HedgeCsv, Headers) {
    const auto field = bsb_solve(make(0.2, 0.2, 8, call()));
    auto o = opts(3);
    const auto plain = replication_backtest(*field, 0.2, o);
    o.keep_positions = true;
    const auto kept = replication_backtest(*field, 0.2, o);
    std::ostringstream pnl, pos;
    write_pnl_csv(pnl, kept);
    write_positions_csv(pos, kept);
    EXPECT_EQ(pnl.str().substr(0, pnl.str().find('\n')), "path_id,pnl,shortfall");
    EXPECT_EQ(pos.str().substr(0, pos.str().find('\n')), "path_id,step,position,increment");
    const std::string text = pos.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 3 * 8);
    std::ostringstream none;
    EXPECT_THROW(write_positions_csv(none, plain), ConfigError);
}
