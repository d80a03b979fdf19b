#include <dlab/error.hpp>
#include <dlab/functional.hpp>
#include <dlab/uvm.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace dlab;
namespace fs = std::filesystem;

namespace {

UvmProblem make(double lo, double hi, WeightMeasure mu, Payoff payoff, double x0 = 100.0,
                std::size_t nodes = 401) {
    UvmProblem p{.sigma_lo = lo,
                 .sigma_hi = hi,
                 .x0 = x0,
                 .mu = std::move(mu),
                 .payoff = payoff,
                 .x_axis = {},
                 .a_axis = {}};
    p.x_axis.nodes = nodes;
    return p;
}

Payoff call(double strike, double scale = 1.0) {
    return Payoff{.kind = PayoffKind::CallOnAvg, .strike = strike, .scale = scale};
}

Payoff linear() { return Payoff{.kind = PayoffKind::Linear, .strike = 0.0}; }

WeightMeasure terminal_atom(std::size_t n) { return WeightMeasure::dirac(TimeGrid(1.0, n), n, 1.0); }

WeightMeasure mixed(std::size_t n) {
    const TimeGrid grid(1.0, n);
    return WeightMeasure(grid, std::vector<double>(n, 0.5), {{n / 2, 0.25}, {n, 0.25}});
}

DiscretePath flat(const TimeGrid& grid, double x) { return DiscretePath::constant(grid, x); }

}  // namespace

TEST(BsbSolve, LinearTerminalDataIsAMartingale) {
    const auto field = bsb_solve(make(0.2, 0.2, terminal_atom(50), linear()));
    EXPECT_NEAR(field->value(0, 100.0, 0.0), 100.0, 1e-10 * 100.0);
}

TEST(BsbSolve, ConvexCallCollapsesToUpperVolatility) {
    const auto field = bsb_solve(make(0.1, 0.2, terminal_atom(400), call(100.0), 100.0, 400));
    const double oracle = dlab::testing::bachelier_call(100.0, 100.0, 0.2, 1.0);
    EXPECT_NEAR(field->value(0, 100.0, 0.0), oracle, 0.005 * oracle);
}

TEST(BsbSolve, ConcavePayoffCollapsesToLowerVolatility) {
    const auto field = bsb_solve(make(0.1, 0.2, terminal_atom(400), call(100.0, -1.0), 100.0, 400));
    const double oracle = -dlab::testing::bachelier_call(100.0, 100.0, 0.1, 1.0);
    EXPECT_NEAR(field->value(0, 100.0, 0.0), oracle, 0.005 * std::abs(oracle));
}

TEST(BsbSolve, PutMatchesOracle) {
    const Payoff put{.kind = PayoffKind::PutOnAvg, .strike = 100.2};
    const auto field = bsb_solve(make(0.1, 0.2, terminal_atom(200), put, 100.0, 400));
    const double oracle = dlab::testing::bachelier_put(100.0, 100.2, 0.2, 1.0);
    EXPECT_NEAR(field->value(0, 100.0, 0.0), oracle, 0.005 * oracle);
}

TEST(BsbSolve, AgreesWithLinearSolveOnDegenerateBand) {
    const auto p = make(0.15, 0.15, mixed(64), call(100.0));
    const auto a = bsb_solve(p);
    const auto b = linear_solve(p, 0.15);
    for (std::size_t k = 0; k < p.grid().n_knots(); k += 7) {
        for (double x : {99.5, 100.0, 100.3}) {
            EXPECT_NEAR(a->value(k, x, 0.0), b->value(k, x, 0.0), 1e-12);
        }
    }
}

TEST(BsbSolve, TensorSchemeCrossCheck) {
    auto p = make(0.1, 0.2, mixed(32), call(100.0));
    p.x_axis.nodes = 161;
    p.a_axis.nodes = 161;
    const auto collapsed = bsb_solve(p);
    const TensorField tensor = bsb_solve_tensor(p);
    const double v = collapsed->value(0, 100.0, 0.0);
    EXPECT_NEAR(tensor.value(100.0, 0.0), v, 0.01 * v);
}

TEST(BsbSolve, MonotoneInPayoffAndBand) {
    const auto mu = mixed(32);
    const double base = bsb_solve(make(0.1, 0.2, mu, call(100.0)))->value(0, 100.0, 0.0);
    const double lower_strike = bsb_solve(make(0.1, 0.2, mu, call(99.9)))->value(0, 100.0, 0.0);
    const double wider = bsb_solve(make(0.05, 0.3, mu, call(100.0)))->value(0, 100.0, 0.0);
    const double narrower = bsb_solve(make(0.12, 0.15, mu, call(100.0)))->value(0, 100.0, 0.0);
    EXPECT_GT(lower_strike, base);
    EXPECT_GT(wider, base);
    EXPECT_LT(narrower, base);
}

TEST(BsbSolve, MaximumPrinciple) {
    Payoff table;
    table.kind = PayoffKind::CustomTable;
    table.table = {{99.5, 1.0}, {100.0, 3.0}, {100.5, -2.0}};
    const auto field = bsb_solve(make(0.1, 0.3, mixed(32), table));
    for (std::size_t k = 0; k < field->grid().n_knots(); ++k) {
        for (double u : field->layer(k)) {
            EXPECT_GE(u, -2.0 - 1e-12);
            EXPECT_LE(u, 3.0 + 1e-12);
        }
    }
}

TEST(ValueAndDelta, LinearPayoffHedgeIsRemainingMass) {
    const auto mu = mixed(40);
    const auto field = bsb_solve(make(0.1, 0.2, mu, linear()));
    const auto path = flat(mu.grid(), 100.0);
    for (std::size_t k = 0; k < mu.grid().n_steps(); ++k) {
        const auto vd = value_and_delta(*field, k, path);
        EXPECT_NEAR(vd.delta, mu.mass_from(k), 0.01 * mu.mass_from(k)) << "k=" << k;
        EXPECT_NEAR(vd.hedge, mu.mass_from(k + 1), 0.01 * mu.mass_from(k)) << "k=" << k;
    }
}

TEST(ValueAndDelta, DegenerateCallMatchesOracleDelta) {
    const auto field = bsb_solve(make(0.2, 0.2, terminal_atom(200), call(100.0), 100.0, 400));
    const TimeGrid& grid = field->grid();
    for (std::size_t k : {0u, 50u, 100u}) {
        for (double x : {99.8, 100.0, 100.15}) {
            const double tau = grid.horizon() - grid.time(k);
            const double oracle = dlab::testing::bachelier_call_delta(x, 100.0, 0.2, tau);
            const auto vd = value_and_delta(*field, k, flat(grid, x));
            EXPECT_NEAR(vd.delta, oracle, 0.01 * oracle) << "k=" << k << " x=" << x;
        }
    }
}

TEST(ValueAndDelta, TerminalConditionIsExact) {
    const auto mu = mixed(16);
    const Payoff p = call(100.0);
    const auto field = bsb_solve(make(0.1, 0.2, mu, p));
    std::vector<double> v(mu.grid().n_knots());
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = 100.0 + 0.05 * std::sin(static_cast<double>(k));
    }
    const DiscretePath x(mu.grid(), v);
    const std::size_t n = mu.grid().n_steps();
    const auto vd = value_and_delta(*field, n, x);
    EXPECT_EQ(vd.value, p(mu.integral_before(x, n) + x[n] * mu.atom_mass(n)));
}

TEST(ValueFunctional, DupireDerivativeMatchesFiniteDifference) {
    const auto mu = mixed(32);
    const auto field = bsb_solve(make(0.1, 0.2, mu, call(100.0), 100.0, 4001));
    const auto f = value_functional(field);
    std::vector<double> v(mu.grid().n_knots());
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = 100.0 + 0.1 * std::cos(0.7 * static_cast<double>(k));
    }
    const DiscretePath x(mu.grid(), v);
    PathFunctional numeric = f;
    numeric.vertical = {};
    for (std::size_t k : {0u, 8u, 16u, 24u}) {
        const double analytic = vertical_derivative_at(f, k, x);
        EXPECT_NEAR(vertical_derivative_at(numeric, k, x, 0.01), analytic, 2e-3)
            << "k=" << k;
        EXPECT_NEAR(analytic, value_and_delta(*field, k, x).delta, 1e-12);
    }
}

TEST(DiscreteValue, FinestGridReproducesTheSolve) {
    const auto p = make(0.1, 0.2, mixed(32), call(100.0));
    EXPECT_EQ(discrete_value_vn(p, 32), bsb_solve(p)->value(0, 100.0, 0.0));
}

TEST(DiscreteValue, LinearPayoffIsIndependentOfN) {
    const auto p = make(0.1, 0.2, mixed(32), linear());
    for (std::size_t n : {4u, 8u, 16u, 32u}) {
        EXPECT_NEAR(discrete_value_vn(p, n), 100.0 * p.mu.total_mass(), 1e-9);
    }
}

TEST(DiscreteValue, CallGapsShrink) {
    const TimeGrid grid(1.0, 64);
    const auto p = make(0.1, 0.2, WeightMeasure::uniform(grid, 1.0), call(100.0));
    const double v = bsb_solve(p)->value(0, 100.0, 0.0);
    double previous = INFINITY;
    for (std::size_t n : {4u, 8u, 16u, 32u}) {
        const double gap = std::abs(discrete_value_vn(p, n) - v);
        EXPECT_LT(gap, previous) << "n=" << n;
        previous = gap;
    }
}

TEST(DiscreteValue, ProjectionKeepsMass) {
    const auto mu = mixed(32);
    const auto projected = project_measure(mu, 4);
    EXPECT_NEAR(projected.total_mass(), mu.total_mass(), 1e-14);
    EXPECT_NEAR(projected.atom_mass(32), mu.atom_mass(32), 1e-14);
    EXPECT_THROW(project_measure(mu, 5), ConfigError);
}

TEST(Audit, FrozenPathsPassTrivially) {
    const auto field = bsb_solve(make(0.0, 0.0, mixed(16), call(100.0)));
    AuditOptions opts;
    opts.n_probes = 200;
    const auto report = regularity_audit(*field, opts);
    EXPECT_TRUE(report.pass);
    for (const auto& c : report.checks) {
        EXPECT_EQ(c.violations, 0u) << c.name;
    }
}

TEST(Audit, LinearAndCallOnAveragePass) {
    for (const auto& payoff : {linear(), call(100.0)}) {
        const auto field = bsb_solve(make(0.1, 0.2, mixed(64), payoff));
        const auto report = regularity_audit(*field);
        EXPECT_TRUE(report.pass) << report.to_json().dump();
    }
}

TEST(ValueField, WritesLayersAndManifest) {
    const auto field = bsb_solve(make(0.1, 0.2, mixed(4), call(100.0), 100.0, 21));
    const fs::path dir = fs::temp_directory_path() / "dlab_field_test";
    fs::remove_all(dir);
    field->write(dir.string());
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    for (int k = 0; k <= 4; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "layer_%05d.csv", k);
        std::ifstream in(dir / name);
        ASSERT_TRUE(in) << name;
        std::string header;
        std::getline(in, header);
        EXPECT_EQ(header, "z,v");
    }
    fs::remove_all(dir);
}

TEST(UvmProblem, JsonRoundTripAndErrors) {
    const auto p = make(0.1, 0.2, mixed(8), call(100.0));
    const auto back = UvmProblem::from_json(p.to_json());
    EXPECT_EQ(back.sigma_hi, 0.2);
    EXPECT_EQ(back.mu.total_mass(), p.mu.total_mass());
    auto j = p.to_json();
    j["sigma"] = 0.3;
    try {
        UvmProblem::from_json(j);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/sigma: unknown key"), std::string::npos);
    }
    j = p.to_json();
    j["mu"]["atoms"][0]["weight"] = 1.0;
    try {
        UvmProblem::from_json(j);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/mu/atoms/0/weight"), std::string::npos) << e.what();
    }
    EXPECT_THROW(make(0.3, 0.2, mixed(8), call(100.0)).validate(), ConfigError);
}
