#include <dlab/error.hpp>
#include <dlab/measure.hpp>

#include <gtest/gtest.h>

using namespace dlab;

namespace {

const TimeGrid grid4(1.0, 4);

WeightMeasure mixed() {
    // Density 1, 2, 3, 4 on the four cells, atoms at knots 2 and 4.
    return WeightMeasure(grid4, {1, 2, 3, 4}, {{2, 0.5}, {4, 1.0}});
}

}  // namespace

TEST(WeightMeasure, KnotMassesAndTails) {
    const auto mu = mixed();
    EXPECT_DOUBLE_EQ(mu.knot_mass(0), 0.25);
    EXPECT_DOUBLE_EQ(mu.knot_mass(2), 0.75 + 0.5);
    EXPECT_DOUBLE_EQ(mu.knot_mass(4), 1.0);
    EXPECT_DOUBLE_EQ(mu.total_mass(), 2.5 + 1.5);
    EXPECT_DOUBLE_EQ(mu.mass_before(2), 0.25 + 0.5);
    EXPECT_DOUBLE_EQ(mu.mass_from(2), 4.0 - 0.75);
    EXPECT_DOUBLE_EQ(mu.mass_from(4), 1.0);
    EXPECT_DOUBLE_EQ(mu.mass_between(1, 3), 0.5 + 0.75 + 0.5);
    EXPECT_DOUBLE_EQ(mu.atom_mass(2), 0.5);
    EXPECT_TRUE(mu.has_density());
}

TEST(WeightMeasure, LeftEndpointIntegral) {
    const auto mu = mixed();
    const DiscretePath x(grid4, {1, 2, 3, 4, 5});
    // Cells: 1*1 + 2*2 + 3*3 + 4*4 over dt = 0.25; atoms 3*0.5 + 5*1.
    EXPECT_DOUBLE_EQ(mu.integral_before(x, 4), 0.25 * (1 + 4 + 9 + 16) + 1.5);
    EXPECT_DOUBLE_EQ(mu.integral_through(x, 4), 0.25 * 30 + 1.5 + 5.0);
    EXPECT_DOUBLE_EQ(mu.integral_through(x, 2), 0.25 * 5 + 1.5);
    // Stopped at knot 1: the value 2 is held from then on.
    EXPECT_DOUBLE_EQ(mu.integral_of_stopped(x, 1), 0.25 * (1 + 2 * 2 + 2 * 3 + 2 * 4) + 2 * 0.5 + 2 * 1.0);
}

TEST(WeightMeasure, CumulativeHasKnotMassIncrements) {
    const auto mu = mixed();
    const auto b = mu.cumulative();
    for (std::size_t k = 0; k + 1 < grid4.n_knots(); ++k) {
        EXPECT_NEAR(b[k + 1] - b[k], mu.knot_mass(k), 1e-15);
    }
    EXPECT_DOUBLE_EQ(b[0], 0.0);
}

TEST(WeightMeasure, UniformAndDirac) {
    const auto u = WeightMeasure::uniform(grid4, 2.0);
    EXPECT_DOUBLE_EQ(u.total_mass(), 2.0);
    EXPECT_DOUBLE_EQ(u.knot_mass(4), 0.0);
    const auto d = WeightMeasure::dirac(grid4, 4, 1.0);
    EXPECT_DOUBLE_EQ(d.mass_from(4), 1.0);
    EXPECT_FALSE(d.has_density());
    const DiscretePath x(grid4, {0, 0, 0, 0, 7});
    EXPECT_DOUBLE_EQ(d.integral_through(x, 4), 7.0);
}

TEST(WeightMeasure, Scaled) {
    const auto mu = mixed().scaled(2.0);
    EXPECT_DOUBLE_EQ(mu.total_mass(), 8.0);
    EXPECT_DOUBLE_EQ(mu.atom_mass(4), 2.0);
}

TEST(WeightMeasure, RejectsNegativeOrMisplacedMass) {
    EXPECT_THROW(WeightMeasure(grid4, {1, -1, 1, 1}), ConfigError);
    EXPECT_THROW(WeightMeasure(grid4, {1, 1, 1}), GridMismatch);
    EXPECT_THROW(WeightMeasure(grid4, {1, 1, 1, 1}, {{5, 1.0}}), ConfigError);
    EXPECT_THROW(WeightMeasure(grid4, {1, 1, 1, 1}, {{1, -0.5}}), ConfigError);
}

TEST(WeightMeasure, JsonRoundTrip) {
    const auto mu = mixed();
    const auto back = WeightMeasure::from_json(grid4, mu.to_json());
    for (std::size_t k = 0; k < grid4.n_knots(); ++k) {
        EXPECT_EQ(back.knot_mass(k), mu.knot_mass(k));
    }
}

TEST(MeasureConfig, UniformMassShorthand) {
    const auto mu = measure_from_config(grid4, {{"uniform_mass", 0.5}, {"atoms", {{{"index", 4}, {"mass", 0.25}}}}});
    EXPECT_DOUBLE_EQ(mu.total_mass(), 0.75);
    EXPECT_DOUBLE_EQ(mu.atom_mass(4), 0.25);
}

TEST(MeasureConfig, ErrorsCarryPointers) {
    try {
        measure_from_config(grid4, {{"density", {1, 1, 1, 1}}, {"weights", 1}});
        FAIL() << "unknown key accepted";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/weights: unknown key"), std::string::npos);
    }
    try {
        measure_from_config(grid4, {{"uniform_mass", 1.0}, {"atoms", {{{"index", 1}, {"mas", 1}}}}});
        FAIL() << "unknown atom key accepted";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/atoms/0/mas: unknown key"), std::string::npos);
    }
    EXPECT_THROW(measure_from_config(grid4, {{"uniform_mass", 1.0}, {"density", {1, 1, 1, 1}}}),
                 ConfigError);
}
