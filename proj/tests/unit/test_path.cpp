#include <dlab/error.hpp>
#include <dlab/path.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace dlab;

namespace {

DiscretePath make(std::vector<double> v, double horizon = 1.0) {
    const TimeGrid grid(horizon, v.size() - 1);
    return DiscretePath(grid, std::move(v));
}

DiscretePath random_path(std::mt19937_64& gen, const TimeGrid& grid) {
    std::normal_distribution<double> n;
    std::vector<double> v(grid.n_knots());
    for (auto& x : v) {
        x = n(gen);
    }
    return DiscretePath(grid, v);
}

}  // namespace

TEST(TimeGrid, KnotsAndSnapping) {
    const TimeGrid grid(2.0, 4);
    EXPECT_EQ(grid.n_knots(), 5u);
    EXPECT_DOUBLE_EQ(grid.dt(), 0.5);
    EXPECT_DOUBLE_EQ(grid.time(4), 2.0);
    EXPECT_EQ(grid.snap(0.74), 1u);
    EXPECT_EQ(grid.snap(0.76), 2u);
    // Ties round down.
    EXPECT_EQ(grid.snap(0.75), 1u);
    EXPECT_EQ(grid.snap(2.0), 4u);
}

TEST(TimeGrid, RejectsBadInput) {
    EXPECT_THROW(TimeGrid(0.0, 4), DomainError);
    EXPECT_THROW(TimeGrid(1.0, 0), DomainError);
    const TimeGrid grid(1.0, 4);
    EXPECT_THROW(grid.snap(-0.5), DomainError);
    EXPECT_THROW(grid.snap(1.5), DomainError);
}

TEST(DiscretePath, LengthMustMatchGrid) {
    EXPECT_THROW(DiscretePath(TimeGrid(1.0, 3), {1.0, 2.0}), GridMismatch);
}

TEST(Stop, ConstantPathIsUnchanged) {
    const auto c = DiscretePath::constant(TimeGrid(1.0, 8), 3.5);
    EXPECT_EQ(stop(c, 0.25), c);
}

TEST(Stop, AtHorizonIsIdentity) {
    const auto x = make({0.3, -1.0, 2.0, 5.0});
    EXPECT_EQ(stop(x, 1.0), x);
}

TEST(Stop, FreezesAfterFirstKnot) {
    const auto x = make({0, 1, 2, 3});
    const auto s = stop(x, 1.0 / 3.0);
    EXPECT_EQ(std::vector<double>(s.values().begin(), s.values().end()),
              (std::vector<double>{0, 1, 1, 1}));
}

TEST(Stop, IdempotentAndNested) {
    std::mt19937_64 gen(7);
    const TimeGrid grid(1.0, 32);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_path(gen, grid);
        for (std::size_t k = 0; k <= grid.n_steps(); k += 5) {
            const auto s = stop_at(x, k);
            EXPECT_EQ(stop_at(s, k), s);
            for (std::size_t j = 0; j <= k; j += 3) {
                EXPECT_EQ(stop_at(x, j), stop_at(s, j));
            }
        }
    }
}

TEST(StoppedView, MatchesStop) {
    const auto x = make({1, 4, 2, 8, 5});
    const StoppedView v(x, 2);
    EXPECT_EQ(v.materialize(), stop_at(x, 2));
    EXPECT_DOUBLE_EQ(v(4), 2.0);
}

TEST(VerticalBump, ZeroBumpLeavesPathUnchanged) {
    const auto x = make({0.5, 1.5, -2.0});
    EXPECT_EQ(vertical_bump(stop(x, 0.5), 0.5, 0.0), stop(x, 0.5));
}

TEST(VerticalBump, StoppedConstantGainsStepAtT) {
    const auto c = DiscretePath::constant(TimeGrid(1.0, 4), 2.0);
    const auto b = vertical_bump(c, 0.5, 3.0);
    EXPECT_EQ(std::vector<double>(b.values().begin(), b.values().end()),
              (std::vector<double>{2, 2, 5, 5, 5}));
}

TEST(VerticalBump, ReplacesTailByHeldValue) {
    const auto x = make({0, 1, 2});
    const auto b = vertical_bump_at(x, 1, 5.0);
    EXPECT_EQ(std::vector<double>(b.values().begin(), b.values().end()),
              (std::vector<double>{0, 6, 6}));
}

TEST(TailShift, AddsToEveryLaterValue) {
    const auto x = make({0, 1, 2});
    const auto b = tail_shift_at(x, 1, 5.0);
    EXPECT_EQ(std::vector<double>(b.values().begin(), b.values().end()),
              (std::vector<double>{0, 6, 7}));
    EXPECT_EQ(tail_shift(x, 0.5, 5.0), b);
}

TEST(VerticalBump, InverseBumpRestoresStoppedPath) {
    // Dyadic values keep every sum exact, so the identity holds bit for bit.
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> step(-64, 64);
    const TimeGrid grid(1.0, 16);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(grid.n_knots());
        for (auto& x : v) {
            x = step(gen) / 64.0;
        }
        const DiscretePath x(grid, v);
        const std::size_t k = static_cast<std::size_t>(trial) % grid.n_knots();
        const auto s = stop_at(x, k);
        const double y = step(gen) / 32.0;
        EXPECT_EQ(vertical_bump_at(vertical_bump_at(s, k, y), k, -y), s);
    }
}

TEST(VerticalBump, InverseBumpWithinRoundingOnGeneralValues) {
    std::mt19937_64 gen(12);
    const TimeGrid grid(1.0, 16);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_path(gen, grid);
        const std::size_t k = static_cast<std::size_t>(trial) % grid.n_knots();
        const auto s = stop_at(x, k);
        const double y = 0.1 * trial - 1.0;
        EXPECT_LE(sup_distance(vertical_bump_at(vertical_bump_at(s, k, y), k, -y), s), 1e-15 * (1.0 + sup_norm(s) + std::abs(y)));
    }
}

TEST(VerticalBump, Multidimensional) {
    const TimeGrid grid(1.0, 2);
    // Component-major: first component then second.
    const DiscretePath x(grid, {0, 1, 2, 10, 11, 12}, 2);
    const double y[] = {1.0, -1.0};
    const auto b = vertical_bump_at(x, 1, y);
    EXPECT_DOUBLE_EQ(b.at(0, 2), 2.0);
    EXPECT_DOUBLE_EQ(b.at(1, 2), 10.0);
    EXPECT_DOUBLE_EQ(b.at(1, 0), 10.0);
}

TEST(SupNorm, Examples) {
    EXPECT_EQ(sup_norm(DiscretePath::constant(TimeGrid(1.0, 5), 0.0)), 0.0);
    EXPECT_EQ(sup_norm(make({1, -3, 2})), 3.0);
    const auto x = make({0.2, 0.7, -0.4});
    EXPECT_EQ(sup_distance(x, x), 0.0);
}

TEST(SupNorm, EuclideanAcrossComponents) {
    const DiscretePath x(TimeGrid(1.0, 1), {3, 0, 4, 0}, 2);
    EXPECT_DOUBLE_EQ(sup_norm(x), 5.0);
}

TEST(SupDistance, TriangleInequality) {
    std::mt19937_64 gen(3);
    const TimeGrid grid(1.0, 20);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_path(gen, grid);
        const auto b = random_path(gen, grid);
        const auto c = random_path(gen, grid);
        EXPECT_LE(sup_distance(a, c), sup_distance(a, b) + sup_distance(b, c) + 1e-15);
    }
}

TEST(SupDistance, GridMismatchThrows) {
    EXPECT_THROW(sup_distance(make({0, 1}), make({0, 1, 2})), GridMismatch);
    EXPECT_THROW(sup_distance(make({0, 1}, 1.0), make({0, 1}, 2.0)), GridMismatch);
}

TEST(Csv, RoundTripIsExact) {
    std::mt19937_64 gen(5);
    const TimeGrid grid(0.75, 9);
    const auto x = random_path(gen, grid);
    std::stringstream ss;
    write_csv(ss, x);
    std::string header;
    std::getline(std::stringstream(ss.str()), header);
    EXPECT_EQ(header, "t,x_1");
    const auto back = read_csv(ss);
    EXPECT_EQ(back, x);
}

TEST(Csv, FormatsWithSeventeenDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
}
