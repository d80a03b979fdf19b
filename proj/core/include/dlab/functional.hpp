#pragma once

#include "dlab/measure.hpp"
#include "dlab/path.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dlab {

struct FunctionalTraits {
    bool markovian = false;
    bool frechet = false;
};

/// Non-anticipative map (t_k, x) -> F(t_k, x). Functionals are evaluated at grid knots only;
/// Dupire derivatives at off-grid times are not defined here.
///
/// The optional analytic derivatives take precedence over finite differences. They receive
/// the path unstopped and must only read knots up to k. The `component` argument selects
/// the coordinate of the vertical derivative for d > 1.
struct PathFunctional {
    using Eval = std::function<double(std::size_t k, const DiscretePath& x)>;
    using Vertical = std::function<double(std::size_t k, const DiscretePath& x, std::size_t component)>;

    std::string name;
    Eval eval;
    Vertical vertical;
    Vertical vertical2;
    Eval horizontal;
    FunctionalTraits traits;

    double operator()(std::size_t k, const DiscretePath& x) const { return eval(k, x); }
    double at_time(double t, const DiscretePath& x) const { return eval(x.grid().snap(t), x); }
};

/// Default first-derivative bump sqrt(eps) * max(1, |x_t|).
double default_first_bump(double level);
/// Default second-derivative bump cbrt(eps) * max(1, |x_t|).
double default_second_bump(double level);

/// Dupire vertical derivative at knot k: analytic when provided, else the central
/// difference (F(t, x (+)_t h) - F(t, x (+)_t -h)) / 2h on the stopped path.
double vertical_derivative_at(const PathFunctional& f, std::size_t k, const DiscretePath& x,
                              std::optional<double> h = std::nullopt, std::size_t component = 0);
double vertical_derivative(const PathFunctional& f, double t, const DiscretePath& x,
                           std::optional<double> h = std::nullopt, std::size_t component = 0);
std::vector<double> vertical_gradient_at(const PathFunctional& f, std::size_t k,
                                         const DiscretePath& x,
                                         std::optional<double> h = std::nullopt);

/// One-sided (F(t+h, x_{t^}) - F(t, x_{t^})) / h with h snapped to whole steps (h >= dt).
double horizontal_derivative_at(const PathFunctional& f, std::size_t k, const DiscretePath& x,
                                std::optional<double> h = std::nullopt);
double horizontal_derivative(const PathFunctional& f, double t, const DiscretePath& x,
                             std::optional<double> h = std::nullopt);

/// Central second difference (F(x (+) h) - 2F(x) + F(x (+) -h)) / h^2.
double second_vertical_derivative_at(const PathFunctional& f, std::size_t k,
                                     const DiscretePath& x,
                                     std::optional<double> h = std::nullopt,
                                     std::size_t component = 0);
double second_vertical_derivative(const PathFunctional& f, double t, const DiscretePath& x,
                                  std::optional<double> h = std::nullopt,
                                  std::size_t component = 0);

/// Empirical local modulus of continuity. Each sample draws (t, h, y, x) with
/// ||x|| <= K, |y| <= K and records
///   |F(t,x) - F(t+h, x_{t^})| + |F(t,x) - F(t, x (+)_t y)|
/// against r = h + |y|.
struct ModulusBin {
    double r_lo = 0.0;
    double r_hi = 0.0;
    double max_increment = 0.0;
    std::size_t count = 0;
};

struct ModulusTable {
    double bound_k = 0.0;
    std::vector<ModulusBin> bins;
    /// Bin maxima decay toward 0 as r shrinks (within noise).
    bool consistent = false;
};

ModulusTable modulus_probe(const PathFunctional& f, const TimeGrid& grid, double bound_k,
                           std::size_t n_samples, std::uint64_t seed, std::size_t n_bins = 10);

namespace catalog {

using MarkovFn = std::function<double(double t, std::span<const double> x)>;

/// F(t, x) = f(t, x_t), optionally with analytic d/dx and d^2/dx^2 (component 0).
PathFunctional markovian(std::string name, MarkovFn f, MarkovFn df = {}, MarkovFn d2f = {});

/// F(t, x) = integral over [0, t] of x d mu.
PathFunctional running_integral(const WeightMeasure& mu);

/// F(t, x) = g(integral over [0, T] of x_{t^} d mu); at t = T this is the payoff g(int x d mu).
PathFunctional integral_payoff(std::function<double(double)> g, std::function<double(double)> dg,
                               const WeightMeasure& mu);

/// F(t, x) = max_{s <= t} x_s.
PathFunctional running_max();

/// (x_t)^p for integer p >= 1, with analytic derivatives.
PathFunctional power(int p);

}  // namespace catalog

}  // namespace dlab
