#pragma once

#include "dlab/path.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dlab {

/// Regularization width, stored as a whole number of grid steps so s + eps is a knot.
struct Epsilon {
    std::size_t steps = 1;

    double time(const TimeGrid& grid) const { return static_cast<double>(steps) * grid.dt(); }
    auto operator<=>(const Epsilon&) const = default;
};

/// Converts a width in time units; throws DomainError unless eps is a multiple of dt in [dt, T].
Epsilon epsilon_from_time(const TimeGrid& grid, double eps);

/// Dyadic ladder T / 2^k for k in [k_min, k_max], keeping widths >= dt, strictly decreasing.
std::vector<Epsilon> default_eps_ladder(const TimeGrid& grid, int k_min = 3, int k_max = 10);

/// Curves of a regularized quantity, one per epsilon, indexed by knot.
struct EpsSweep {
    TimeGrid grid;
    std::vector<Epsilon> epsilons;
    std::vector<std::vector<double>> curves;

    double terminal(std::size_t i) const { return curves[i].back(); }
};

/// (1/eps) sum_{s < t} H_s (X_{(s+eps)^t} - X_s) dt
double forward_integral_eps(const DiscretePath& h, const DiscretePath& x, Epsilon eps,
                            std::size_t k);
std::vector<double> forward_integral_curve(const DiscretePath& h, const DiscretePath& x,
                                           Epsilon eps);

/// (1/eps) sum_{s < t} (X_{(s+eps)^t} - X_s)(Y_{(s+eps)^t} - Y_s) dt
double coquadratic_eps(const DiscretePath& x, const DiscretePath& y, Epsilon eps, std::size_t k);
std::vector<double> coquadratic_curve(const DiscretePath& x, const DiscretePath& y, Epsilon eps);

EpsSweep coquadratic_sweep(const DiscretePath& x, const DiscretePath& y,
                           std::span<const Epsilon> ladder);
EpsSweep quadratic_variation_curve(const DiscretePath& x, std::span<const Epsilon> ladder);

/// Writes `t,eps,value` rows.
void write_sweep_csv(std::ostream& out, const EpsSweep& sweep);

enum class UcpVerdict { Convergent, Inconclusive };

const char* to_string(UcpVerdict v);

struct UcpOptions {
    /// Bound on the last Cauchy difference (and on the distance to `reference`, if given).
    double tolerance = 1e-2;
    /// A difference may exceed its predecessor by this relative margin and still count as
    /// decreasing. Single-sample curves carry sampling noise along the ladder.
    double monotone_slack = 0.0;
    /// Expected limit curve (e.g. zero, or t -> t for Brownian quadratic variation).
    std::optional<std::vector<double>> reference;
};

/// Finite-eps stand-in for u.c.p. convergence: a Cauchy check along the ladder.
/// Never reports divergence; the alternative verdict is INCONCLUSIVE.
struct UcpReport {
    std::vector<double> epsilons;
    /// sup_t |curve_i - curve_{i+1}|, averaged over samples when several sweeps are given.
    std::vector<double> sup_differences;
    bool monotone = false;
    /// Log-log slope of sup_differences against eps; absent when any difference is 0.
    std::optional<double> rate;
    /// sup_t |last curve - reference| (averaged over samples); 0 without a reference.
    double limit_error = 0.0;
    UcpVerdict verdict = UcpVerdict::Inconclusive;
};

UcpReport ucp_diagnostic(const EpsSweep& sweep, const UcpOptions& options = {});
UcpReport ucp_diagnostic(std::span<const EpsSweep> samples, const UcpOptions& options = {});

}  // namespace dlab
