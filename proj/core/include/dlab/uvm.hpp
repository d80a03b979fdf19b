#pragma once

#include "dlab/functional.hpp"
#include "dlab/measure.hpp"
#include "dlab/path.hpp"
#include "dlab/payoff.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dlab {

/// Space axis: `nodes` points on [lo, hi]. Without explicit bounds the x axis spans
/// x0 +- 5 sigma_hi sqrt(T) * scale.
struct AxisSpec {
    std::size_t nodes = 401;
    double scale = 1.0;
    std::optional<double> lo;
    std::optional<double> hi;

    nlohmann::json to_json() const;
    static AxisSpec from_json(const nlohmann::json& j, const std::string& where);
};

/// Uncertain volatility problem with payoff g(integral of X against mu) for dX = sigma dW,
/// sigma in [sigma_lo, sigma_hi].
struct UvmProblem {
    double sigma_lo = 0.1;
    double sigma_hi = 0.2;
    double x0 = 100.0;
    WeightMeasure mu;
    Payoff payoff;
    AxisSpec x_axis;
    AxisSpec a_axis;

    const TimeGrid& grid() const { return mu.grid(); }
    void validate() const;

    nlohmann::json to_json() const;
    /// Reads {"horizon", "n_steps", "sigma_lo", "sigma_hi", "x0", "mu", "payoff", "x_grid",
    /// "a_grid"}; unknown keys are a ConfigError naming the key.
    static UvmProblem from_json(const nlohmann::json& j);
};

/// Solved value v(t_k, x, a) of the superhedging problem, a = integral over [0, t_k) of x dmu.
///
/// Internally the value is stored on the collapsed variable z = a + x mu([t_k, T]), in which
/// the problem is one dimensional: z moves by mu([t_{k+1}, T]) dX over each step. All layers
/// share one uniform z grid.
class ValueField {
public:
    ValueField(UvmProblem problem, std::vector<double> z_nodes,
               std::vector<std::vector<double>> layers, std::size_t substeps);

    const UvmProblem& problem() const noexcept { return problem_; }
    const TimeGrid& grid() const noexcept { return problem_.grid(); }
    std::span<const double> z_nodes() const noexcept { return z_; }
    double dz() const noexcept { return dz_; }
    std::span<const double> layer(std::size_t k) const { return layers_.at(k); }
    /// Total explicit sub-steps taken by the backward sweep.
    std::size_t substeps() const noexcept { return substeps_; }

    double z_of(std::size_t k, double x, double a) const;
    bool covers(std::size_t k, double x, double a) const;

    /// Linear interpolation of layer k at z; the last layer is the exact terminal payoff.
    double u(std::size_t k, double z) const;
    /// d/dz and d2/dz2 of layer k by central differences of width dz around z.
    double u_z(std::size_t k, double z) const;
    double u_zz(std::size_t k, double z) const;

    double value(std::size_t k, double x, double a) const;
    /// Dupire vertical derivative d/dx v(t_k, x, a) = mu([t_k, T]) u_z.
    double dx(std::size_t k, double x, double a) const;
    double dxx(std::size_t k, double x, double a) const;

    /// Layer CSVs `z,v` (one per knot, named layer_<k>.csv) plus manifest.json.
    void write(const std::string& directory) const;

private:
    UvmProblem problem_;
    std::vector<double> z_;
    double dz_;
    std::vector<std::vector<double>> layers_;
    std::size_t substeps_;
};

/// Backward explicit monotone scheme for u_k(z) = sup_sigma E[u_{k+1}(z + m sigma dW)].
std::shared_ptr<const ValueField> bsb_solve(const UvmProblem& problem);

/// Same scheme with a fixed sigma, written as a separate linear loop.
std::shared_ptr<const ValueField> linear_solve(const UvmProblem& problem, double sigma);

/// Literal (x, a) tensor scheme: upwind advection in a for the density part, interpolation
/// shifts at atoms, diffusion in x. Slow; kept as an independent cross-check.
/// The second axis carries b = a - x0 mu([0, t)); at t = 0 it coincides with a, and an
/// explicit a_grid range is read in b.
struct TensorField {
    std::vector<double> x;
    std::vector<double> a;
    /// v at t = 0, row-major [ix * a.size() + ia].
    std::vector<double> v0;
    double value(double x, double a) const;
};

TensorField bsb_solve_tensor(const UvmProblem& problem);

struct ValueAndDelta {
    double value = 0.0;
    /// Dupire vertical derivative at t_k.
    double delta = 0.0;
    /// Position held over [t_k, t_{k+1}): delta with the mass mu([t_{k+1}, T]) still to accrue.
    double hedge = 0.0;
    double accrued = 0.0;
    bool extrapolated = false;
};

ValueAndDelta value_and_delta(const ValueField& field, std::size_t k, const DiscretePath& path);
ValueAndDelta value_and_delta(const ValueField& field, double t, const DiscretePath& path);

/// The field as a path functional: eval is v(t_k, x_k, a_k), vertical is the delta.
PathFunctional value_functional(std::shared_ptr<const ValueField> field);

/// Value of the problem with payoff g(integral of Pi^n[X] dmu), Pi^n the left-knot
/// projection on n equal cells. n must divide n_steps and every atom before T must sit on
/// a coarse knot.
double discrete_value_vn(const UvmProblem& problem, std::size_t n);
WeightMeasure project_measure(const WeightMeasure& mu, std::size_t n);

struct BoundCheck {
    std::string name;
    std::size_t probes = 0;
    std::size_t violations = 0;
    /// max over probes of (lhs - rhs) / slack, <= 1 means within the grid slack.
    double max_normalized_violation = 0.0;
    /// Fitted log-log exponent, for the Holder checks.
    std::optional<double> exponent;
    double fitted_constant = 0.0;
    bool pass = false;
};

struct AuditReport {
    std::vector<BoundCheck> checks;
    double slack = 0.0;
    double sup_delta = 0.0;
    bool pass = false;

    nlohmann::json to_json() const;
};

struct AuditOptions {
    std::size_t n_probes = 1000;
    std::uint64_t seed = 1;
    /// Required fraction of alpha for the fitted in-path and in-time exponents.
    double exponent_fraction = 0.8;
};

AuditReport regularity_audit(const ValueField& field, const AuditOptions& options = {});

}  // namespace dlab
