#pragma once

#include "dlab/measure.hpp"
#include "dlab/path.hpp"
#include "dlab/rng.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace dlab {

class ValueField;

/// Random streams used inside a path index. Keeping them fixed makes every draw addressable.
namespace streams {
inline constexpr std::uint32_t driver = 0;       // dW of the simulated process
inline constexpr std::uint32_t regime = 1;       // regime-switching coin flips
inline constexpr std::uint32_t independent = 2;  // an independent Brownian W'
inline constexpr std::uint32_t probe = 3;        // audit / probe sampling
}  // namespace streams

/// What a volatility or drift callback sees before the step from knot `step` to `step + 1`.
struct PolicyState {
    std::uint64_t path = 0;
    std::size_t step = 0;
    double t = 0.0;
    double x = 0.0;
    /// Accrued integral of the path over [0, t_k) against ModelSpec::accrual (0 without one).
    double a = 0.0;
    /// Volatility used on the previous step (sigma at step 0 is seeded with sigma_lo).
    double prev_sigma = 0.0;
    const CounterRng* rng = nullptr;
};

using VolPolicy = std::function<double(const PolicyState&)>;

enum class ModelKind { Brownian, UvmPolicy, Diffusion, WeakDirichletDemo };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Deterministic irregular path amp * sum_n a^n (cos(b^n pi t / T) - 1) sampled at the
/// knots. Terms are summed until a^n drops below 1e-17.
struct WeierstrassSpec {
    double a = 0.5;
    long b = 13;
    double amplitude = 1.0;
};

std::vector<double> weierstrass_path(const TimeGrid& grid, const WeierstrassSpec& spec);

struct ModelSpec {
    ModelKind kind = ModelKind::Brownian;
    double x0 = 0.0;
    /// Volatility of the Brownian and weak-Dirichlet models.
    double sigma = 1.0;
    double sigma_lo = 0.0;
    double sigma_hi = 1.0;
    /// uvm_policy: sigma chosen per step, must stay in [sigma_lo, sigma_hi].
    VolPolicy policy;
    /// diffusion: dX = drift dt + vol dW.
    VolPolicy drift;
    VolPolicy vol;
    WeierstrassSpec weierstrass;
    /// Measure defining PolicyState::a.
    std::optional<WeightMeasure> accrual;

    void validate() const;
};

/// Master seed; path index i reads the counter substream i, so a path never depends on
/// which batch or thread produced it.
struct SeedPlan {
    std::uint64_t master = 0;

    CounterRng rng() const { return CounterRng(master); }
};

/// One simulated path with its decomposition X = x0 + M + A.
struct SamplePath {
    std::uint64_t index = 0;
    DiscretePath x;
    /// Standard Brownian driver W.
    DiscretePath w;
    /// Martingale part M (M_0 = 0).
    DiscretePath m;
    /// Orthogonal part A (zero except for the weak-Dirichlet demo and diffusion drift).
    DiscretePath orthogonal;
    /// sigma used on [t_k, t_{k+1}), length n_steps.
    std::vector<double> sigma;
};

SamplePath sample_one(const ModelSpec& model, const TimeGrid& grid, const SeedPlan& plan,
                      std::uint64_t index);
/// Paths first_index, ..., first_index + n_paths - 1.
std::vector<SamplePath> sample(const ModelSpec& model, const TimeGrid& grid, const SeedPlan& plan,
                               std::size_t n_paths, std::uint64_t first_index = 0);

/// Standard Brownian path read from an arbitrary stream of path `index`.
DiscretePath brownian_path(const TimeGrid& grid, const SeedPlan& plan, std::uint64_t index,
                           std::uint32_t stream = streams::driver);

/// Counts policy reads that fell outside the solved region of a field.
struct ExtrapolationCounter {
    std::atomic<std::size_t> hits{0};
    std::atomic<std::size_t> reads{0};
};

/// sigma_hi where the field is locally convex in x, sigma_lo where it is concave. Where the
/// curvature is zero within rounding, sigma_lo for concave payoffs and sigma_hi otherwise. The state must carry
/// the accrued integral against the field's measure (set ModelSpec::accrual).
VolPolicy worst_case_policy(std::shared_ptr<const ValueField> field,
                            std::shared_ptr<ExtrapolationCounter> counter = nullptr);

/// Piecewise constant sigma that flips between the band edges with probability
/// `switch_prob` per step.
VolPolicy regime_switching_policy(double sigma_lo, double sigma_hi, double switch_prob);

VolPolicy constant_policy(double sigma);

}  // namespace dlab
