#include "dlab/simulate.hpp"

#include "dlab/error.hpp"
#include "dlab/parallel.hpp"
#include "dlab/uvm.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace dlab {

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Brownian: return "brownian";
        case ModelKind::UvmPolicy: return "uvm_policy";
        case ModelKind::Diffusion: return "diffusion";
        case ModelKind::WeakDirichletDemo: return "weak_dirichlet_demo";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "brownian") return ModelKind::Brownian;
    if (name == "uvm_policy") return ModelKind::UvmPolicy;
    if (name == "diffusion") return ModelKind::Diffusion;
    if (name == "weak_dirichlet_demo") return ModelKind::WeakDirichletDemo;
    throw ConfigError(fmt::format("unknown model kind '{}'", name));
}

std::vector<double> weierstrass_path(const TimeGrid& grid, const WeierstrassSpec& spec) {
    std::vector<double> a(grid.n_knots(), 0.0);
    // cos(pi b^n t_k / T) = cos(pi m / N) with m = b^n k mod 2N, so every term is sampled
    // exactly at the knots no matter how large b^n gets.
    const std::uint64_t n_steps = grid.n_steps();
    const std::uint64_t period = 2 * n_steps;
    const std::uint64_t b = static_cast<std::uint64_t>(spec.b) % period;
    std::uint64_t freq = 1 % period;
    for (double weight = 1.0; weight > 1e-17; weight *= spec.a) {
        for (std::uint64_t k = 0; k < a.size(); ++k) {
            const std::uint64_t m = (freq * k) % period;
            const double phase = std::numbers::pi * static_cast<double>(m) /
                                 static_cast<double>(n_steps);
            a[k] += spec.amplitude * weight * (std::cos(phase) - 1.0);
        }
        freq = (freq * b) % period;
    }
    return a;
}

void ModelSpec::validate() const {
    if (!std::isfinite(x0)) {
        throw ConfigError("x0 must be finite");
    }
    if (!std::isfinite(sigma) || sigma < 0.0) {
        throw ConfigError("sigma must be finite and non-negative");
    }
    if (!std::isfinite(sigma_lo) || !std::isfinite(sigma_hi) || sigma_lo < 0.0 ||
        sigma_hi < sigma_lo) {
        throw ConfigError(
            fmt::format("volatility band must satisfy 0 <= sigma_lo <= sigma_hi (got [{}, {}])",
                        sigma_lo, sigma_hi));
    }
    switch (kind) {
        case ModelKind::UvmPolicy:
            if (!policy) throw ConfigError("uvm_policy model needs a policy");
            break;
        case ModelKind::Diffusion:
            if (!drift || !vol) throw ConfigError("diffusion model needs drift and vol");
            break;
        case ModelKind::WeakDirichletDemo: {
            const WeierstrassSpec& w = weierstrass;
            if (!(w.a > 0.0 && w.a < 1.0)) {
                throw ConfigError("weierstrass a must lie in (0, 1)");
            }
            if (w.b < 3 || w.b % 2 == 0) {
                throw ConfigError("weierstrass b must be an odd integer >= 3");
            }
            if (!(w.a * static_cast<double>(w.b) > 1.0 + 1.5 * std::numbers::pi)) {
                throw ConfigError("weierstrass parameters must satisfy a b > 1 + 3 pi / 2");
            }
            if (!std::isfinite(w.amplitude)) {
                throw ConfigError("weierstrass amplitude must be finite");
            }
            break;
        }
        case ModelKind::Brownian: break;
    }
}

DiscretePath brownian_path(const TimeGrid& grid, const SeedPlan& plan, std::uint64_t index,
                           std::uint32_t stream) {
    const CounterRng rng = plan.rng();
    const double root_dt = std::sqrt(grid.dt());
    std::vector<double> w(grid.n_knots(), 0.0);
    std::array<double, 2> pair{};
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        if (k % 2 == 0) {
            pair = rng.normal_pair(index, static_cast<std::uint32_t>(k / 2), stream);
        }
        w[k + 1] = w[k] + root_dt * pair[k % 2];
    }
    return DiscretePath(grid, std::move(w));
}

SamplePath sample_one(const ModelSpec& model, const TimeGrid& grid, const SeedPlan& plan,
                      std::uint64_t index) {
    model.validate();
    if (model.accrual && !(model.accrual->grid() == grid)) {
        throw GridMismatch("accrual measure and simulation grid differ");
    }
    const std::size_t n = grid.n_steps();
    const CounterRng rng = plan.rng();
    DiscretePath w = brownian_path(grid, plan, index);

    std::vector<double> x(n + 1), m(n + 1, 0.0), orth(n + 1, 0.0), sigma(n);
    x[0] = model.x0;
    switch (model.kind) {
        case ModelKind::Brownian:
            for (std::size_t k = 0; k <= n; ++k) {
                m[k] = model.sigma * w[k];
                x[k] = model.x0 + m[k];
            }
            sigma.assign(n, model.sigma);
            break;
        case ModelKind::WeakDirichletDemo: {
            orth = weierstrass_path(grid, model.weierstrass);
            for (std::size_t k = 0; k <= n; ++k) {
                m[k] = model.sigma * w[k];
                x[k] = model.x0 + m[k] + orth[k];
            }
            sigma.assign(n, model.sigma);
            break;
        }
        case ModelKind::UvmPolicy:
        case ModelKind::Diffusion: {
            PolicyState state{.path = index, .step = 0, .t = 0.0, .x = model.x0, .a = 0.0,
                              .prev_sigma = model.sigma_lo, .rng = &rng};
            const double tol = 1e-12 * std::max(1.0, model.sigma_hi);
            for (std::size_t k = 0; k < n; ++k) {
                state.step = k;
                state.t = grid.time(k);
                state.x = x[k];
                const double dw = w[k + 1] - w[k];
                double s;
                double b = 0.0;
                if (model.kind == ModelKind::UvmPolicy) {
                    s = model.policy(state);
                    if (!(s >= model.sigma_lo - tol && s <= model.sigma_hi + tol)) {
                        throw DomainError(fmt::format(
                            "policy returned sigma = {} outside [{}, {}] at step {} of path {}", s,
                            model.sigma_lo, model.sigma_hi, k, index));
                    }
                } else {
                    s = model.vol(state);
                    b = model.drift(state);
                    if (!std::isfinite(s) || !std::isfinite(b)) {
                        throw DomainError(
                            fmt::format("non-finite drift or vol at step {} of path {}", k, index));
                    }
                }
                sigma[k] = s;
                m[k + 1] = m[k] + s * dw;
                orth[k + 1] = orth[k] + b * grid.dt();
                x[k + 1] = x[k] + b * grid.dt() + s * dw;
                if (model.accrual) {
                    state.a += x[k] * model.accrual->knot_mass(k);
                }
                state.prev_sigma = s;
            }
            break;
        }
    }
    return SamplePath{.index = index,
                      .x = DiscretePath(grid, std::move(x)),
                      .w = std::move(w),
                      .m = DiscretePath(grid, std::move(m)),
                      .orthogonal = DiscretePath(grid, std::move(orth)),
                      .sigma = std::move(sigma)};
}

std::vector<SamplePath> sample(const ModelSpec& model, const TimeGrid& grid, const SeedPlan& plan,
                               std::size_t n_paths, std::uint64_t first_index) {
    if (n_paths == 0) {
        throw ConfigError("n_paths must be at least 1");
    }
    model.validate();
    std::vector<std::optional<SamplePath>> slots(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        slots[i] = sample_one(model, grid, plan, first_index + i);
    });
    std::vector<SamplePath> out;
    out.reserve(n_paths);
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

VolPolicy worst_case_policy(std::shared_ptr<const ValueField> field,
                            std::shared_ptr<ExtrapolationCounter> counter) {
    if (!field) {
        throw ConfigError("worst-case policy needs a solved field");
    }
    return [field = std::move(field), counter = std::move(counter)](const PolicyState& s) {
        const UvmProblem& p = field->problem();
        const double z = field->z_of(s.step, s.x, s.a);
        if (counter) {
            counter->reads.fetch_add(1, std::memory_order_relaxed);
            if (!field->covers(s.step, s.x, s.a)) {
                counter->hits.fetch_add(1, std::memory_order_relaxed);
            }
        }
        const double h = field->dz();
        const double up = field->u(s.step, z + h);
        const double mid = field->u(s.step, z);
        const double down = field->u(s.step, z - h);
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                             (std::abs(up) + 2.0 * std::abs(mid) + std::abs(down));
        const double curvature = up - 2.0 * mid + down;
        if (curvature > noise) {
            return p.sigma_hi;
        }
        if (curvature < -noise) {
            return p.sigma_lo;
        }
        // Flat within rounding: sigma does not move the value, follow the payoff's shape.
        return p.payoff.concave() && !p.payoff.convex() ? p.sigma_lo : p.sigma_hi;
    };
}

VolPolicy regime_switching_policy(double sigma_lo, double sigma_hi, double switch_prob) {
    if (!(switch_prob >= 0.0 && switch_prob <= 1.0)) {
        throw ConfigError("switch probability must lie in [0, 1]");
    }
    return [=](const PolicyState& s) {
        const double u = s.rng->uniform(s.path, static_cast<std::uint32_t>(s.step), streams::regime);
        if (s.step == 0) {
            return u < 0.5 ? sigma_lo : sigma_hi;
        }
        if (u < switch_prob) {
            return s.prev_sigma == sigma_lo ? sigma_hi : sigma_lo;
        }
        return s.prev_sigma;
    };
}

VolPolicy constant_policy(double sigma) {
    return [sigma](const PolicyState&) { return sigma; };
}

}  // namespace dlab
