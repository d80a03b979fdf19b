#include "dlab/uvm.hpp"

#include "dlab/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace dlab {

nlohmann::json AxisSpec::to_json() const {
    nlohmann::json j{{"nodes", nodes}, {"scale", scale}};
    if (lo) j["lo"] = *lo;
    if (hi) j["hi"] = *hi;
    return j;
}

AxisSpec AxisSpec::from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(fmt::format("{}: expected an object", where));
    }
    AxisSpec axis;
    for (const auto& [key, value] : j.items()) {
        if (key == "nodes") {
            axis.nodes = value.get<std::size_t>();
        } else if (key == "scale") {
            axis.scale = value.get<double>();
        } else if (key == "lo") {
            axis.lo = value.get<double>();
        } else if (key == "hi") {
            axis.hi = value.get<double>();
        } else {
            throw ConfigError(fmt::format("{}/{}: unknown key", where, key));
        }
    }
    return axis;
}

void UvmProblem::validate() const {
    if (!std::isfinite(sigma_lo) || !std::isfinite(sigma_hi) || sigma_lo < 0.0 ||
        sigma_hi < sigma_lo) {
        throw ConfigError(
            fmt::format("volatility band must satisfy 0 <= sigma_lo <= sigma_hi (got [{}, {}])",
                        sigma_lo, sigma_hi));
    }
    if (!std::isfinite(x0)) {
        throw ConfigError("x0 must be finite");
    }
    payoff.validate();
    if (x_axis.nodes < 5 || a_axis.nodes < 5) {
        throw ConfigError("space grids need at least 5 nodes");
    }
    if (!(x_axis.scale > 0.0) || !(a_axis.scale > 0.0)) {
        throw ConfigError("grid scale must be positive");
    }
    if (x_axis.lo.has_value() != x_axis.hi.has_value()) {
        throw ConfigError("x_grid needs both lo and hi, or neither");
    }
    if (x_axis.lo) {
        const double cone = 3.0 * sigma_hi * std::sqrt(grid().horizon());
        if (!(*x_axis.lo <= x0 - cone && *x_axis.hi >= x0 + cone)) {
            throw ConfigError(fmt::format(
                "x_grid [{}, {}] does not contain the diffusion cone x0 +- 3 sigma_hi sqrt(T) = "
                "[{}, {}]",
                *x_axis.lo, *x_axis.hi, x0 - cone, x0 + cone));
        }
    }
}

nlohmann::json UvmProblem::to_json() const {
    return {{"horizon", grid().horizon()}, {"n_steps", grid().n_steps()},
            {"sigma_lo", sigma_lo},        {"sigma_hi", sigma_hi},
            {"x0", x0},                    {"mu", mu.to_json()},
            {"payoff", payoff.to_json()},  {"x_grid", x_axis.to_json()},
            {"a_grid", a_axis.to_json()}};
}

namespace {

std::string under(const std::string& pointer, const std::string& message) {
    return message.starts_with('/') ? pointer + message : pointer + ": " + message;
}

}  // namespace

namespace {

template <class T>
T scalar(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(fmt::format("/{}: wrong type ({})", key, j.at(key).type_name()));
    }
}

}  // namespace

UvmProblem UvmProblem::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("problem: expected an object");
    }
    static const std::vector<std::string> known{"horizon", "n_steps", "sigma_lo", "sigma_hi", "x0",
                                                "mu",      "payoff",  "x_grid",   "a_grid"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError(fmt::format("/{}: unknown key", key));
        }
    }
    for (const char* required : {"n_steps", "mu", "payoff"}) {
        if (!j.contains(required)) {
            throw ConfigError(fmt::format("/{}: required key missing", required));
        }
    }
    const TimeGrid grid(scalar(j, "horizon", 1.0), scalar<std::size_t>(j, "n_steps", 0));
    UvmProblem p{.sigma_lo = scalar(j, "sigma_lo", 0.1),
                 .sigma_hi = scalar(j, "sigma_hi", 0.2),
                 .x0 = scalar(j, "x0", 100.0),
                 .mu = [&] {
                     try {
                         return measure_from_config(grid, j.at("mu"));
                     } catch (const ConfigError& e) {
                         throw ConfigError(under("/mu", e.what()));
                     }
                 }(),
                 .payoff = Payoff::from_json(j.at("payoff")),
                 .x_axis = {},
                 .a_axis = {}};
    if (j.contains("x_grid")) p.x_axis = AxisSpec::from_json(j.at("x_grid"), "/x_grid");
    if (j.contains("a_grid")) p.a_axis = AxisSpec::from_json(j.at("a_grid"), "/a_grid");
    p.validate();
    return p;
}

ValueField::ValueField(UvmProblem problem, std::vector<double> z_nodes,
                       std::vector<std::vector<double>> layers, std::size_t substeps)
    : problem_(std::move(problem)),
      z_(std::move(z_nodes)),
      dz_(z_[1] - z_[0]),
      layers_(std::move(layers)),
      substeps_(substeps) {}

double ValueField::z_of(std::size_t k, double x, double a) const {
    return a + x * problem_.mu.mass_from(k);
}

bool ValueField::covers(std::size_t k, double x, double a) const {
    const double z = z_of(k, x, a);
    return z >= z_.front() && z <= z_.back();
}

double ValueField::u(std::size_t k, double z) const {
    if (k >= grid().n_steps()) {
        return problem_.payoff(z);
    }
    const auto& layer = layers_[k];
    const std::size_t last = z_.size() - 1;
    // Position in cell units; outside the grid the end cells are extended linearly.
    const double pos = (z - z_.front()) / dz_;
    std::size_t j;
    if (pos <= 0.0) {
        j = 0;
    } else if (pos >= static_cast<double>(last)) {
        j = last - 1;
    } else {
        j = std::min(static_cast<std::size_t>(pos), last - 1);
    }
    const double w = pos - static_cast<double>(j);
    return layer[j] + w * (layer[j + 1] - layer[j]);
}

double ValueField::u_z(std::size_t k, double z) const {
    return (u(k, z + dz_) - u(k, z - dz_)) / (2.0 * dz_);
}

double ValueField::u_zz(std::size_t k, double z) const {
    return (u(k, z + dz_) - 2.0 * u(k, z) + u(k, z - dz_)) / (dz_ * dz_);
}

double ValueField::value(std::size_t k, double x, double a) const { return u(k, z_of(k, x, a)); }

double ValueField::dx(std::size_t k, double x, double a) const {
    return problem_.mu.mass_from(k) * u_z(k, z_of(k, x, a));
}

double ValueField::dxx(std::size_t k, double x, double a) const {
    const double m = problem_.mu.mass_from(k);
    return m * m * u_zz(k, z_of(k, x, a));
}

void ValueField::write(const std::string& directory) const {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const std::size_t n = grid().n_steps();
    nlohmann::json manifest{{"problem", problem_.to_json()},
                            {"layers", n + 1},
                            {"z_lo", z_.front()},
                            {"z_hi", z_.back()},
                            {"z_nodes", z_.size()},
                            {"substeps", substeps_},
                            {"state", "v(t_k, x, a) = u_k(a + x * mass_from[k])"},
                            {"mass_from", nlohmann::json::array()},
                            {"files", nlohmann::json::array()}};
    for (std::size_t k = 0; k <= n; ++k) {
        const std::string name = fmt::format("layer_{:05d}.csv", k);
        std::ofstream out(fs::path(directory) / name);
        if (!out) {
            throw ConfigError(fmt::format("cannot write {}", (fs::path(directory) / name).string()));
        }
        out << "z,v\n";
        for (std::size_t j = 0; j < z_.size(); ++j) {
            out << format_double(z_[j]) << ',' << format_double(k == n ? problem_.payoff(z_[j])
                                                                       : layers_[k][j])
                << '\n';
        }
        manifest["mass_from"].push_back(problem_.mu.mass_from(k));
        manifest["files"].push_back(name);
    }
    std::ofstream(fs::path(directory) / "manifest.json") << manifest.dump(2) << '\n';
}

namespace {

std::vector<double> z_grid(const UvmProblem& p) {
    const double total = p.mu.total_mass();
    double lo, hi;
    if (p.x_axis.lo) {
        lo = *p.x_axis.lo * total;
        hi = *p.x_axis.hi * total;
    } else {
        const double spread = 5.0 * p.sigma_hi * std::sqrt(p.grid().horizon()) * p.x_axis.scale;
        const double half = std::max(spread, 1e-6 * std::max(1.0, std::abs(p.x0))) * total;
        lo = p.x0 * total - half;
        hi = p.x0 * total + half;
    }
    const std::size_t nodes = p.x_axis.nodes;
    std::vector<double> z(nodes);
    const double step = (hi - lo) / static_cast<double>(nodes - 1);
    for (std::size_t j = 0; j < nodes; ++j) {
        z[j] = lo + step * static_cast<double>(j);
    }
    return z;
}

// Explicit substeps so that 0.5 sigma_hi^2 m^2 dt_sub / dz^2 <= 1/4.
std::size_t substeps_for(double sigma_hi, double m, double dt, double dz) {
    const double ratio = 2.0 * sigma_hi * sigma_hi * m * m * dt / (dz * dz);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio - 1e-12)));
}

template <class Step>
std::shared_ptr<const ValueField> sweep(const UvmProblem& problem, double sigma_top, Step step) {
    problem.validate();
    const TimeGrid& grid = problem.grid();
    const std::size_t n = grid.n_steps();
    std::vector<double> z = z_grid(problem);
    const double dz = z[1] - z[0];
    std::vector<std::vector<double>> layers(n + 1);
    layers[n].resize(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        layers[n][j] = problem.payoff(z[j]);
    }
    std::size_t total = 0;
    std::vector<double> next(z.size());
    for (std::size_t k = n; k-- > 0;) {
        std::vector<double> u = layers[k + 1];
        const double m = problem.mu.mass_from(k + 1);
        if (m > 0.0 && sigma_top > 0.0) {
            const std::size_t s = substeps_for(sigma_top, m, grid.dt(), dz);
            // Half the variance of the z increment per substep, in units of dz^2.
            const double unit = 0.5 * m * m * grid.dt() / (static_cast<double>(s) * dz * dz);
            for (std::size_t r = 0; r < s; ++r) {
                next.front() = u.front();
                next.back() = u.back();
                for (std::size_t j = 1; j + 1 < u.size(); ++j) {
                    const double gamma = u[j + 1] - 2.0 * u[j] + u[j - 1];
                    next[j] = u[j] + step(gamma) * unit * gamma;
                }
                u.swap(next);
            }
            total += s;
        }
        layers[k] = std::move(u);
    }
    return std::make_shared<const ValueField>(problem, std::move(z), std::move(layers), total);
}

}  // namespace

std::shared_ptr<const ValueField> bsb_solve(const UvmProblem& problem) {
    const double hi2 = problem.sigma_hi * problem.sigma_hi;
    const double lo2 = problem.sigma_lo * problem.sigma_lo;
    // Barenblatt nonlinearity: the maximising variance given the sign of the curvature.
    return sweep(problem, problem.sigma_hi,
                 [hi2, lo2](double gamma) { return gamma >= 0.0 ? hi2 : lo2; });
}

std::shared_ptr<const ValueField> linear_solve(const UvmProblem& problem, double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("linear solve needs a finite sigma >= 0");
    }
    UvmProblem fixed = problem;
    fixed.sigma_lo = sigma;
    fixed.sigma_hi = sigma;
    const double s2 = sigma * sigma;
    return sweep(fixed, sigma, [s2](double) { return s2; });
}

ValueAndDelta value_and_delta(const ValueField& field, std::size_t k, const DiscretePath& path) {
    if (!(path.grid() == field.grid())) {
        throw GridMismatch("path and value field use different time grids");
    }
    if (k > field.grid().n_steps()) {
        throw DomainError("knot index beyond the horizon");
    }
    const WeightMeasure& mu = field.problem().mu;
    ValueAndDelta out;
    out.accrued = mu.integral_before(path, k);
    const double x = path[k];
    const double z = field.z_of(k, x, out.accrued);
    out.value = field.u(k, z);
    out.extrapolated = !field.covers(k, x, out.accrued);
    if (k < field.grid().n_steps()) {
        const double slope = field.u_z(k, z);
        out.delta = mu.mass_from(k) * slope;
        out.hedge = mu.mass_from(k + 1) * slope;
    } else {
        out.delta = mu.mass_from(k) * field.problem().payoff.slope(z);
    }
    return out;
}

ValueAndDelta value_and_delta(const ValueField& field, double t, const DiscretePath& path) {
    return value_and_delta(field, field.grid().snap(t), path);
}

PathFunctional value_functional(std::shared_ptr<const ValueField> field) {
    if (!field) {
        throw ConfigError("value functional needs a solved field");
    }
    PathFunctional f;
    f.name = "uvm_value";
    f.eval = [field](std::size_t k, const DiscretePath& x) {
        return value_and_delta(*field, k, x).value;
    };
    f.vertical = [field](std::size_t k, const DiscretePath& x, std::size_t) {
        return value_and_delta(*field, k, x).delta;
    };
    return f;
}

WeightMeasure project_measure(const WeightMeasure& mu, std::size_t n) {
    const TimeGrid& grid = mu.grid();
    const std::size_t fine = grid.n_steps();
    if (n < 2 || n > fine || fine % n != 0) {
        throw ConfigError(fmt::format("projection size n = {} must be >= 2 and divide n_steps = {}",
                                      n, fine));
    }
    const std::size_t r = fine / n;
    for (const Atom& a : mu.atoms()) {
        if (a.index != fine && a.index % r != 0) {
            throw ConfigError(fmt::format(
                "atom at knot {} (t = {}) is not on the n = {} projection grid", a.index,
                grid.time(a.index), n));
        }
    }
    std::vector<Atom> atoms;
    for (std::size_t j = 0; j < n; ++j) {
        double mass = 0.0;
        for (std::size_t k = j * r; k < (j + 1) * r; ++k) {
            mass += mu.knot_mass(k);
        }
        if (mass > 0.0) {
            atoms.push_back({j * r, mass});
        }
    }
    if (mu.atom_mass(fine) > 0.0) {
        atoms.push_back({fine, mu.atom_mass(fine)});
    }
    return WeightMeasure(grid, {}, std::move(atoms));
}

double discrete_value_vn(const UvmProblem& problem, std::size_t n) {
    UvmProblem projected = problem;
    projected.mu = project_measure(problem.mu, n);
    return bsb_solve(projected)->value(0, problem.x0, 0.0);
}

nlohmann::json AuditReport::to_json() const {
    nlohmann::json j{{"slack", slack}, {"sup_delta", sup_delta}, {"pass", pass},
                     {"checks", nlohmann::json::array()}};
    for (const BoundCheck& c : checks) {
        nlohmann::json cj{{"name", c.name},
                          {"probes", c.probes},
                          {"violations", c.violations},
                          {"max_normalized_violation", c.max_normalized_violation},
                          {"fitted_constant", c.fitted_constant},
                          {"pass", c.pass}};
        cj["exponent"] = c.exponent ? nlohmann::json(*c.exponent) : nlohmann::json(nullptr);
        j["checks"].push_back(cj);
    }
    return j;
}

}  // namespace dlab
