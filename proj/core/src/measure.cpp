#include "dlab/measure.hpp"

#include "dlab/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dlab {

WeightMeasure::WeightMeasure(TimeGrid grid, std::vector<double> density, std::vector<Atom> atoms)
    : grid_(grid), density_(std::move(density)), atoms_(std::move(atoms)) {
    const std::size_t n = grid_.n_steps();
    if (density_.empty()) {
        density_.assign(n, 0.0);
    }
    if (density_.size() != n) {
        throw GridMismatch(fmt::format("density has {} cells, grid has {}", density_.size(), n));
    }
    for (double w : density_) {
        if (!std::isfinite(w) || w < 0.0) {
            throw ConfigError("density weights must be finite and non-negative");
        }
    }
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.index < b.index; });
    atom_at_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const Atom& a = atoms_[i];
        if (a.index > n) {
            throw ConfigError(fmt::format("atom at knot {} beyond the horizon", a.index));
        }
        if (!std::isfinite(a.mass) || !(a.mass > 0.0)) {
            throw ConfigError(fmt::format("atom at knot {} must have positive mass", a.index));
        }
        if (i > 0 && atoms_[i - 1].index == a.index) {
            throw ConfigError(fmt::format("duplicate atom at knot {}", a.index));
        }
        atom_at_[a.index] = a.mass;
    }

    knot_mass_.assign(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        knot_mass_[k] = density_[k] * grid_.dt() + atom_at_[k];
    }
    knot_mass_[n] = atom_at_[n];

    head_.assign(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        head_[k + 1] = head_[k] + knot_mass_[k];
    }
    tail_.assign(n + 1, 0.0);
    tail_[n] = knot_mass_[n];
    for (std::size_t k = n; k-- > 0;) {
        tail_[k] = tail_[k + 1] + knot_mass_[k];
    }
    if (!(tail_[0] > 0.0)) {
        throw ConfigError("measure must have positive total mass");
    }
}

WeightMeasure WeightMeasure::uniform(const TimeGrid& grid, double total_mass) {
    return WeightMeasure(grid, std::vector<double>(grid.n_steps(), total_mass / grid.horizon()));
}

WeightMeasure WeightMeasure::dirac(const TimeGrid& grid, std::size_t index, double mass) {
    return WeightMeasure(grid, {}, {Atom{index, mass}});
}

double WeightMeasure::mass_between(std::size_t j, std::size_t k) const noexcept {
    double m = 0.0;
    for (std::size_t i = j; i < k; ++i) {
        m += knot_mass_[i];
    }
    return m;
}

bool WeightMeasure::has_density() const noexcept {
    return std::any_of(density_.begin(), density_.end(), [](double w) { return w > 0.0; });
}

double WeightMeasure::integral_before(const DiscretePath& x, std::size_t k) const {
    if (!(x.grid() == grid_)) {
        throw GridMismatch("path and measure live on different grids");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        s += x[j] * knot_mass_[j];
    }
    return s;
}

double WeightMeasure::integral_through(const DiscretePath& x, std::size_t k) const {
    return integral_before(x, k) + x[k] * atom_at_[k];
}

double WeightMeasure::integral_of_stopped(const DiscretePath& x, std::size_t k) const {
    return integral_before(x, k) + x[k] * tail_[k];
}

DiscretePath WeightMeasure::cumulative() const { return DiscretePath(grid_, head_); }

WeightMeasure WeightMeasure::scaled(double c) const {
    std::vector<double> w = density_;
    for (double& v : w) {
        v *= c;
    }
    std::vector<Atom> a = atoms_;
    for (Atom& atom : a) {
        atom.mass *= c;
    }
    return WeightMeasure(grid_, std::move(w), std::move(a));
}

nlohmann::json WeightMeasure::to_json() const {
    nlohmann::json atoms = nlohmann::json::array();
    for (const Atom& a : atoms_) {
        atoms.push_back({{"index", a.index}, {"mass", a.mass}});
    }
    return {{"density", density_}, {"atoms", atoms}};
}

namespace {

template <class T>
T read(const nlohmann::json& v, const std::string& where) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(fmt::format("{}: wrong type ({})", where, v.type_name()));
    }
}

}  // namespace

WeightMeasure WeightMeasure::from_json(const TimeGrid& grid, const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("measure must be a JSON object");
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "density" && key != "atoms") {
            throw ConfigError(fmt::format("/{}: unknown key", key));
        }
    }
    std::vector<double> density;
    if (j.contains("density")) {
        density = read<std::vector<double>>(j.at("density"), "/density");
    }
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        std::size_t i = 0;
        if (!j.at("atoms").is_array()) {
            throw ConfigError("/atoms: expected an array");
        }
        for (const auto& a : j.at("atoms")) {
            if (!a.is_object()) {
                throw ConfigError(fmt::format("/atoms/{}: expected an object", i));
            }
            for (const auto& [key, _] : a.items()) {
                if (key != "index" && key != "mass") {
                    throw ConfigError(fmt::format("/atoms/{}/{}: unknown key", i, key));
                }
            }
            for (const char* key : {"index", "mass"}) {
                if (!a.contains(key)) {
                    throw ConfigError(fmt::format("/atoms/{}/{}: required key missing", i, key));
                }
            }
            atoms.push_back({read<std::size_t>(a.at("index"), fmt::format("/atoms/{}/index", i)),
                             read<double>(a.at("mass"), fmt::format("/atoms/{}/mass", i))});
            ++i;
        }
    }
    return WeightMeasure(grid, std::move(density), std::move(atoms));
}

WeightMeasure measure_from_config(const TimeGrid& grid, nlohmann::json j) {
    if (j.is_object() && j.contains("uniform_mass")) {
        if (j.contains("density")) {
            throw ConfigError("/uniform_mass: give either density or uniform_mass");
        }
        const double m = read<double>(j.at("uniform_mass"), "/uniform_mass");
        j.erase("uniform_mass");
        j["density"] = std::vector<double>(grid.n_steps(), m / grid.horizon());
    }
    return WeightMeasure::from_json(grid, j);
}

}  // namespace dlab
