#pragma once

#include "dlab/path.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace dlab {

struct Atom {
    std::size_t index;
    double mass;
};

/// Finite positive measure on [0, T]: a piecewise-constant density on the grid cells
/// [t_i, t_{i+1}) plus finitely many atoms at knots.
///
/// Integrals against a path use the left-endpoint rule: cell i contributes x_{t_i} w_i dt.
/// The mass "attributed to knot k" is therefore w_k dt + mu({t_k}) for k < n and mu({T})
/// for k = n; every cumulative quantity below is a sum of these knot masses.
class WeightMeasure {
public:
    WeightMeasure(TimeGrid grid, std::vector<double> density, std::vector<Atom> atoms = {});

    /// Constant density total_mass / T, no atoms.
    static WeightMeasure uniform(const TimeGrid& grid, double total_mass);
    /// Single atom.
    static WeightMeasure dirac(const TimeGrid& grid, std::size_t index, double mass);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> density() const noexcept { return density_; }
    std::span<const Atom> atoms() const noexcept { return atoms_; }

    double atom_mass(std::size_t k) const noexcept { return atom_at_[k]; }
    double knot_mass(std::size_t k) const noexcept { return knot_mass_[k]; }
    double total_mass() const noexcept { return tail_[0]; }
    /// mu([0, t_k)).
    double mass_before(std::size_t k) const noexcept { return head_[k]; }
    /// mu([t_k, T]).
    double mass_from(std::size_t k) const noexcept { return tail_[k]; }
    /// mu([t_j, t_k)) for j <= k.
    double mass_between(std::size_t j, std::size_t k) const noexcept;
    bool has_density() const noexcept;

    /// Integral over [0, t_k) of the path (first component).
    double integral_before(const DiscretePath& x, std::size_t k) const;
    /// Integral over [0, t_k] of the path: integral_before(k) + x_k mu({t_k}).
    double integral_through(const DiscretePath& x, std::size_t k) const;
    /// Integral over [0, T] of the path stopped at t_k.
    double integral_of_stopped(const DiscretePath& x, std::size_t k) const;

    /// Cumulative b_k = mu([0, t_k)) as a path; db at knot k equals knot_mass(k).
    DiscretePath cumulative() const;

    /// Same measure with every mass multiplied by c >= 0.
    WeightMeasure scaled(double c) const;

    nlohmann::json to_json() const;
    static WeightMeasure from_json(const TimeGrid& grid, const nlohmann::json& j);

private:
    TimeGrid grid_;
    std::vector<double> density_;
    std::vector<Atom> atoms_;
    std::vector<double> atom_at_;
    std::vector<double> knot_mass_;
    std::vector<double> head_;
    std::vector<double> tail_;
};

/// from_json plus the shorthand {"uniform_mass": m} for a flat density of total mass m
/// (optionally with "atoms").
WeightMeasure measure_from_config(const TimeGrid& grid, nlohmann::json j);

}  // namespace dlab
