#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dlab {

/// Uniform time grid 0 = t_0 < ... < t_n = T.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t n_steps);

    double horizon() const noexcept { return horizon_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t n_knots() const noexcept { return n_steps_ + 1; }
    double dt() const noexcept { return dt_; }

    /// t_k, with t_n == T exactly.
    double time(std::size_t k) const noexcept;

    /// Nearest knot to t; ties round down. Throws DomainError when t is outside [0, T].
    std::size_t snap(double t) const;

    /// Number of whole steps in a duration, snapped like snap().
    std::size_t steps_in(double duration) const;

    bool operator==(const TimeGrid&) const = default;

private:
    double horizon_;
    std::size_t n_steps_;
    double dt_;
};

/// Values of an R^d valued path on a TimeGrid. Storage is component-major:
/// component c occupies values[c * n_knots, (c + 1) * n_knots).
class DiscretePath {
public:
    DiscretePath(TimeGrid grid, std::vector<double> values, std::size_t dim = 1);

    static DiscretePath constant(const TimeGrid& grid, double c);
    static DiscretePath from_function(const TimeGrid& grid, const std::function<double(double)>& f);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return grid_.n_knots(); }

    /// First component at knot k.
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    double at(std::size_t component, std::size_t k) const noexcept {
        return values_[component * size() + k];
    }
    std::vector<double> point(std::size_t k) const;

    std::span<const double> component(std::size_t c) const noexcept {
        return {values_.data() + c * size(), size()};
    }
    std::span<const double> values() const noexcept { return values_; }

    void set(std::size_t k, double v) { set(0, k, v); }
    void set(std::size_t component, std::size_t k, double v);

    bool operator==(const DiscretePath&) const = default;

private:
    TimeGrid grid_;
    std::size_t dim_;
    std::vector<double> values_;
};

/// Non-owning read of a path stopped at knot k: reading index j returns values[min(j, k)].
class StoppedView {
public:
    StoppedView(const DiscretePath& base, std::size_t stop_index);

    double operator()(std::size_t j) const noexcept { return (*base_)[j < stop_ ? j : stop_]; }
    double at(std::size_t component, std::size_t j) const noexcept {
        return base_->at(component, j < stop_ ? j : stop_);
    }
    std::size_t stop_index() const noexcept { return stop_; }
    const DiscretePath& base() const noexcept { return *base_; }

    DiscretePath materialize() const;

private:
    const DiscretePath* base_;
    std::size_t stop_;
};

void require_same_grid(const DiscretePath& a, const DiscretePath& b);

/// x_{t^} : freezes the path after t (snapped to the grid).
DiscretePath stop(const DiscretePath& path, double t);
DiscretePath stop_at(const DiscretePath& path, std::size_t k);

/// x (+)_t y := x on [0,t), x_t + y held constant on [t,T].
DiscretePath vertical_bump(const DiscretePath& path, double t, std::span<const double> y);
DiscretePath vertical_bump(const DiscretePath& path, double t, double y);
DiscretePath vertical_bump_at(const DiscretePath& path, std::size_t k, std::span<const double> y);
DiscretePath vertical_bump_at(const DiscretePath& path, std::size_t k, double y);

/// Adds y to every value from t on; leaves the shape of the tail intact.
DiscretePath tail_shift(const DiscretePath& path, double t, std::span<const double> y);
DiscretePath tail_shift(const DiscretePath& path, double t, double y);
DiscretePath tail_shift_at(const DiscretePath& path, std::size_t k, std::span<const double> y);
DiscretePath tail_shift_at(const DiscretePath& path, std::size_t k, double y);

/// max_k |x_k| (Euclidean norm across components).
double sup_norm(const DiscretePath& path);
double sup_distance(const DiscretePath& a, const DiscretePath& b);

/// CSV with header `t,x_1,...,x_d`, one row per knot, 17 significant digits.
void write_csv(std::ostream& out, const DiscretePath& path);
void write_csv_file(const std::string& file, const DiscretePath& path);
DiscretePath read_csv(std::istream& in);
DiscretePath read_csv_file(const std::string& file);

/// `%.17g` text form shared by every CSV writer in the library (round-trips exactly).
std::string format_double(double v);

}  // namespace dlab
