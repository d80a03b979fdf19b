#include "dlab/path.hpp"

#include "dlab/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dlab {

TimeGrid::TimeGrid(double horizon, std::size_t n_steps)
    : horizon_(horizon), n_steps_(n_steps), dt_(0.0) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw DomainError("time grid horizon must be positive and finite");
    }
    if (n_steps == 0) {
        throw DomainError("time grid needs at least one step");
    }
    dt_ = horizon / static_cast<double>(n_steps);
}

double TimeGrid::time(std::size_t k) const noexcept {
    return horizon_ * static_cast<double>(k) / static_cast<double>(n_steps_);
}

std::size_t TimeGrid::snap(double t) const {
    const double slack = 1e-12 * std::max(1.0, horizon_);
    if (!std::isfinite(t) || t < -slack || t > horizon_ + slack) {
        throw DomainError(fmt::format("time {} outside [0, {}]", t, horizon_));
    }
    const double x = std::clamp(t, 0.0, horizon_) / dt_;
    auto k = static_cast<std::size_t>(std::floor(x));
    if (x - static_cast<double>(k) > 0.5) {
        ++k;
    }
    return std::min(k, n_steps_);
}

std::size_t TimeGrid::steps_in(double duration) const {
    if (!std::isfinite(duration) || duration < 0.0) {
        throw DomainError(fmt::format("duration {} must be non-negative", duration));
    }
    const double x = duration / dt_;
    auto k = static_cast<std::size_t>(std::floor(x));
    if (x - static_cast<double>(k) > 0.5) {
        ++k;
    }
    return k;
}

DiscretePath::DiscretePath(TimeGrid grid, std::vector<double> values, std::size_t dim)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
    if (dim_ == 0) {
        throw DomainError("path dimension must be positive");
    }
    if (values_.size() != dim_ * grid_.n_knots()) {
        throw GridMismatch(fmt::format("path has {} values, grid needs {} x {}", values_.size(),
                                       dim_, grid_.n_knots()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DomainError("path values must be finite");
        }
    }
}

DiscretePath DiscretePath::constant(const TimeGrid& grid, double c) {
    return DiscretePath(grid, std::vector<double>(grid.n_knots(), c));
}

DiscretePath DiscretePath::from_function(const TimeGrid& grid,
                                         const std::function<double(double)>& f) {
    std::vector<double> v(grid.n_knots());
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = f(grid.time(k));
    }
    return DiscretePath(grid, std::move(v));
}

std::vector<double> DiscretePath::point(std::size_t k) const {
    std::vector<double> p(dim_);
    for (std::size_t c = 0; c < dim_; ++c) {
        p[c] = at(c, k);
    }
    return p;
}

void DiscretePath::set(std::size_t component, std::size_t k, double v) {
    if (!std::isfinite(v)) {
        throw DomainError("path values must be finite");
    }
    values_[component * size() + k] = v;
}

StoppedView::StoppedView(const DiscretePath& base, std::size_t stop_index)
    : base_(&base), stop_(stop_index) {
    if (stop_index > base.grid().n_steps()) {
        throw DomainError("stop index beyond the horizon");
    }
}

DiscretePath StoppedView::materialize() const { return stop_at(*base_, stop_); }

void require_same_grid(const DiscretePath& a, const DiscretePath& b) {
    if (!(a.grid() == b.grid()) || a.dim() != b.dim()) {
        throw GridMismatch("paths live on different grids");
    }
}

namespace {

void check_knot(const DiscretePath& path, std::size_t k) {
    if (k > path.grid().n_steps()) {
        throw DomainError(fmt::format("knot {} beyond the horizon", k));
    }
}

void check_bump_dim(const DiscretePath& path, std::span<const double> y) {
    if (y.size() != path.dim()) {
        throw DomainError(fmt::format("bump has dimension {}, path has {}", y.size(), path.dim()));
    }
}

}  // namespace

DiscretePath stop_at(const DiscretePath& path, std::size_t k) {
    check_knot(path, k);
    std::vector<double> v(path.values().begin(), path.values().end());
    const std::size_t n = path.size();
    for (std::size_t c = 0; c < path.dim(); ++c) {
        const double frozen = v[c * n + k];
        std::fill(v.begin() + static_cast<std::ptrdiff_t>(c * n + k + 1),
                  v.begin() + static_cast<std::ptrdiff_t>((c + 1) * n), frozen);
    }
    return DiscretePath(path.grid(), std::move(v), path.dim());
}

DiscretePath stop(const DiscretePath& path, double t) {
    return stop_at(path, path.grid().snap(t));
}

DiscretePath vertical_bump_at(const DiscretePath& path, std::size_t k, std::span<const double> y) {
    check_knot(path, k);
    check_bump_dim(path, y);
    std::vector<double> v(path.values().begin(), path.values().end());
    const std::size_t n = path.size();
    for (std::size_t c = 0; c < path.dim(); ++c) {
        const double level = v[c * n + k] + y[c];
        std::fill(v.begin() + static_cast<std::ptrdiff_t>(c * n + k),
                  v.begin() + static_cast<std::ptrdiff_t>((c + 1) * n), level);
    }
    return DiscretePath(path.grid(), std::move(v), path.dim());
}

DiscretePath vertical_bump_at(const DiscretePath& path, std::size_t k, double y) {
    return vertical_bump_at(path, k, std::span<const double>(&y, 1));
}

DiscretePath vertical_bump(const DiscretePath& path, double t, std::span<const double> y) {
    return vertical_bump_at(path, path.grid().snap(t), y);
}

DiscretePath vertical_bump(const DiscretePath& path, double t, double y) {
    return vertical_bump_at(path, path.grid().snap(t), y);
}

DiscretePath tail_shift_at(const DiscretePath& path, std::size_t k, std::span<const double> y) {
    check_knot(path, k);
    check_bump_dim(path, y);
    std::vector<double> v(path.values().begin(), path.values().end());
    const std::size_t n = path.size();
    for (std::size_t c = 0; c < path.dim(); ++c) {
        for (std::size_t j = k; j < n; ++j) {
            v[c * n + j] += y[c];
        }
    }
    return DiscretePath(path.grid(), std::move(v), path.dim());
}

DiscretePath tail_shift_at(const DiscretePath& path, std::size_t k, double y) {
    return tail_shift_at(path, k, std::span<const double>(&y, 1));
}

DiscretePath tail_shift(const DiscretePath& path, double t, std::span<const double> y) {
    return tail_shift_at(path, path.grid().snap(t), y);
}

DiscretePath tail_shift(const DiscretePath& path, double t, double y) {
    return tail_shift_at(path, path.grid().snap(t), y);
}

double sup_norm(const DiscretePath& path) {
    double best = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        double sq = 0.0;
        for (std::size_t c = 0; c < path.dim(); ++c) {
            sq += path.at(c, k) * path.at(c, k);
        }
        best = std::max(best, path.dim() == 1 ? std::abs(path[k]) : std::sqrt(sq));
    }
    return best;
}

double sup_distance(const DiscretePath& a, const DiscretePath& b) {
    require_same_grid(a, b);
    double best = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double sq = 0.0;
        for (std::size_t c = 0; c < a.dim(); ++c) {
            const double d = a.at(c, k) - b.at(c, k);
            sq += d * d;
        }
        best = std::max(best, a.dim() == 1 ? std::abs(a[k] - b[k]) : std::sqrt(sq));
    }
    return best;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_csv(std::ostream& out, const DiscretePath& path) {
    out << 't';
    for (std::size_t c = 0; c < path.dim(); ++c) {
        out << ",x_" << (c + 1);
    }
    out << '\n';
    for (std::size_t k = 0; k < path.size(); ++k) {
        out << format_double(path.grid().time(k));
        for (std::size_t c = 0; c < path.dim(); ++c) {
            out << ',' << format_double(path.at(c, k));
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& file, const DiscretePath& path) {
    std::ofstream out(file);
    if (!out) {
        throw std::runtime_error("cannot open " + file + " for writing");
    }
    write_csv(out, path);
}

DiscretePath read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,", 0) != 0) {
        throw DomainError("path CSV must start with a `t,x_1,...` header");
    }
    const auto dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        if (row.size() != dim + 1) {
            throw DomainError("path CSV row has the wrong number of columns");
        }
        times.push_back(row[0]);
        rows.emplace_back(row.begin() + 1, row.end());
    }
    if (times.size() < 2 || times.front() != 0.0) {
        throw DomainError("path CSV needs at least two rows starting at t = 0");
    }
    const TimeGrid grid(times.back(), times.size() - 1);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(times[k] - grid.time(k)) > 1e-9 * grid.dt()) {
            throw DomainError("path CSV times are not a uniform grid");
        }
    }
    std::vector<double> values(dim * times.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t c = 0; c < dim; ++c) {
            values[c * times.size() + k] = rows[k][c];
        }
    }
    return DiscretePath(grid, std::move(values), dim);
}

DiscretePath read_csv_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open " + file);
    }
    return read_csv(in);
}

}  // namespace dlab
