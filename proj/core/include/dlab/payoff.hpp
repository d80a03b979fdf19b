#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace dlab {

enum class PayoffKind { CallOnAvg, PutOnAvg, Linear, CustomTable };

const char* to_string(PayoffKind kind);
PayoffKind payoff_kind_from_string(const std::string& name);

/// Scalar payoff g(z) applied to z = integral of the path against mu.
///
///   call_on_avg   scale * max(z - strike, 0)
///   put_on_avg    scale * max(strike - z, 0)
///   linear        scale * (z - strike)
///   custom_table  piecewise linear through `table`, flat outside it
///
/// A negative scale flips convexity. With smoothing s > 0 the call and put kinks are
/// replaced by a parabola on [strike - s, strike + s], making g' Lipschitz.
/// `alpha` is the declared Holder exponent of g' used by the regularity audit; it is not
/// inferred.
struct Payoff {
    PayoffKind kind = PayoffKind::CallOnAvg;
    double strike = 0.0;
    double scale = 1.0;
    double alpha = 1.0;
    double smoothing = 0.0;
    std::vector<std::pair<double, double>> table;

    double operator()(double z) const;
    /// Right derivative.
    double slope(double z) const;
    /// Global Lipschitz constant.
    double lipschitz() const;

    bool convex() const;
    bool concave() const;

    void validate() const;

    nlohmann::json to_json() const;
    static Payoff from_json(const nlohmann::json& j);
};

}  // namespace dlab
