#include "dlab/payoff.hpp"

#include "dlab/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dlab {

namespace {

double hinge(double d, double s) {
    if (s > 0.0 && std::abs(d) < s) {
        return (d + s) * (d + s) / (4.0 * s);
    }
    return std::max(d, 0.0);
}

double hinge_slope(double d, double s) {
    if (s > 0.0 && std::abs(d) < s) {
        return (d + s) / (2.0 * s);
    }
    return d >= 0.0 ? 1.0 : 0.0;
}

}  // namespace

const char* to_string(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::CallOnAvg: return "call_on_avg";
        case PayoffKind::PutOnAvg: return "put_on_avg";
        case PayoffKind::Linear: return "linear";
        case PayoffKind::CustomTable: return "custom_table";
    }
    return "?";
}

PayoffKind payoff_kind_from_string(const std::string& name) {
    if (name == "call_on_avg") return PayoffKind::CallOnAvg;
    if (name == "put_on_avg") return PayoffKind::PutOnAvg;
    if (name == "linear") return PayoffKind::Linear;
    if (name == "custom_table") return PayoffKind::CustomTable;
    throw ConfigError(fmt::format("unknown payoff kind '{}'", name));
}

double Payoff::operator()(double z) const {
    switch (kind) {
        case PayoffKind::CallOnAvg: return scale * hinge(z - strike, smoothing);
        case PayoffKind::PutOnAvg: return scale * hinge(strike - z, smoothing);
        case PayoffKind::Linear: return scale * (z - strike);
        case PayoffKind::CustomTable: {
            if (z <= table.front().first) return table.front().second;
            if (z >= table.back().first) return table.back().second;
            const auto it = std::upper_bound(table.begin(), table.end(), z,
                                             [](double v, const auto& p) { return v < p.first; });
            const auto& [z1, g1] = *it;
            const auto& [z0, g0] = *(it - 1);
            return g0 + (g1 - g0) * (z - z0) / (z1 - z0);
        }
    }
    return 0.0;
}

double Payoff::slope(double z) const {
    switch (kind) {
        case PayoffKind::CallOnAvg: return scale * hinge_slope(z - strike, smoothing);
        case PayoffKind::PutOnAvg: return -scale * hinge_slope(strike - z, smoothing);
        case PayoffKind::Linear: return scale;
        case PayoffKind::CustomTable: {
            if (z < table.front().first || z >= table.back().first) return 0.0;
            const auto it = std::upper_bound(table.begin(), table.end(), z,
                                             [](double v, const auto& p) { return v < p.first; });
            return (it->second - (it - 1)->second) / (it->first - (it - 1)->first);
        }
    }
    return 0.0;
}

double Payoff::lipschitz() const {
    if (kind != PayoffKind::CustomTable) {
        return std::abs(scale);
    }
    double l = 0.0;
    for (std::size_t i = 1; i < table.size(); ++i) {
        l = std::max(l, std::abs((table[i].second - table[i - 1].second) /
                                 (table[i].first - table[i - 1].first)));
    }
    return l;
}

bool Payoff::convex() const {
    if (kind == PayoffKind::Linear) return true;
    if (kind != PayoffKind::CustomTable) return scale >= 0.0;
    double prev = 0.0;  // flat left extension
    for (std::size_t i = 1; i < table.size(); ++i) {
        const double s = (table[i].second - table[i - 1].second) / (table[i].first - table[i - 1].first);
        if (s < prev) return false;
        prev = s;
    }
    return prev <= 0.0;
}

bool Payoff::concave() const {
    Payoff flipped = *this;
    flipped.scale = -scale;
    for (auto& p : flipped.table) p.second = -p.second;
    return flipped.convex();
}

void Payoff::validate() const {
    if (!std::isfinite(strike) || !std::isfinite(scale)) {
        throw ConfigError("payoff strike and scale must be finite");
    }
    if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) {
        throw ConfigError("payoff smoothing must be finite and non-negative");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ConfigError("payoff alpha must lie in (0, 1]");
    }
    if (kind == PayoffKind::CustomTable) {
        if (table.size() < 2) {
            throw ConfigError("custom_table payoff needs at least two nodes");
        }
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (!std::isfinite(table[i].first) || !std::isfinite(table[i].second)) {
                throw ConfigError("custom_table entries must be finite");
            }
            if (i > 0 && !(table[i].first > table[i - 1].first)) {
                throw ConfigError("custom_table abscissae must be strictly increasing");
            }
        }
    }
}

nlohmann::json Payoff::to_json() const {
    nlohmann::json j{{"kind", to_string(kind)}, {"strike", strike}, {"scale", scale},
                     {"alpha", alpha}, {"smoothing", smoothing}};
    if (kind == PayoffKind::CustomTable) {
        j["table"] = nlohmann::json::array();
        for (const auto& [z, g] : table) {
            j["table"].push_back({z, g});
        }
    }
    return j;
}

Payoff Payoff::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("/payoff: expected an object");
    }
    Payoff p;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "kind") {
                p.kind = payoff_kind_from_string(value.get<std::string>());
            } else if (key == "strike") {
                p.strike = value.get<double>();
            } else if (key == "scale") {
                p.scale = value.get<double>();
            } else if (key == "alpha") {
                p.alpha = value.get<double>();
            } else if (key == "smoothing") {
                p.smoothing = value.get<double>();
            } else if (key == "table") {
                for (const auto& row : value) {
                    if (!row.is_array() || row.size() != 2) {
                        throw ConfigError("/payoff/table: rows must be [z, g] pairs");
                    }
                    p.table.emplace_back(row[0].get<double>(), row[1].get<double>());
                }
            } else {
                throw ConfigError(fmt::format("/payoff/{}: unknown key", key));
            }
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(fmt::format("/payoff/{}: wrong type", key));
        }
    }
    p.validate();
    return p;
}

}  // namespace dlab
