#include "config.hpp"

#include <dlab/payoff.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dlab::cli {

Node::Node(const json& value, std::string pointer) : value_(&value), pointer_(std::move(pointer)) {
    if (!value.is_object()) {
        throw ConfigError((pointer_.empty() ? std::string("/") : pointer_) + ": expected an object");
    }
}

std::string Node::at(std::string_view key) const {
    return pointer_ + "/" + std::string(key);
}

bool Node::has(std::string_view key) const {
    return value_->contains(std::string(key));
}

void Node::allow(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, _] : value_->items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(at(key) + ": unknown key");
        }
    }
}

Node Node::child(std::string_view key) const {
    if (!has(key)) {
        throw ConfigError(at(key) + ": required key missing");
    }
    return Node(value_->at(std::string(key)), at(key));
}

std::optional<Node> Node::maybe(std::string_view key) const {
    if (!has(key)) {
        return std::nullopt;
    }
    return child(key);
}

std::vector<Node> Node::items(std::string_view key) const {
    if (!has(key)) {
        throw ConfigError(at(key) + ": required key missing");
    }
    const json& arr = value_->at(std::string(key));
    if (!arr.is_array()) {
        throw ConfigError(at(key) + ": expected an array");
    }
    std::vector<Node> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        out.emplace_back(arr[i], fmt::format("{}/{}", at(key), i));
    }
    return out;
}

void rethrow_under(const std::string& pointer, const std::exception& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.starts_with('/') ? pointer + msg : pointer + ": " + msg);
}

TimeGrid parse_grid(const Node& n) {
    n.allow({"horizon", "n_steps"});
    try {
        return TimeGrid(n.get_or("horizon", 1.0), n.get<std::size_t>("n_steps"));
    } catch (const DomainError& e) {
        rethrow_under(n.pointer(), e);
    }
}

WeightMeasure parse_measure(const TimeGrid& grid, const Node& n) {
    try {
        return measure_from_config(grid, n.raw());
    } catch (const ConfigError& e) {
        rethrow_under(n.pointer(), e);
    } catch (const json::exception& e) {
        rethrow_under(n.pointer(), e);
    }
}

namespace {

VolPolicy parse_policy(const Node& n) {
    const auto kind = n.get<std::string>("kind");
    if (kind == "constant") {
        n.allow({"kind", "sigma"});
        return constant_policy(n.get<double>("sigma"));
    }
    if (kind == "regime_switching") {
        n.allow({"kind", "sigma_lo", "sigma_hi", "switch_prob"});
        return regime_switching_policy(n.get<double>("sigma_lo"), n.get<double>("sigma_hi"),
                                       n.get_or("switch_prob", 0.1));
    }
    throw ConfigError(n.at("kind") + ": unknown policy kind '" + kind + "'");
}

}  // namespace

ModelSpec parse_model(const Node& n) {
    n.allow({"kind", "x0", "sigma", "sigma_lo", "sigma_hi", "policy", "drift", "weierstrass"});
    ModelSpec m;
    try {
        m.kind = model_kind_from_string(n.get<std::string>("kind"));
    } catch (const ConfigError& e) {
        rethrow_under(n.at("kind"), e);
    }
    m.x0 = n.get_or("x0", 0.0);
    m.sigma = n.get_or("sigma", 1.0);
    m.sigma_lo = n.get_or("sigma_lo", m.kind == ModelKind::UvmPolicy ? 0.1 : 0.0);
    m.sigma_hi = n.get_or("sigma_hi", m.kind == ModelKind::UvmPolicy ? 0.2 : 1.0);
    if (m.kind == ModelKind::UvmPolicy) {
        if (auto p = n.maybe("policy")) {
            json filled = p->raw();
            if (filled.value("kind", "") == "regime_switching") {
                filled["sigma_lo"] = filled.value("sigma_lo", m.sigma_lo);
                filled["sigma_hi"] = filled.value("sigma_hi", m.sigma_hi);
            }
            m.policy = parse_policy(Node(filled, p->pointer()));
        } else {
            m.policy = constant_policy(m.sigma_hi);
        }
    } else if (n.has("policy")) {
        throw ConfigError(n.at("policy") + ": only uvm_policy models take a policy");
    }
    if (m.kind == ModelKind::Diffusion) {
        // Mean-reverting drift kappa (theta - x) with constant vol sigma.
        double kappa = 0.0, theta = 0.0;
        if (auto d = n.maybe("drift")) {
            d->allow({"kappa", "theta"});
            kappa = d->get_or("kappa", 0.0);
            theta = d->get_or("theta", 0.0);
        }
        m.drift = [kappa, theta](const PolicyState& s) { return kappa * (theta - s.x); };
        m.vol = constant_policy(m.sigma);
    } else if (n.has("drift")) {
        throw ConfigError(n.at("drift") + ": only diffusion models take a drift");
    }
    if (auto w = n.maybe("weierstrass")) {
        w->allow({"a", "b", "amplitude"});
        m.weierstrass.a = w->get_or("a", m.weierstrass.a);
        m.weierstrass.b = w->get_or("b", m.weierstrass.b);
        m.weierstrass.amplitude = w->get_or("amplitude", m.weierstrass.amplitude);
    }
    try {
        m.validate();
    } catch (const ConfigError& e) {
        rethrow_under(n.pointer(), e);
    }
    return m;
}

PathFunctional parse_functional(const TimeGrid& grid, const Node& n) {
    const auto kind = n.get<std::string>("kind");
    if (kind == "power") {
        n.allow({"kind", "p"});
        const int p = n.get_or("p", 2);
        if (p < 1) {
            throw ConfigError(n.at("p") + ": must be >= 1");
        }
        return catalog::power(p);
    }
    if (kind == "running_integral") {
        n.allow({"kind", "mu"});
        return catalog::running_integral(parse_measure(grid, n.child("mu")));
    }
    if (kind == "running_max") {
        n.allow({"kind"});
        return catalog::running_max();
    }
    if (kind == "integral_payoff") {
        n.allow({"kind", "mu", "payoff"});
        Payoff g;
        try {
            g = Payoff::from_json(n.child("payoff").raw());
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            // Payoff messages already carry "/payoff".
            throw ConfigError(msg.starts_with('/') ? n.pointer() + msg : n.at("payoff") + ": " + msg);
        }
        return catalog::integral_payoff([g](double z) { return g(z); },
                                        [g](double z) { return g.slope(z); },
                                        parse_measure(grid, n.child("mu")));
    }
    throw ConfigError(n.at("kind") + ": unknown functional kind '" + kind + "'");
}

std::vector<Epsilon> parse_ladder(const TimeGrid& grid, const std::optional<Node>& n) {
    if (!n) {
        return default_eps_ladder(grid);
    }
    n->allow({"k_min", "k_max", "steps"});
    if (n->has("steps")) {
        if (n->has("k_min") || n->has("k_max")) {
            throw ConfigError(n->at("steps") + ": give either steps or k_min/k_max");
        }
        std::vector<Epsilon> out;
        for (auto s : n->get<std::vector<std::size_t>>("steps")) {
            if (s == 0 || s > grid.n_steps()) {
                throw ConfigError(n->at("steps") + ": widths must lie in [1, n_steps]");
            }
            out.push_back({s});
        }
        for (std::size_t i = 1; i < out.size(); ++i) {
            if (!(out[i] < out[i - 1])) {
                throw ConfigError(n->at("steps") + ": widths must be strictly decreasing");
            }
        }
        return out;
    }
    const auto ladder = default_eps_ladder(grid, n->get_or("k_min", 3), n->get_or("k_max", 10));
    if (ladder.empty()) {
        throw ConfigError(n->pointer() + ": ladder is empty on this grid");
    }
    return ladder;
}

UvmProblem parse_problem(const Node& n) {
    try {
        return UvmProblem::from_json(n.raw());
    } catch (const ConfigError& e) {
        rethrow_under(n.pointer(), e);
    } catch (const json::exception& e) {
        rethrow_under(n.pointer(), e);
    } catch (const DomainError& e) {
        rethrow_under(n.pointer(), e);
    }
}

UvmProblem parse_problem_with_steps(const Node& n, std::size_t n_steps) {
    json copy = n.raw();
    copy["n_steps"] = n_steps;
    return parse_problem(Node(copy, n.pointer()));
}

std::string config_hash(const json& config) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : config.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return fmt::format("{:016x}", h);
}

}  // namespace dlab::cli
