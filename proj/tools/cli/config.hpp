#pragma once

#include <dlab/error.hpp>
#include <dlab/functional.hpp>
#include <dlab/measure.hpp>
#include <dlab/regularize.hpp>
#include <dlab/simulate.hpp>
#include <dlab/uvm.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dlab::cli {

using nlohmann::json;

/// A JSON object together with its pointer from the config root. Every error it raises
/// is a ConfigError that starts with the offending pointer.
class Node {
public:
    Node(const json& value, std::string pointer);

    const json& raw() const noexcept { return *value_; }
    const std::string& pointer() const noexcept { return pointer_; }
    std::string at(std::string_view key) const;

    bool has(std::string_view key) const;
    /// Rejects every key outside `allowed`.
    void allow(std::initializer_list<std::string_view> allowed) const;

    template <class T>
    T get(std::string_view key) const {
        if (!has(key)) {
            throw ConfigError(at(key) + ": required key missing");
        }
        return convert<T>(key);
    }

    template <class T>
    T get_or(std::string_view key, T fallback) const {
        return has(key) ? convert<T>(key) : fallback;
    }

    Node child(std::string_view key) const;
    std::optional<Node> maybe(std::string_view key) const;
    std::vector<Node> items(std::string_view key) const;

private:
    template <class T>
    T convert(std::string_view key) const {
        try {
            return value_->at(std::string(key)).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(at(key) + ": " + e.what());
        }
    }

    const json* value_;
    std::string pointer_;
};

/// Rethrows a library ConfigError with its message placed under `pointer`.
[[noreturn]] void rethrow_under(const std::string& pointer, const std::exception& e);

TimeGrid parse_grid(const Node& n);
WeightMeasure parse_measure(const TimeGrid& grid, const Node& n);
ModelSpec parse_model(const Node& n);
PathFunctional parse_functional(const TimeGrid& grid, const Node& n);
std::vector<Epsilon> parse_ladder(const TimeGrid& grid, const std::optional<Node>& n);
UvmProblem parse_problem(const Node& n);
/// The problem config with n_steps replaced, for dt ladders.
UvmProblem parse_problem_with_steps(const Node& n, std::size_t n_steps);

/// FNV-1a over the canonical dump, as 16 hex digits.
std::string config_hash(const json& config);

}  // namespace dlab::cli
