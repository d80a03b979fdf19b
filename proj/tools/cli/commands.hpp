#pragma once

#include "config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace dlab::cli {

struct Context {
    std::string subcommand;
    nlohmann::json config;
    std::uint64_t seed = 1;
    std::filesystem::path out;
    std::vector<std::string> outputs;

    /// Opens a file under the output directory and records it for the manifest.
    std::ofstream open(const std::string& name);
};

struct Outcome {
    nlohmann::json summary;
    /// 0 or 2.
    int exit_code = 0;
};

Outcome cmd_simulate(Context& ctx);
Outcome cmd_derivative(Context& ctx);
Outcome cmd_check_ito(Context& ctx);
Outcome cmd_uvm_solve(Context& ctx);
Outcome cmd_hedge(Context& ctx);
Outcome cmd_report(Context& ctx);

}  // namespace dlab::cli
