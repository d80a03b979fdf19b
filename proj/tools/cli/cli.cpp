#include "cli.hpp"

#include "commands.hpp"

#include <dlab/parallel.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#ifndef DLAB_VERSION
#define DLAB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace dlab::cli {

namespace {

using Command = std::function<Outcome(Context&)>;

json versions() {
    return {{"dlab", DLAB_VERSION},
            {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                          NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)},
            {"fmt", FMT_VERSION},
            {"cli11", CLI11_VERSION},
            {"compiler", __VERSION__}};
}

json load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("cannot read config " + file);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", file, e.what()));
    }
}

void write_json(const fs::path& file, const json& j) {
    std::ofstream out(file);
    if (!out) {
        throw ConfigError("cannot write " + file.string());
    }
    out << j.dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Functional Ito calculus and uncertain volatility toolkit", "dlab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", DLAB_VERSION);

    std::string config_file;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    bool quiet = false;
    std::vector<std::string> run_dirs;

    const std::vector<std::tuple<std::string, std::string, Command>> table = {
        {"simulate", "Sample paths of a model", cmd_simulate},
        {"derivative", "Horizontal and vertical derivatives along one path", cmd_derivative},
        {"check-ito", "Functional Ito decomposition and orthogonality diagnostics", cmd_check_ito},
        {"uvm-solve", "Solve the uncertain volatility problem for an Asian payoff", cmd_uvm_solve},
        {"hedge", "Replication and superhedging backtests", cmd_hedge},
        {"report", "Aggregate the summaries of earlier runs", cmd_report},
    };
    std::map<const CLI::App*, std::pair<std::string, Command>> by_app;
    std::map<const CLI::App*, CLI::Option*> seed_options;
    for (const auto& [name, description, command] : table) {
        CLI::App* sub = app.add_subcommand(name, description);
        auto* config_opt = sub->add_option("--config", config_file, "JSON configuration file");
        if (name == "report") {
            sub->add_option("runs", run_dirs, "Run directories (added to the config's runs)");
        } else {
            config_opt->required();
        }
        config_opt->check(CLI::ExistingFile);
        seed_options[sub] = sub->add_option("--seed", seed, "Master seed (overrides the config)");
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_flag("--quiet", quiet, "Do not print the summary");
        by_app[sub] = {name, command};
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const auto& [name, command] = by_app.at(chosen);

    Context ctx;
    ctx.subcommand = name;
    ctx.out = out_dir;
    const auto started = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        ctx.config = config_file.empty() ? json::object() : load_config(config_file);
        if (!ctx.config.is_object()) {
            throw ConfigError("/: config must be a JSON object");
        }
        if (!run_dirs.empty()) {
            auto& runs = ctx.config["runs"];
            if (runs.is_null()) {
                runs = json::array();
            }
            for (const auto& d : run_dirs) {
                runs.push_back(d);
            }
        }
        if (seed_options.at(chosen)->count() > 0) {
            ctx.seed = seed;
        } else if (ctx.config.contains("seed")) {
            const auto& s = ctx.config["seed"];
            if (!s.is_number_unsigned()) {
                throw ConfigError("/seed: expected a non-negative integer");
            }
            ctx.seed = s.get<std::uint64_t>();
        }
        fs::create_directories(ctx.out);
        outcome = command(ctx);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    outcome.summary["subcommand"] = name;
    json manifest = {{"subcommand", name},
                     {"config_file", config_file},
                     {"config_hash", config_hash(ctx.config)},
                     {"config", ctx.config},
                     {"seed", ctx.seed},
                     {"threads", thread_count()},
                     {"versions", versions()},
                     {"wall_time_s", wall},
                     {"exit_code", outcome.exit_code},
                     {"outputs", ctx.outputs}};
    try {
        write_json(ctx.out / "summary.json", outcome.summary);
        write_json(ctx.out / "manifest.json", manifest);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    if (!quiet) {
        out << outcome.summary.dump(2) << '\n';
    }
    return outcome.exit_code;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace dlab::cli
