#pragma once

#include "dlab/simulate.hpp"
#include "dlab/uvm.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dlab {

struct Adversary {
    std::string name;
    VolPolicy policy;
};

/// Constant sigma_lo, constant sigma_hi, regime switching, and the field's worst-case policy.
std::vector<Adversary> default_adversaries(std::shared_ptr<const ValueField> field,
                                           double switch_prob = 0.1,
                                           std::shared_ptr<ExtrapolationCounter> counter = nullptr);

struct PathRecord {
    std::uint64_t path_id = 0;
    double pnl = 0.0;
    double shortfall = 0.0;
    double payoff = 0.0;
    double sup_position = 0.0;
    bool extrapolated = false;
    /// Filled when positions are kept: position over [t_k, t_{k+1}) and X_{k+1} - X_k.
    std::vector<double> positions;
    std::vector<double> increments;
};

struct HedgeSummary {
    double mean = 0.0;
    double stddev = 0.0;
    double stderr_mean = 0.0;
    double rmse = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q01 = 0.0;
    double q50 = 0.0;
    double q99 = 0.0;
    double shortfall_q999 = 0.0;
    double shortfall_fraction = 0.0;
    double sup_position = 0.0;
    std::size_t extrapolated_paths = 0;
};

struct HedgeReport {
    std::string adversary;
    double v0 = 0.0;
    double capital = 0.0;
    double dt = 0.0;
    std::vector<PathRecord> paths;
    HedgeSummary summary;

    nlohmann::json summary_json() const;
};

struct HedgeOptions {
    std::size_t n_paths = 1000;
    SeedPlan plan{};
    /// Subtracted from V(0) to form the initial capital.
    double capital_deficit = 0.0;
    bool keep_positions = false;
};

/// Delta hedge of the field's payoff along paths of the given model, starting from
/// V(0) - capital_deficit. P&L = capital + sum position_k dX_k - g(X).
HedgeReport hedge_paths(const ValueField& field, const ModelSpec& model, const std::string& name,
                        const HedgeOptions& options);

/// Matched case: the field must be solved with sigma_lo = sigma_hi = sigma.
HedgeReport replication_backtest(const ValueField& field, double sigma, const HedgeOptions& options);

/// One report per adversary. An adversary leaving the band is a ConfigError naming its index.
std::vector<HedgeReport> superhedge_backtest(const ValueField& field,
                                             std::span<const Adversary> adversaries,
                                             const HedgeOptions& options);

struct PriceGapReport {
    double delta = 0.0;
    double shortfall_fraction = 0.0;
    HedgeReport hedge;
};

PriceGapReport price_gap_probe(const ValueField& field, double delta, const Adversary& adversary,
                               const HedgeOptions& options);

/// Superhedging along a dt ladder. c and C are fitted on every level but the finest and
/// checked on the finest.
struct LadderLevel {
    std::size_t n_steps = 0;
    double dt = 0.0;
    double v0 = 0.0;
    /// Worst 99.9% shortfall quantile over adversaries.
    double shortfall_q999 = 0.0;
    std::string worst_adversary;
    double worst_case_mean = 0.0;
    double worst_case_stderr = 0.0;
    std::vector<HedgeReport> reports;
};

struct LadderReport {
    std::vector<LadderLevel> levels;
    double c = 0.0;
    double big_c = 0.0;
    bool shortfall_decreasing = false;
    bool shortfall_within = false;
    bool duality_within = false;
    bool pass = false;
};

LadderReport superhedge_ladder(const std::function<UvmProblem(std::size_t n_steps)>& make_problem,
                               std::span<const std::size_t> ladder, const HedgeOptions& options,
                               double switch_prob = 0.1);

/// `path_id,pnl,shortfall`
void write_pnl_csv(std::ostream& out, const HedgeReport& report);
/// `path_id,step,position,increment`; requires keep_positions.
void write_positions_csv(std::ostream& out, const HedgeReport& report);
/// P&L rebuilt from a position ledger, summed in the same order as hedge_paths.
double recompute_pnl(double capital, std::span<const double> positions,
                     std::span<const double> increments, double payoff);

}  // namespace dlab
