#pragma once

#include "dlab/functional.hpp"
#include "dlab/path.hpp"
#include "dlab/regularize.hpp"
#include "dlab/simulate.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dlab {

/// F(t, X) = F(0, X) + sum_{s < t} grad_x F_s(X) (M_{s+1} - M_s) + gamma_t on the grid.
struct DecompositionResult {
    std::vector<double> f_path;
    std::vector<double> gradient;
    std::vector<double> integral_path;
    std::vector<double> gamma;
};

/// Throws EvaluationError naming the knot when the derivative cannot be evaluated.
DecompositionResult decompose(const PathFunctional& f, const DiscretePath& x, const DiscretePath& m,
                              std::optional<double> h = std::nullopt);

struct TestMartingale {
    std::string name;
    DiscretePath path;
};

/// {W, independent W', W^2 - t, left-point sum of X dW, X - x0}.
std::vector<TestMartingale> default_martingale_family(const SamplePath& sample,
                                                      const SeedPlan& plan);

struct OrthogonalitySample {
    DiscretePath gamma;
    std::vector<TestMartingale> family;
};

struct OrthogonalityVerdict {
    std::string name;
    UcpReport report;
    /// [gamma, N]^eps_T at the smallest eps, averaged over samples.
    double terminal = 0.0;
    bool pass = false;
};

struct OrthogonalityReport {
    std::vector<OrthogonalityVerdict> verdicts;
    bool pass = false;
};

/// Runs ucp_diagnostic on [gamma, N]^eps with a zero reference curve for every N in the family.
/// Several samples are averaged; every sample must list the same family in the same order.
OrthogonalityReport orthogonality_test(std::span<const OrthogonalitySample> samples,
                                       std::span<const Epsilon> ladder,
                                       const UcpOptions& options = {});
OrthogonalityReport orthogonality_test(const DiscretePath& gamma,
                                       std::span<const TestMartingale> family,
                                       std::span<const Epsilon> ladder,
                                       const UcpOptions& options = {});

/// X_{s^} (+)_{s+eps} (X_{s+eps} - X_s): frozen at X_s on [s, s+eps), X_{s+eps} from s+eps on.
DiscretePath frozen_reconstruction(const DiscretePath& x, std::size_t s, Epsilon eps);

/// sum over s with s + eps <= T of (1/eps) (F_{s+eps}(X) - F_{s+eps}(recon_s))^2 dt.
double condition_E_eps(const PathFunctional& f, const DiscretePath& x, Epsilon eps);
std::vector<double> condition_E_eps(const PathFunctional& f, const DiscretePath& x,
                                    std::span<const Epsilon> ladder);

/// Pointwise check of |F_{s+eps}(X) - F_{s+eps}(recon_s)| <= rhs(s, eps) on the (s, eps)
/// lattice of one path.
struct BoundReport {
    std::string name;
    std::size_t pairs = 0;
    std::size_t violations = 0;
    double max_violation = 0.0;
    std::vector<double> eps;
    std::vector<double> e_eps;
    /// (1/eps) sum rhs^2 dt: the E^eps bound the domination implies.
    std::vector<double> implied;
    bool pass = false;
};

using DominationPhi = std::function<double(const DiscretePath& x, double y)>;
using DominationPhi2 = std::function<double(const DiscretePath& x, double y, double eps)>;

/// rhs = sum over knots u in (s, s+eps) of phi(X, |X_u - X_s|) (b_{u+1} - b_u).
BoundReport bound_check_prop211(const PathFunctional& f, const DiscretePath& x,
                                const DominationPhi& phi, const DiscretePath& b,
                                std::span<const Epsilon> ladder);
/// phi(x, y) = y with b the cumulative of the dominating measure.
BoundReport bound_check_frechet(const PathFunctional& f, const DiscretePath& x,
                                const WeightMeasure& dominating, std::span<const Epsilon> ladder);
/// rhs = phi2(X, sup_{u in [s, s+eps]} |X_u - X_s|, eps).
BoundReport bound_check_prop213(const PathFunctional& f, const DiscretePath& x,
                                const DominationPhi2& phi2, std::span<const Epsilon> ladder);

struct DoobMeyerResult {
    std::vector<double> integral_path;
    std::vector<double> a_path;
    /// Fraction of steps with dA > threshold.
    double up_fraction = 0.0;
    /// 99th percentile of max(dA, 0).
    double up_q99 = 0.0;
    double threshold = 0.0;
    bool non_increasing = false;
};

/// Splits F(., X) = F(0, X) + sum grad F dX + A and audits A for up-moves above
/// noise_scale * sqrt(dt).
DoobMeyerResult doob_meyer_extract(const PathFunctional& f, const DiscretePath& x,
                                   double noise_scale, std::optional<double> h = std::nullopt);

}  // namespace dlab
