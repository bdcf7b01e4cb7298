#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxyforge/designer/session.hpp"
#include "proxyforge/ela/distribution.hpp"
#include "proxyforge/gp/evolve.hpp"
#include "proxyforge/problem.hpp"

namespace proxyforge::designer {

struct ElaSettings {
    std::size_t coef_ela = ela::kDefaultCoefEla;
    double rate_ela = ela::kDefaultRateEla;
    std::size_t n_ela = ela::kDefaultNEla;
    double threshold_corr = ela::kDefaultThresholdCorr;
};

/// Landscape of the target on its design sample, together with the
/// synthetic pool measured on the same points.
struct Characterization {
    std::string problem;
    std::uint64_t seed = 0;
    ElaSettings settings;
    ela::DesignSample design;
    std::shared_ptr<const ela::LandscapeContext> context;
    ela::FeatureDistribution target;
    /// (name, distribution) of each synthetic instance, in suite order.
    std::vector<std::pair<std::string, ela::FeatureDistribution>> pool;
    /// Instance seed of the pool; differs from the target's seed.
    std::uint64_t pool_seed = 0;
    BudgetLedger ledger;

    /// Distance from the target to every pool entry, in pool order.
    std::vector<double> pool_distances() const;

    nlohmann::json to_json() const;
    static Characterization from_json(const nlohmann::json& j);
};

/// Pool instance of a synthetic function for a given dimension.
ProblemSpec pool_instance(const std::string& function_id, std::size_t dim, std::uint64_t pool_seed);

/// Samples the target design, characterizes the target and the synthetic
/// pool on the same subsamples and prunes correlated features over all of
/// them. Synthetic instances see the design mapped affinely onto their box.
Characterization characterize(const ProblemSpec& target, const ElaSettings& settings, std::uint64_t seed);

struct ProxyGeneration {
    gp::EvolveResult evolution;
    std::vector<gp::ProxyCandidate> top;
    BudgetLedger ledger;
};

/// Runs the GP against the target distribution and keeps the top-k trees.
ProxyGeneration generate_proxies(const Characterization& characterization, const gp::GpParams& params,
                                 std::uint64_t seed);

/// Evaluations spent on locating the optimum of a proxy for calibration.
inline constexpr std::size_t kCalibrationBudgetPerDim = 2000;

/// Monotone map from a proxy's values onto the target's value scale,
/// fitted on a design shared by both. Inside the design range the map
/// matches empirical quantiles. Below the proxy's design minimum the
/// remaining gap to the proxy optimum is mapped proportionally onto the gap
/// between the target's design minimum and the target optimum. Above the
/// range it saturates at the target's design maximum.
class ValueCalibration {
public:
    ValueCalibration(std::vector<double> proxy_y, std::vector<double> target_y, double proxy_optimum,
                     double target_optimum);

    double operator()(double v) const;

    double proxy_optimum() const { return proxy_opt_; }
    double target_optimum() const { return target_opt_; }

private:
    std::vector<double> knots_p_;
    std::vector<double> knots_t_;
    double proxy_opt_;
    double target_opt_;
};

/// Wraps `proxy` so it reports values on the target's scale; the result
/// takes over the target's AOCC settings (known optimum and scale).
ProblemSpec calibrate_to_target(ProblemSpec proxy, ValueCalibration calibration, const ProblemSpec& target);

/// GP proxy on the target's box, calibrated against the target's design
/// values. Its optimum is the best of the design and an LSHADE run of
/// kCalibrationBudgetPerDim * D evaluations, charged as generation-phase
/// proxy evaluations.
ProblemSpec calibrated_proxy(const gp::ExpressionTree& tree, const ProblemSpec& target,
                             const ela::DesignSample& design, const std::string& name, std::uint64_t seed,
                             BudgetLedger* ledger);

/// Top-k synthetic instances ranked by landscape distance to the target,
/// calibrated like the GP proxies (their known optimum is exact).
std::vector<ProblemSpec> benchmark_proxies(const Characterization& characterization, const ProblemSpec& target,
                                           std::size_t k);

/// Objectives a discovery session of the given condition optimizes.
/// `proxies` is required for the proxy-driven condition.
std::vector<ProblemSpec> session_objectives(Condition condition, const ProblemSpec& target,
                                            const Characterization* characterization,
                                            const std::vector<gp::ExpressionTree>* proxies, std::size_t k,
                                            std::uint64_t seed, BudgetLedger* ledger);

}  // namespace proxyforge::designer
