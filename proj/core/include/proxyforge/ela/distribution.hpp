#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "proxyforge/ela/design.hpp"
#include "proxyforge/ela/features.hpp"

namespace proxyforge::ela {

inline constexpr double kDefaultRateEla = 0.8;
inline constexpr std::size_t kDefaultNEla = 5;
inline constexpr double kDefaultThresholdCorr = 0.9;

/// Row indices (sorted) of each subsample drawn from a design.
struct SubsamplePlan {
    std::size_t design_size = 0;
    std::vector<std::vector<std::size_t>> subsets;
};

/// n_ela subsamples of size round(rate * n), each without replacement.
SubsamplePlan draw_subsample_plan(std::size_t n, double rate, std::size_t n_ela, RandomStream& rng);

/// A fixed design X together with a subsample plan and the prepared
/// geometry of every subsample. Any function evaluated on X can then be
/// characterized on exactly the same subsamples, which keeps the
/// comparison between a target and its candidates paired.
class LandscapeContext {
public:
    LandscapeContext(Eigen::MatrixXd X, SubsamplePlan plan);

    const Eigen::MatrixXd& X() const { return X_; }
    const SubsamplePlan& plan() const { return plan_; }
    std::size_t repetitions() const { return plan_.subsets.size(); }
    const SubsampleGeometry& geometry(std::size_t r) const { return *geometries_[r]; }

    /// Raw features of y restricted to every subsample (may hold non-finite
    /// values). Throws DegenerateSample when y is constant on a subsample.
    std::vector<FeatureVector> features(std::span<const double> y) const;

private:
    Eigen::MatrixXd X_;
    SubsamplePlan plan_;
    std::vector<std::unique_ptr<SubsampleGeometry>> geometries_;
};

/// Per-feature empirical samples (one per subsample) of a single function.
struct FeatureDistribution {
    /// samples[f][r]: feature f (feature_names() order) on subsample r.
    std::vector<std::vector<double>> samples;
    std::vector<std::string> retained;
    std::size_t coef_ela = kDefaultCoefEla;
    double rate_ela = kDefaultRateEla;
    std::size_t n_ela = kDefaultNEla;
    std::uint64_t sampler_seed = 0;

    const std::vector<double>& samples_of(std::string_view feature) const;
    std::size_t repetitions() const { return samples.empty() ? 0 : samples.front().size(); }

    nlohmann::json to_json() const;
    static FeatureDistribution from_json(const nlohmann::json& j);
};

/// Value substituted for a non-finite feature when no finite reference exists.
inline constexpr double kImputationSentinel = 1e6;

/// Replaces non-finite values of every distribution in the pool with the
/// worst finite value of that feature across the pool, i.e. the finite
/// value farthest from the pooled median.
void impute_non_finite(std::span<FeatureDistribution* const> pool);

/// Distribution of y over the context's subsamples. Non-finite features are
/// imputed against this distribution plus `reference` (if given). The
/// retained list is copied from the reference, or holds every feature.
FeatureDistribution feature_distribution(const LandscapeContext& context, std::span<const double> y,
                                         const FeatureDistribution* reference = nullptr);

/// Draws the subsample plan from rng and characterizes the design sample.
FeatureDistribution feature_distribution(const DesignSample& sample, double rate_ela, std::size_t n_ela,
                                         RandomStream& rng);

/// Greedy forward pruning over `candidates` in order: a feature is kept
/// unless its absolute Pearson correlation with an already kept feature
/// exceeds the threshold. Correlation uses the pooled per-subsample rows of
/// every distribution. Throws EmptyRetention when nothing survives.
std::vector<std::string> prune_correlated(std::span<const FeatureDistribution* const> dists, double threshold_corr,
                                          const std::vector<std::string>& candidates);
std::vector<std::string> prune_correlated(std::span<const FeatureDistribution* const> dists,
                                          double threshold_corr = kDefaultThresholdCorr);

/// Sets the retained list after checking that every name is a known feature.
void apply_retained(FeatureDistribution& dist, const std::vector<std::string>& retained);

/// Mean over retained features of the 1-Wasserstein distance between the
/// per-feature samples, z-scored with the pooled mean and sd of both.
/// Throws FeatureMismatch when the retained lists differ.
double landscape_distance(const FeatureDistribution& p, const FeatureDistribution& q);

}  // namespace proxyforge::ela
