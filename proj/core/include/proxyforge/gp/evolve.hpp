#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "proxyforge/ela/distribution.hpp"
#include "proxyforge/gp/tree.hpp"
#include "proxyforge/gp/variation.hpp"
#include "proxyforge/problem.hpp"

namespace proxyforge::gp {

inline constexpr double kPenalty = 1e9;
inline constexpr double kConstantOutputRange = 1e-12;
/// Minimum rank correlation between two noise realizations of a tree that
/// uses `rand` for it to be extracted as a proxy.
inline constexpr double kMinNoiseReplicaCorrelation = 0.5;
inline constexpr std::uint64_t kReplicaStream = 0x7265706c;
/// Relative fitness gap below which top_k treats two trees as the same function.
inline constexpr double kSameFitnessTolerance = 1e-6;

/// Spearman rank correlation (average ranks for ties); 0 when either
/// input is constant.
double spearman(std::span<const double> a, std::span<const double> b);

struct GpParams {
    std::size_t n_pop = 50;
    std::size_t n_gen = 50;
    double p_c = 0.5;
    double p_m = 0.1;
    int min_depth = kDefaultMinDepth;
    int max_depth = kDefaultMaxDepth;
    int mutation_height = kDefaultMutationHeight;
    std::size_t tournament_k = 3;
    std::size_t top_k = 3;
    bool use_rand = true;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

/// Landscape distance between a tree's feature distribution and the target,
/// both measured on the same design and subsamples.
class FitnessFunction {
public:
    FitnessFunction(const ela::LandscapeContext& context, const ela::FeatureDistribution& target);

    struct Evaluation {
        double fitness = kPenalty;
        /// Spearman correlation between the outputs under two noise
        /// realizations; 1 for trees without `rand`.
        double replica_correlation = 1.0;
    };

    /// Fitness is kPenalty when the tree ignores x or its outputs are
    /// non-finite or constant.
    Evaluation evaluate(const ExpressionTree& tree, RandomStream& noise) const;
    double operator()(const ExpressionTree& tree, RandomStream& noise) const;
    double score_values(std::span<const double> y) const;

    const ela::LandscapeContext& context() const { return context_; }
    const ela::FeatureDistribution& target() const { return target_; }

private:
    const ela::LandscapeContext& context_;
    const ela::FeatureDistribution& target_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows_;
};

/// Noise stream used when scoring `tree` in a run whose evaluation seed is
/// `eval_seed`; keyed by the tree text so scores do not depend on
/// evaluation order.
RandomStream fitness_noise(std::uint64_t eval_seed, const ExpressionTree& tree);

struct ProxyCandidate {
    ExpressionTree tree;
    double fitness = kPenalty;
    bool valid = false;
    double replica_correlation = 1.0;
};

struct EvolveResult {
    /// Final population, ascending by fitness.
    std::vector<ProxyCandidate> population;
    /// Every distinct tree ever scored, ascending by fitness.
    std::vector<ProxyCandidate> archive;
    /// Best archive fitness after initialization and after each generation.
    std::vector<double> best_curve;
    double initial_median = kPenalty;
    std::uint64_t eval_seed = 0;
};

/// Generational GP: tournament selection, one-point crossover, subtree
/// mutation and top-1 elitism. Throws NoValidCandidate when every scored
/// tree was penalized.
EvolveResult evolve(const FitnessFunction& fitness, const GpParams& params, RandomStream& rng);

/// The k best valid, not noise-dominated candidates with pairwise distinct
/// skeletons and fitness values more than kSameFitnessTolerance apart (equal
/// fitness on a paired design almost always means the same function
/// written differently).
std::vector<ProxyCandidate> top_k(const std::vector<ProxyCandidate>& ranked, std::size_t k);

/// Cheap objective built from a tree over the target's box. Non-finite
/// outputs are reported as 1e300 so traces stay finite.
ProblemSpec make_proxy_problem(const ExpressionTree& tree, const ProblemSpec& target, std::string name);

}  // namespace proxyforge::gp
