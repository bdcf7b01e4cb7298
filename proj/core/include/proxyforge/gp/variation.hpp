#pragma once

#include <utility>
#include <vector>

#include "proxyforge/gp/tree.hpp"
#include "proxyforge/random.hpp"

namespace proxyforge::gp {

inline constexpr int kDefaultMinDepth = 3;
inline constexpr int kDefaultMaxDepth = 12;
inline constexpr double kConstantLow = -10.0;
inline constexpr double kConstantHigh = 10.0;

struct PrimitiveSet {
    /// When false, `rand` is never generated (fully deterministic proxies).
    bool use_rand = true;
};

/// Full rule: every leaf sits exactly at `height`.
std::vector<Node> generate_full(int height, ValueType type, const PrimitiveSet& set, RandomStream& rng);

/// Grow rule: terminals may appear from `min_leaf_depth` on; every branch
/// stops at `height` at the latest.
std::vector<Node> generate_grow(int height, int min_leaf_depth, ValueType type, const PrimitiveSet& set,
                                RandomStream& rng);

/// Ramped half-and-half: per individual a target height uniform in
/// [min_depth, max_depth] and a fair coin between Full and Grow.
std::vector<ExpressionTree> init_half_and_half(std::size_t n_pop, int min_depth, int max_depth, RandomStream& rng,
                                               const PrimitiveSet& set = {});

/// One-point crossover between same-typed subtrees. An offspring that would
/// leave [min_depth, max_depth] is replaced by its parent.
std::pair<ExpressionTree, ExpressionTree> crossover_one_point(const ExpressionTree& a, const ExpressionTree& b,
                                                              int min_depth, int max_depth, RandomStream& rng);

inline constexpr int kDefaultMutationHeight = 2;

/// Subtree mutation: a random node is replaced by a grown subtree of the
/// same type whose height is uniform in [0, min(subtree_height, max_depth -
/// node depth)]. A constant node instead gets a freshly sampled value.
/// Returns the parent unchanged when the result would violate the depth
/// bounds.
ExpressionTree mutate_subtree(const ExpressionTree& tree, int min_depth, int max_depth, RandomStream& rng,
                              const PrimitiveSet& set = {}, int subtree_height = kDefaultMutationHeight);

}  // namespace proxyforge::gp
