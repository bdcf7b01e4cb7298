#include "proxyforge/gp/variation.hpp"

#include <algorithm>
#include <stdexcept>

namespace proxyforge::gp {

namespace {

constexpr Op kBinary[] = {Op::add, Op::sub, Op::mul, Op::div};
constexpr Op kUnary[] = {Op::neg, Op::rec,  Op::multen, Op::square, Op::abs, Op::sqrt,
                         Op::exp, Op::ln,   Op::sin,    Op::cos,    Op::round};
constexpr Op kReductions[] = {Op::sum, Op::mean, Op::prod, Op::max};
constexpr std::size_t kNonTerminals = 20;  // binary 4 + unary 11 + vector-oriented 5
constexpr std::size_t kTerminals = 4;

Node terminal(ValueType type, const PrimitiveSet& set, RandomStream& rng) {
    if (type == ValueType::vector) return {rng.bernoulli(0.5) ? Op::x : Op::index, 0.0};
    if (set.use_rand && rng.bernoulli(0.5)) return {Op::rand, 0.0};
    return {Op::constant, rng.uniform(kConstantLow, kConstantHigh)};
}

void build(int depth, int height, int min_leaf_depth, bool full, ValueType type, const PrimitiveSet& set,
           RandomStream& rng, std::vector<Node>& out) {
    bool leaf = depth >= height;
    if (!leaf && !full && depth >= min_leaf_depth) {
        const double p_terminal = static_cast<double>(kTerminals) / static_cast<double>(kTerminals + kNonTerminals);
        leaf = rng.bernoulli(p_terminal);
    }
    if (leaf) {
        out.push_back(terminal(type, set, rng));
        return;
    }

    // Uniform over the non-terminals able to produce `type`.
    if (type == ValueType::scalar) {
        const std::size_t pick = rng.index(std::size(kBinary) + std::size(kUnary) + std::size(kReductions));
        if (pick < std::size(kBinary)) {
            out.push_back({kBinary[pick], 0.0});
            build(depth + 1, height, min_leaf_depth, full, ValueType::scalar, set, rng, out);
            build(depth + 1, height, min_leaf_depth, full, ValueType::scalar, set, rng, out);
        } else if (pick < std::size(kBinary) + std::size(kUnary)) {
            out.push_back({kUnary[pick - std::size(kBinary)], 0.0});
            build(depth + 1, height, min_leaf_depth, full, ValueType::scalar, set, rng, out);
        } else {
            out.push_back({kReductions[pick - std::size(kBinary) - std::size(kUnary)], 0.0});
            build(depth + 1, height, min_leaf_depth, full, ValueType::vector, set, rng, out);
        }
        return;
    }

    const std::size_t pick = rng.index(std::size(kBinary) + std::size(kUnary) + 1);
    if (pick < std::size(kBinary)) {
        out.push_back({kBinary[pick], 0.0});
        // At least one operand must be a vector.
        const std::size_t shape = rng.index(3);
        ValueType first = shape == 1 ? ValueType::scalar : ValueType::vector;
        ValueType second = shape == 2 ? ValueType::scalar : ValueType::vector;
        build(depth + 1, height, min_leaf_depth, full, first, set, rng, out);
        build(depth + 1, height, min_leaf_depth, full, second, set, rng, out);
    } else if (pick < std::size(kBinary) + std::size(kUnary)) {
        out.push_back({kUnary[pick - std::size(kBinary)], 0.0});
        build(depth + 1, height, min_leaf_depth, full, ValueType::vector, set, rng, out);
    } else {
        out.push_back({Op::cum, 0.0});
        build(depth + 1, height, min_leaf_depth, full, ValueType::vector, set, rng, out);
    }
}

/// Candidate crossover points (non-root) of a given type.
std::vector<std::size_t> points_of_type(const std::vector<ValueType>& types, ValueType t) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < types.size(); ++i)
        if (types[i] == t) out.push_back(i);
    return out;
}

bool within_bounds(const ExpressionTree& t, int min_depth, int max_depth) {
    const int h = t.height();
    return h >= min_depth && h <= max_depth;
}

}  // namespace

std::vector<Node> generate_full(int height, ValueType type, const PrimitiveSet& set, RandomStream& rng) {
    std::vector<Node> out;
    build(0, height, height, true, type, set, rng, out);
    return out;
}

std::vector<Node> generate_grow(int height, int min_leaf_depth, ValueType type, const PrimitiveSet& set,
                                RandomStream& rng) {
    std::vector<Node> out;
    build(0, height, min_leaf_depth, false, type, set, rng, out);
    return out;
}

std::vector<ExpressionTree> init_half_and_half(std::size_t n_pop, int min_depth, int max_depth, RandomStream& rng,
                                               const PrimitiveSet& set) {
    if (min_depth < 0 || min_depth > max_depth) throw std::invalid_argument("init_half_and_half: bad depth range");
    std::vector<ExpressionTree> pop;
    pop.reserve(n_pop);
    for (std::size_t i = 0; i < n_pop; ++i) {
        const int height = static_cast<int>(rng.uniform_int(min_depth, max_depth));
        if (rng.bernoulli(0.5))
            pop.emplace_back(generate_full(height, ValueType::scalar, set, rng));
        else
            pop.emplace_back(generate_grow(height, min_depth, ValueType::scalar, set, rng));
    }
    return pop;
}

std::pair<ExpressionTree, ExpressionTree> crossover_one_point(const ExpressionTree& a, const ExpressionTree& b,
                                                              int min_depth, int max_depth, RandomStream& rng) {
    if (a.size() < 2 || b.size() < 2) return {a, b};
    const auto ta = *a.types();
    const auto tb = *b.types();
    const std::size_t i = 1 + rng.index(a.size() - 1);
    const auto matches = points_of_type(tb, ta[i]);
    if (matches.empty()) return {a, b};
    const std::size_t j = matches[rng.index(matches.size())];

    ExpressionTree child_a = a.replace_subtree(i, b.subtree(j));
    ExpressionTree child_b = b.replace_subtree(j, a.subtree(i));
    return {within_bounds(child_a, min_depth, max_depth) ? std::move(child_a) : a,
            within_bounds(child_b, min_depth, max_depth) ? std::move(child_b) : b};
}

ExpressionTree mutate_subtree(const ExpressionTree& tree, int min_depth, int max_depth, RandomStream& rng,
                              const PrimitiveSet& set, int subtree_height) {
    const std::size_t i = rng.index(tree.size());
    if (tree.nodes()[i].op == Op::constant) {
        std::vector<Node> nodes = tree.nodes();
        nodes[i].value = rng.uniform(kConstantLow, kConstantHigh);
        return ExpressionTree(std::move(nodes));
    }
    const int depth = tree.depths()[i];
    const ValueType type = (*tree.types())[i];
    const int room = max_depth - depth;
    if (room < 0) return tree;
    const int height = static_cast<int>(rng.uniform_int(0, std::min(room, subtree_height)));
    auto replacement = generate_grow(height, 0, type, set, rng);
    ExpressionTree child = tree.replace_subtree(i, replacement);
    return within_bounds(child, min_depth, max_depth) ? child : tree;
}

}  // namespace proxyforge::gp
