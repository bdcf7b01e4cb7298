#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace proxyforge::gp {

enum class Op : std::uint8_t {
    // numbers and decision variables
    constant,
    rand,
    index,
    x,
    // binary
    add,
    sub,
    mul,
    div,
    // unary
    neg,
    rec,
    multen,
    square,
    abs,
    sqrt,
    exp,
    ln,
    sin,
    cos,
    round,
    // vector-oriented
    sum,
    mean,
    cum,
    prod,
    max,
};

enum class ValueType : std::uint8_t { scalar, vector };

enum class Category : std::uint8_t { number, variable, binary, unary, vector_oriented };

struct PrimitiveInfo {
    Op op;
    std::string_view name;
    int arity;
    Category category;
};

/// The 24 primitives, in declaration order of Op.
const std::vector<PrimitiveInfo>& primitive_catalog();
const PrimitiveInfo& info(Op op);
std::optional<Op> op_from_name(std::string_view name);

struct Node {
    Op op = Op::constant;
    double value = 0.0;  // only meaningful for constants
    bool operator==(const Node&) const = default;
};

/// Output type of a node given its children's types, or nullopt when the
/// combination is ill-typed. Binary ops broadcast scalars; sum, mean, prod
/// and max reduce a vector; cum maps a vector to a vector.
std::optional<ValueType> result_type(Op op, std::span<const ValueType> children);

/// Expression tree stored in prefix order.
///
/// Depth follows the usual GP convention: the root is at depth 0 and the
/// height is the largest node depth, so a lone terminal has height 0.
class ExpressionTree {
public:
    ExpressionTree() = default;
    /// Throws ParseError when the prefix sequence does not form one tree.
    explicit ExpressionTree(std::vector<Node> nodes);

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    /// One past the last node of the subtree rooted at i.
    std::size_t subtree_end(std::size_t i) const;
    int height() const;
    std::vector<int> depths() const;
    /// Per-node output types; nullopt if any edge is ill-typed.
    std::optional<std::vector<ValueType>> types() const;
    /// Well-typed with a scalar root.
    bool type_check() const;
    bool uses_rand() const;
    /// True when some node reads the decision vector.
    bool uses_x() const;

    /// Copy with the subtree at i replaced by `replacement`.
    ExpressionTree replace_subtree(std::size_t i, std::span<const Node> replacement) const;
    std::span<const Node> subtree(std::size_t i) const;

    /// Prefix text, e.g. add(sum(square(x)), mul(a=2.5, max(x))).
    std::string to_string() const;
    /// Same text with constant values hidden; equal skeletons mean equal shape.
    std::string skeleton() const;
    static ExpressionTree parse(std::string_view text);

    bool operator==(const ExpressionTree&) const = default;

private:
    std::vector<Node> nodes_;
};

}  // namespace proxyforge::gp
