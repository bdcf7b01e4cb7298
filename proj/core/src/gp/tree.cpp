#include "proxyforge/gp/tree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

#include "proxyforge/errors.hpp"

namespace proxyforge::gp {

namespace {

std::string format_constant(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::vector<Node> parse() {
        std::vector<Node> nodes;
        parse_node(nodes);
        skip_space();
        if (pos_ != text_.size()) fail("trailing characters");
        return nodes;
    }

private:
    void parse_node(std::vector<Node>& out) {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);
        if (name.empty()) fail("expected a primitive name");
        if (name == "a") {
            skip_space();
            expect('=');
            skip_space();
            std::size_t num_start = pos_;
            while (pos_ < text_.size() && std::string_view("+-.0123456789eEinfINFa").find(text_[pos_]) != std::string_view::npos)
                ++pos_;
            double v = 0.0;
            auto res = std::from_chars(text_.data() + num_start, text_.data() + pos_, v);
            if (res.ec != std::errc() || res.ptr != text_.data() + pos_) fail("bad constant");
            out.push_back({Op::constant, v});
            return;
        }
        auto op = op_from_name(name);
        if (!op || *op == Op::constant) fail("unknown primitive '" + std::string(name) + "'");
        out.push_back({*op, 0.0});
        const int arity = info(*op).arity;
        if (arity == 0) return;
        skip_space();
        expect('(');
        for (int k = 0; k < arity; ++k) {
            if (k > 0) {
                skip_space();
                expect(',');
            }
            parse_node(out);
        }
        skip_space();
        expect(')');
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void write(const std::vector<Node>& nodes, std::size_t& i, std::string& out, bool hide_constants) {
    const Node& n = nodes[i++];
    if (n.op == Op::constant) {
        out += hide_constants ? "a" : "a=" + format_constant(n.value);
        return;
    }
    const auto& pi = info(n.op);
    out += pi.name;
    if (pi.arity == 0) return;
    out += '(';
    for (int k = 0; k < pi.arity; ++k) {
        if (k > 0) out += ", ";
        write(nodes, i, out, hide_constants);
    }
    out += ')';
}

}  // namespace

const std::vector<PrimitiveInfo>& primitive_catalog() {
    static const std::vector<PrimitiveInfo> catalog = {
        {Op::constant, "a", 0, Category::number},        {Op::rand, "rand", 0, Category::number},
        {Op::index, "index", 0, Category::variable},     {Op::x, "x", 0, Category::variable},
        {Op::add, "add", 2, Category::binary},           {Op::sub, "sub", 2, Category::binary},
        {Op::mul, "mul", 2, Category::binary},           {Op::div, "div", 2, Category::binary},
        {Op::neg, "neg", 1, Category::unary},            {Op::rec, "rec", 1, Category::unary},
        {Op::multen, "multen", 1, Category::unary},      {Op::square, "square", 1, Category::unary},
        {Op::abs, "abs", 1, Category::unary},            {Op::sqrt, "sqrt", 1, Category::unary},
        {Op::exp, "exp", 1, Category::unary},            {Op::ln, "ln", 1, Category::unary},
        {Op::sin, "sin", 1, Category::unary},            {Op::cos, "cos", 1, Category::unary},
        {Op::round, "round", 1, Category::unary},        {Op::sum, "sum", 1, Category::vector_oriented},
        {Op::mean, "mean", 1, Category::vector_oriented}, {Op::cum, "cum", 1, Category::vector_oriented},
        {Op::prod, "prod", 1, Category::vector_oriented}, {Op::max, "max", 1, Category::vector_oriented},
    };
    return catalog;
}

const PrimitiveInfo& info(Op op) { return primitive_catalog()[static_cast<std::size_t>(op)]; }

std::optional<Op> op_from_name(std::string_view name) {
    for (const auto& p : primitive_catalog())
        if (p.name == name) return p.op;
    return std::nullopt;
}

std::optional<ValueType> result_type(Op op, std::span<const ValueType> children) {
    const auto& pi = info(op);
    if (static_cast<int>(children.size()) != pi.arity) return std::nullopt;
    switch (pi.category) {
        case Category::number:
            return ValueType::scalar;
        case Category::variable:
            return ValueType::vector;
        case Category::binary:
            return (children[0] == ValueType::vector || children[1] == ValueType::vector) ? ValueType::vector
                                                                                           : ValueType::scalar;
        case Category::unary:
            return children[0];
        case Category::vector_oriented:
            if (children[0] != ValueType::vector) return std::nullopt;
            return op == Op::cum ? ValueType::vector : ValueType::scalar;
    }
    return std::nullopt;
}

ExpressionTree::ExpressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw ParseError("empty expression tree");
    // A prefix sequence is one tree iff the open-slot count reaches zero
    // exactly at the last node.
    long open = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (open <= 0) throw ParseError("extra nodes after a complete tree");
        open += info(nodes_[i].op).arity - 1;
    }
    if (open != 0) throw ParseError("incomplete expression tree");
}

std::size_t ExpressionTree::subtree_end(std::size_t i) const {
    long open = 1;
    std::size_t j = i;
    while (open > 0) {
        open += info(nodes_[j].op).arity - 1;
        ++j;
    }
    return j;
}

std::vector<int> ExpressionTree::depths() const {
    std::vector<int> depth(nodes_.size(), 0);
    // Stack of (depth, remaining child slots).
    std::vector<std::pair<int, int>> stack;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        int d = stack.empty() ? 0 : stack.back().first + 1;
        depth[i] = d;
        if (!stack.empty() && --stack.back().second == 0) stack.pop_back();
        int arity = info(nodes_[i].op).arity;
        if (arity > 0) stack.push_back({d, arity});
        while (!stack.empty() && stack.back().second == 0) stack.pop_back();
    }
    return depth;
}

int ExpressionTree::height() const {
    auto d = depths();
    return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

std::optional<std::vector<ValueType>> ExpressionTree::types() const {
    std::vector<ValueType> out(nodes_.size());
    std::vector<ValueType> stack;
    for (std::size_t k = nodes_.size(); k-- > 0;) {
        const int arity = info(nodes_[k].op).arity;
        ValueType children[2];
        for (int c = 0; c < arity; ++c) {
            children[c] = stack.back();
            stack.pop_back();
        }
        auto t = result_type(nodes_[k].op, std::span<const ValueType>(children, static_cast<std::size_t>(arity)));
        if (!t) return std::nullopt;
        out[k] = *t;
        stack.push_back(*t);
    }
    return out;
}

bool ExpressionTree::type_check() const {
    if (nodes_.empty()) return false;
    auto t = types();
    return t && t->front() == ValueType::scalar;
}

bool ExpressionTree::uses_rand() const {
    return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.op == Op::rand; });
}

bool ExpressionTree::uses_x() const {
    return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.op == Op::x; });
}

ExpressionTree ExpressionTree::replace_subtree(std::size_t i, std::span<const Node> replacement) const {
    std::vector<Node> out;
    out.reserve(nodes_.size() + replacement.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<long>(i));
    out.insert(out.end(), replacement.begin(), replacement.end());
    out.insert(out.end(), nodes_.begin() + static_cast<long>(subtree_end(i)), nodes_.end());
    return ExpressionTree(std::move(out));
}

std::span<const Node> ExpressionTree::subtree(std::size_t i) const {
    return std::span<const Node>(nodes_).subspan(i, subtree_end(i) - i);
}

std::string ExpressionTree::to_string() const {
    std::string out;
    std::size_t i = 0;
    if (!nodes_.empty()) write(nodes_, i, out, false);
    return out;
}

std::string ExpressionTree::skeleton() const {
    std::string out;
    std::size_t i = 0;
    if (!nodes_.empty()) write(nodes_, i, out, true);
    return out;
}

ExpressionTree ExpressionTree::parse(std::string_view text) { return ExpressionTree(Parser(text).parse()); }

}  // namespace proxyforge::gp
