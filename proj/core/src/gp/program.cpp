#include "proxyforge/gp/program.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace proxyforge::gp {

namespace protected_ops {

constexpr double kDivGuard = 1e-9;
constexpr double kExpCap = 50.0;
constexpr double kLnGuard = 1e-12;

double div(double a, double b) { return std::abs(b) > kDivGuard ? a / b : 1.0; }
double rec(double a) { return std::abs(a) > kDivGuard ? 1.0 / a : 1.0; }
double exp(double a) { return std::exp(std::min(a, kExpCap)); }
double ln(double a) { return std::abs(a) < kLnGuard ? 0.0 : std::log(std::abs(a)); }
double sqrt(double a) { return std::sqrt(std::abs(a)); }
double sin(double a) { return std::sin(2.0 * std::numbers::pi * a); }
double cos(double a) { return std::cos(2.0 * std::numbers::pi * a); }
double round(double a) { return std::ceil(a); }

}  // namespace protected_ops

namespace {

template <typename F>
void binary_apply(double* a, ValueType ta, const double* b, ValueType tb, std::size_t n, std::size_t d, F f) {
    if (ta == ValueType::scalar && tb == ValueType::scalar) {
        for (std::size_t i = 0; i < n; ++i) a[i] = f(a[i], b[i]);
    } else if (ta == ValueType::vector && tb == ValueType::vector) {
        for (std::size_t i = 0; i < n * d; ++i) a[i] = f(a[i], b[i]);
    } else if (ta == ValueType::vector) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) a[i * d + j] = f(a[i * d + j], b[i]);
    } else {
        // Scalar left operand lifted to a vector; expand backwards so the
        // scalars are read before being overwritten.
        for (std::size_t i = n; i-- > 0;) {
            const double s = a[i];
            for (std::size_t j = d; j-- > 0;) a[i * d + j] = f(s, b[i * d + j]);
        }
    }
}

template <typename F>
void unary_apply(double* a, std::size_t len, F f) {
    for (std::size_t i = 0; i < len; ++i) a[i] = f(a[i]);
}

template <typename F>
void reduce_apply(double* a, std::size_t n, std::size_t d, F f) {
    for (std::size_t i = 0; i < n; ++i) a[i] = f(a + i * d, d);
}

}  // namespace

Program::Program(const ExpressionTree& tree, std::size_t dim) : dim_(dim) {
    if (dim == 0) throw std::invalid_argument("Program: dimension must be positive");
    auto types = tree.types();
    if (!types || types->empty() || types->front() != ValueType::scalar)
        throw std::invalid_argument("Program: tree does not type-check: " + tree.to_string());
    const auto& nodes = tree.nodes();
    std::vector<ValueType> stack;
    std::size_t depth = 0;
    for (std::size_t k = nodes.size(); k-- > 0;) {
        Instr ins{nodes[k].op, (*types)[k], ValueType::scalar, ValueType::scalar, nodes[k].value};
        const int arity = info(nodes[k].op).arity;
        if (arity == 2) {
            // Postfix from a reversed prefix walk: the first child is on top.
            ins.left = stack[stack.size() - 1];
            ins.right = stack[stack.size() - 2];
        } else if (arity == 1) {
            ins.left = stack.back();
        }
        for (int c = 0; c < arity; ++c) stack.pop_back();
        stack.push_back(ins.type);
        depth = std::max(depth, stack.size());
        if (ins.op == Op::rand) uses_rand_ = true;
        code_.push_back(ins);
    }
    max_stack_ = depth;
}

void Program::evaluate_rows(const double* rows, std::size_t n, RandomStream& noise, double* out) const {
    const std::size_t d = dim_;
    const std::size_t slot = n * d;
    thread_local std::vector<double> scratch;
    if (scratch.size() < max_stack_ * slot) scratch.resize(max_stack_ * slot);
    std::size_t top = 0;  // number of occupied slots
    auto at = [&](std::size_t s) { return scratch.data() + s * slot; };

    for (const Instr& ins : code_) {
        switch (ins.op) {
            case Op::constant:
                std::fill_n(at(top++), n, ins.value);
                continue;
            case Op::rand: {
                double* p = at(top++);
                for (std::size_t i = 0; i < n; ++i) p[i] = noise.uniform();
                continue;
            }
            case Op::index: {
                double* p = at(top++);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < d; ++j) p[i * d + j] = static_cast<double>(j + 1);
                continue;
            }
            case Op::x:
                std::copy_n(rows, slot, at(top++));
                continue;
            default:
                break;
        }

        const int arity = info(ins.op).arity;
        if (arity == 2) {
            // The first operand sits on top of the stack.
            double* first = at(top - 1);
            double* second = at(top - 2);
            double* a = first;
            const double* b = second;
            switch (ins.op) {
                case Op::add:
                    binary_apply(a, ins.left, b, ins.right, n, d, [](double u, double v) { return u + v; });
                    break;
                case Op::sub:
                    binary_apply(a, ins.left, b, ins.right, n, d, [](double u, double v) { return u - v; });
                    break;
                case Op::mul:
                    binary_apply(a, ins.left, b, ins.right, n, d, [](double u, double v) { return u * v; });
                    break;
                case Op::div:
                    binary_apply(a, ins.left, b, ins.right, n, d, protected_ops::div);
                    break;
                default:
                    break;
            }
            // Result belongs in the lower slot.
            const std::size_t len = ins.type == ValueType::vector ? slot : n;
            std::copy_n(a, len, second);
            --top;
            continue;
        }

        double* a = at(top - 1);
        const std::size_t len = ins.left == ValueType::vector ? slot : n;
        switch (ins.op) {
            case Op::neg: unary_apply(a, len, [](double u) { return -u; }); break;
            case Op::rec: unary_apply(a, len, protected_ops::rec); break;
            case Op::multen: unary_apply(a, len, [](double u) { return 10.0 * u; }); break;
            case Op::square: unary_apply(a, len, [](double u) { return u * u; }); break;
            case Op::abs: unary_apply(a, len, [](double u) { return std::abs(u); }); break;
            case Op::sqrt: unary_apply(a, len, protected_ops::sqrt); break;
            case Op::exp: unary_apply(a, len, protected_ops::exp); break;
            case Op::ln: unary_apply(a, len, protected_ops::ln); break;
            case Op::sin: unary_apply(a, len, protected_ops::sin); break;
            case Op::cos: unary_apply(a, len, protected_ops::cos); break;
            case Op::round: unary_apply(a, len, protected_ops::round); break;
            case Op::sum:
                reduce_apply(a, n, d, [](const double* v, std::size_t m) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < m; ++j) s += v[j];
                    return s;
                });
                break;
            case Op::mean:
                reduce_apply(a, n, d, [](const double* v, std::size_t m) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < m; ++j) s += v[j];
                    return s / static_cast<double>(m);
                });
                break;
            case Op::prod:
                reduce_apply(a, n, d, [](const double* v, std::size_t m) {
                    double s = 1.0;
                    for (std::size_t j = 0; j < m; ++j) s *= v[j];
                    return s;
                });
                break;
            case Op::max:
                reduce_apply(a, n, d, [](const double* v, std::size_t m) { return *std::max_element(v, v + m); });
                break;
            case Op::cum:
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 1; j < d; ++j) a[i * d + j] += a[i * d + j - 1];
                break;
            default:
                break;
        }
    }
    std::copy_n(at(0), n, out);
}

std::vector<double> Program::evaluate_batch(const Eigen::MatrixXd& X, RandomStream& noise) const {
    if (static_cast<std::size_t>(X.cols()) != dim_) throw std::invalid_argument("Program: dimension mismatch");
    const auto n = static_cast<std::size_t>(X.rows());
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = X;
    std::vector<double> out(n);
    evaluate_rows(rows.data(), n, noise, out.data());
    return out;
}

double Program::evaluate(std::span<const double> x, RandomStream& noise) const {
    if (x.size() != dim_) throw std::invalid_argument("Program: dimension mismatch");
    double out = 0.0;
    evaluate_rows(x.data(), 1, noise, &out);
    return out;
}

}  // namespace proxyforge::gp
