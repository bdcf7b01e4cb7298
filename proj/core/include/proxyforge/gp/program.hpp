#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "proxyforge/gp/tree.hpp"
#include "proxyforge/random.hpp"

namespace proxyforge::gp {

/// Protected primitive semantics shared by the compiled program and tests.
namespace protected_ops {
double div(double a, double b);
double rec(double a);
double exp(double a);
double ln(double a);
double sqrt(double a);
double sin(double a);
double cos(double a);
double round(double a);
}  // namespace protected_ops

/// A type-checked tree compiled to postfix code for a fixed dimension.
///
/// Evaluation runs the whole batch one instruction at a time, so each
/// primitive becomes a tight loop over all points. Scratch space is
/// thread-local; a Program may be shared between threads.
class Program {
public:
    /// Throws std::invalid_argument when the tree does not type-check.
    Program(const ExpressionTree& tree, std::size_t dim);

    std::size_t dim() const { return dim_; }
    bool uses_rand() const { return uses_rand_; }

    /// One value per row of X. `rand` draws from noise, point by point.
    std::vector<double> evaluate_batch(const Eigen::MatrixXd& X, RandomStream& noise) const;
    /// Same, for n points stored row-major.
    void evaluate_rows(const double* rows, std::size_t n, RandomStream& noise, double* out) const;
    double evaluate(std::span<const double> x, RandomStream& noise) const;

private:
    struct Instr {
        Op op;
        ValueType type;  // output type
        ValueType left;  // first operand type (binary/unary)
        ValueType right;
        double value;
    };

    std::vector<Instr> code_;
    std::size_t dim_;
    std::size_t max_stack_ = 0;
    bool uses_rand_ = false;
};

}  // namespace proxyforge::gp
