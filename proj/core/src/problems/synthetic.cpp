#include "proxyforge/problems/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "proxyforge/errors.hpp"

namespace proxyforge::problems {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
}

double rastrigin(std::span<const double> z) {
    double s = 10.0 * static_cast<double>(z.size());
    for (double v : z) s += v * v - 10.0 * std::cos(2.0 * kPi * v);
    return s;
}

// Optimum moved from (1,...,1) to the origin of z.
double rosenbrock(std::span<const double> z) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        double a = z[i] + 1.0;
        double b = z[i + 1] + 1.0;
        s += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
    }
    return s;
}

// Schwefel 1.2 (double sum).
double schwefel(std::span<const double> z) {
    double s = 0.0;
    double prefix = 0.0;
    for (double v : z) {
        prefix += v;
        s += prefix * prefix;
    }
    return s;
}

double griewank(std::span<const double> z) {
    double s = 0.0;
    double p = 1.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        s += z[i] * z[i] / 4000.0;
        p *= std::cos(z[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return s - p + 1.0;
}

double ackley(std::span<const double> z) {
    const double d = static_cast<double>(z.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double v : z) {
        sq += v * v;
        cs += std::cos(2.0 * kPi * v);
    }
    if (sq == 0.0) return 0.0;
    double value = -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) + 20.0 + std::numbers::e;
    return std::max(value, 0.0);
}

double weierstrass(std::span<const double> z) {
    constexpr double a = 0.5;
    constexpr double b = 3.0;
    constexpr int kmax = 20;
    double offset = 0.0;
    for (int k = 0; k <= kmax; ++k) offset += std::pow(a, k) * std::cos(kPi * std::pow(b, k));
    double s = 0.0;
    for (double v : z) {
        double inner = 0.0;
        for (int k = 0; k <= kmax; ++k) inner += std::pow(a, k) * std::cos(2.0 * kPi * std::pow(b, k) * (v + 0.5));
        s += inner - offset;
    }
    return s;
}

}  // namespace

const std::vector<std::string>& synthetic_function_ids() {
    static const std::vector<std::string> ids = {"sphere",   "rastrigin", "rosenbrock",  "schwefel",
                                                 "griewank", "ackley",    "weierstrass", "linear-slope"};
    return ids;
}

SyntheticInstance synthetic_instance(std::string_view function_id, std::size_t dim, std::uint64_t seed) {
    const auto& ids = synthetic_function_ids();
    auto it = std::find(ids.begin(), ids.end(), function_id);
    if (it == ids.end())
        throw UnknownFunctionId("unknown synthetic function '" + std::string(function_id) + "'");
    if (dim < 1) throw InvalidProblem("synthetic dim must be >= 1");

    SyntheticInstance inst;
    inst.function_id = std::string(function_id);
    inst.dim = dim;
    RandomStream rng(seed, mix_seed(static_cast<std::uint64_t>(it - ids.begin()), dim));
    inst.shift.resize(dim);
    if (function_id == "linear-slope") {
        // The optimum of a linear slope sits on a corner of the box.
        for (auto& s : inst.shift) s = rng.bernoulli(0.5) ? kSyntheticUpper : kSyntheticLower;
    } else {
        // Keep the optimum away from the faces so the funnel is visible.
        for (auto& s : inst.shift) s = rng.uniform(0.8 * kSyntheticLower, 0.8 * kSyntheticUpper);
    }
    inst.known_optimum = 0.0;
    return inst;
}

double evaluate_synthetic(const SyntheticInstance& inst, std::span<const double> x) {
    const std::size_t d = inst.dim;
    if (inst.function_id == "linear-slope") {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double mag = d > 1 ? std::pow(10.0, static_cast<double>(i) / static_cast<double>(d - 1)) : 1.0;
            double sign = inst.shift[i] > 0 ? 1.0 : -1.0;
            double si = sign * mag;
            double zi = (inst.shift[i] * x[i] < 25.0) ? x[i] : inst.shift[i];
            s += 5.0 * mag - si * zi;
        }
        return s;
    }

    std::vector<double> z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = x[i] - inst.shift[i];
    const auto& id = inst.function_id;
    if (id == "sphere") return sphere(z);
    if (id == "rastrigin") return rastrigin(z);
    if (id == "rosenbrock") return rosenbrock(z);
    if (id == "schwefel") return schwefel(z);
    if (id == "griewank") return griewank(z);
    if (id == "ackley") return ackley(z);
    return weierstrass(z);
}

ProblemSpec to_problem(SyntheticInstance instance) {
    ProblemSpec p;
    p.name = "synthetic:" + instance.function_id + ":" + std::to_string(instance.dim);
    p.dim = instance.dim;
    p.lower_bounds.assign(instance.dim, kSyntheticLower);
    p.upper_bounds.assign(instance.dim, kSyntheticUpper);
    p.known_optimum = instance.known_optimum;
    p.objective = [inst = std::move(instance)](std::span<const double> x, RandomStream&) {
        return evaluate_synthetic(inst, x);
    };
    return p;
}

ProblemSpec synthetic(std::string_view function_id, std::size_t dim, std::uint64_t seed) {
    return to_problem(synthetic_instance(function_id, dim, seed));
}

}  // namespace proxyforge::problems
