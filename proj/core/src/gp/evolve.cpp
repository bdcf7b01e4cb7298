#include "proxyforge/gp/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

#include <tbb/parallel_for.h>

#include "proxyforge/errors.hpp"
#include "proxyforge/gp/program.hpp"

namespace proxyforge::gp {

namespace {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

bool ranks_before(const ProxyCandidate& a, const ProxyCandidate& b) { return a.fitness < b.fitness; }

std::size_t tournament(const std::vector<ProxyCandidate>& pop, std::size_t k, RandomStream& rng) {
    std::size_t best = rng.index(pop.size());
    for (std::size_t t = 1; t < k; ++t) {
        std::size_t c = rng.index(pop.size());
        if (pop[c].fitness < pop[best].fitness) best = c;
    }
    return best;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j);
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(ra.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

void GpParams::validate() const {
    if (n_pop < 2) throw std::invalid_argument("n_pop must be >= 2");
    if (!(p_c >= 0.0 && p_c <= 1.0) || !(p_m >= 0.0 && p_m <= 1.0))
        throw std::invalid_argument("p_c and p_m must lie in [0, 1]");
    if (min_depth < 3 || min_depth > max_depth) throw std::invalid_argument("need 3 <= min_depth <= max_depth");
    if (tournament_k < 1) throw std::invalid_argument("tournament_k must be >= 1");
    if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
}

FitnessFunction::FitnessFunction(const ela::LandscapeContext& context, const ela::FeatureDistribution& target)
    : context_(context), target_(target), rows_(context.X()) {}

double FitnessFunction::score_values(std::span<const double> y) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : y) {
        if (!std::isfinite(v)) return kPenalty;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < kConstantOutputRange) return kPenalty;
    try {
        auto dist = ela::feature_distribution(context_, y, &target_);
        double d = ela::landscape_distance(dist, target_);
        return std::isfinite(d) ? d : kPenalty;
    } catch (const DegenerateSample&) {
        return kPenalty;
    }
}

FitnessFunction::Evaluation FitnessFunction::evaluate(const ExpressionTree& tree, RandomStream& noise) const {
    if (!tree.uses_x()) return {kPenalty, 0.0};
    Program program(tree, static_cast<std::size_t>(rows_.cols()));
    std::vector<double> y(static_cast<std::size_t>(rows_.rows()));
    double replica_correlation = 1.0;
    if (tree.uses_rand()) {
        RandomStream replica = noise.derive(kReplicaStream);
        program.evaluate_rows(rows_.data(), y.size(), replica, y.data());
        std::vector<double> y0 = y;
        program.evaluate_rows(rows_.data(), y.size(), noise, y.data());
        replica_correlation = spearman(y0, y);
    } else {
        program.evaluate_rows(rows_.data(), y.size(), noise, y.data());
    }
    return {score_values(y), replica_correlation};
}

double FitnessFunction::operator()(const ExpressionTree& tree, RandomStream& noise) const {
    return evaluate(tree, noise).fitness;
}

RandomStream fitness_noise(std::uint64_t eval_seed, const ExpressionTree& tree) {
    return RandomStream(eval_seed, fnv1a(tree.to_string()));
}

EvolveResult evolve(const FitnessFunction& fitness, const GpParams& params, RandomStream& rng) {
    params.validate();
    const PrimitiveSet set{params.use_rand};
    EvolveResult result;
    result.eval_seed = rng.next_u64();

    std::map<std::string, ProxyCandidate> archive;
    auto score_all = [&](const std::vector<ExpressionTree>& trees) {
        // Score each unseen text once; results merge in a fixed order.
        std::vector<std::string> texts(trees.size());
        std::vector<std::size_t> todo;
        std::set<std::string> queued;
        for (std::size_t i = 0; i < trees.size(); ++i) {
            texts[i] = trees[i].to_string();
            if (!archive.count(texts[i]) && queued.insert(texts[i]).second) todo.push_back(i);
        }
        std::vector<FitnessFunction::Evaluation> scores(todo.size());
        tbb::parallel_for(std::size_t{0}, todo.size(), [&](std::size_t t) {
            RandomStream noise = fitness_noise(result.eval_seed, trees[todo[t]]);
            scores[t] = fitness.evaluate(trees[todo[t]], noise);
        });
        for (std::size_t t = 0; t < todo.size(); ++t) {
            const auto& tree = trees[todo[t]];
            const auto& e = scores[t];
            archive.emplace(texts[todo[t]],
                            ProxyCandidate{tree, e.fitness, e.fitness < kPenalty, e.replica_correlation});
        }
        std::vector<ProxyCandidate> pop;
        pop.reserve(trees.size());
        for (std::size_t i = 0; i < trees.size(); ++i) pop.push_back(archive.at(texts[i]));
        return pop;
    };
    auto archive_best = [&] {
        double best = kPenalty;
        for (const auto& [text, c] : archive) best = std::min(best, c.fitness);
        return best;
    };

    auto pop = score_all(init_half_and_half(params.n_pop, params.min_depth, params.max_depth, rng, set));
    {
        std::vector<double> f;
        for (const auto& c : pop) f.push_back(c.fitness);
        result.initial_median = median(f);
    }
    result.best_curve.push_back(archive_best());

    for (std::size_t gen = 0; gen < params.n_gen; ++gen) {
        const auto elite_it = std::min_element(pop.begin(), pop.end(), ranks_before);
        const ProxyCandidate elite = *elite_it;

        std::vector<ExpressionTree> offspring;
        offspring.reserve(params.n_pop);
        for (std::size_t i = 0; i < params.n_pop; ++i)
            offspring.push_back(pop[tournament(pop, params.tournament_k, rng)].tree);
        for (std::size_t i = 0; i + 1 < offspring.size(); i += 2) {
            if (!rng.bernoulli(params.p_c)) continue;
            auto [a, b] =
                crossover_one_point(offspring[i], offspring[i + 1], params.min_depth, params.max_depth, rng);
            offspring[i] = std::move(a);
            offspring[i + 1] = std::move(b);
        }
        for (auto& child : offspring)
            if (rng.bernoulli(params.p_m)) child = mutate_subtree(child, params.min_depth, params.max_depth, rng, set, params.mutation_height);

        pop = score_all(offspring);
        auto worst = std::max_element(pop.begin(), pop.end(), ranks_before);
        *worst = elite;
        result.best_curve.push_back(archive_best());
    }

    std::stable_sort(pop.begin(), pop.end(), ranks_before);
    result.population = std::move(pop);
    for (auto& [text, c] : archive) result.archive.push_back(c);
    std::stable_sort(result.archive.begin(), result.archive.end(), ranks_before);
    if (result.archive.empty() || !result.archive.front().valid)
        throw NoValidCandidate("every generated tree was penalized");
    return result;
}

std::vector<ProxyCandidate> top_k(const std::vector<ProxyCandidate>& ranked, std::size_t k) {
    std::vector<ProxyCandidate> out;
    std::set<std::string> seen;
    auto same_fitness = [&](double f) {
        return std::any_of(out.begin(), out.end(), [&](const ProxyCandidate& o) {
            return std::abs(o.fitness - f) <= kSameFitnessTolerance * std::max(1.0, std::abs(f));
        });
    };
    for (const auto& c : ranked) {
        if (out.size() >= k) break;
        if (!c.valid || c.replica_correlation < kMinNoiseReplicaCorrelation || same_fitness(c.fitness)) continue;
        if (seen.insert(c.tree.skeleton()).second) out.push_back(c);
    }
    return out;
}

ProblemSpec make_proxy_problem(const ExpressionTree& tree, const ProblemSpec& target, std::string name) {
    ProblemSpec p;
    p.name = std::move(name);
    p.dim = target.dim;
    p.lower_bounds = target.lower_bounds;
    p.upper_bounds = target.upper_bounds;
    p.maximize = false;
    p.expensive = false;
    auto program = std::make_shared<const Program>(tree, target.dim);
    p.objective = [program](std::span<const double> x, RandomStream& noise) {
        double v = program->evaluate(x, noise);
        return std::isfinite(v) ? v : 1e300;
    };
    return p;
}

}  // namespace proxyforge::gp
