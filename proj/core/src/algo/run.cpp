#include "proxyforge/algo/run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "proxyforge/errors.hpp"

namespace proxyforge::algo {

namespace {

using Vec = std::vector<double>;

double comparable(double v) { return std::isnan(v) ? std::numeric_limits<double>::infinity() : v; }

class DifferentialEvolution {
public:
    DifferentialEvolution(const AlgorithmConfig& config, BudgetedEvaluator& evaluator, RandomStream& rng,
                          const RunOptions& options)
        : c_(config),
          ev_(evaluator),
          rng_(rng),
          options_(options),
          dim_(evaluator.dim()),
          lo_(evaluator.problem().lower_bounds),
          hi_(evaluator.problem().upper_bounds),
          np_init_(resolved_population(config, evaluator.dim())),
          memory_f_(kMemorySize, 0.5),
          memory_cr_(kMemorySize, 0.5) {}

    void run() {
        initialize();
        while (!ev_.exhausted()) {
            generation();
            if (options_.on_generation && !fitness_.empty())
                options_.on_generation(*std::min_element(fitness_.begin(), fitness_.end()));
            if (c_.lpsr) reduce_population();
            if (c_.restart == Restart::on_stagnation) maybe_restart();
        }
    }

private:
    Vec random_point() {
        Vec x(dim_);
        for (std::size_t j = 0; j < dim_; ++j) x[j] = rng_.uniform(lo_[j], hi_[j]);
        return x;
    }

    void initialize() {
        for (std::size_t i = 0; i < np_init_ && !ev_.exhausted(); ++i) {
            Vec x = i < options_.initial_population.size() ? options_.initial_population[i] : random_point();
            if (x.size() != dim_) throw DimensionMismatch("initial population row has the wrong length");
            double f = comparable(ev_.evaluate(x));
            note_value(f);
            pop_.push_back(std::move(x));
            fitness_.push_back(f);
        }
    }

    void note_value(double f) {
        const double scale = std::max(std::abs(best_seen_), 1e-300);
        if (f < best_seen_ && (best_seen_ - f) > c_.restart_tol * scale) {
            best_seen_ = f;
            last_improvement_ = ev_.used();
        } else if (f < best_seen_) {
            best_seen_ = f;
        }
    }

    std::size_t best_index() const {
        return static_cast<std::size_t>(std::min_element(fitness_.begin(), fitness_.end()) - fitness_.begin());
    }

    std::size_t pick_other(std::size_t n, std::initializer_list<std::size_t> excluded) {
        for (;;) {
            std::size_t r = rng_.index(n);
            if (std::find(excluded.begin(), excluded.end(), r) == excluded.end()) return r;
        }
    }

    double sample_f(std::size_t slot) {
        if (c_.F) return *c_.F;
        for (;;) {
            double f = rng_.cauchy(memory_f_[slot], 0.1);
            if (f > 0.0) return std::min(f, 1.0);
        }
    }

    double sample_cr(std::size_t slot) {
        if (c_.CR) return *c_.CR;
        return std::clamp(rng_.normal(memory_cr_[slot], 0.1), 0.0, 1.0);
    }

    Vec mutant(std::size_t i, double F, const std::vector<std::size_t>& order) {
        const std::size_t n = pop_.size();
        Vec v(dim_);
        if (n < 4) return pop_[i];
        switch (c_.mutation) {
            case Mutation::rand1: {
                std::size_t r1 = pick_other(n, {i});
                std::size_t r2 = pick_other(n, {i, r1});
                std::size_t r3 = pick_other(n, {i, r1, r2});
                for (std::size_t j = 0; j < dim_; ++j) v[j] = pop_[r1][j] + F * (pop_[r2][j] - pop_[r3][j]);
                break;
            }
            case Mutation::best1: {
                const std::size_t b = order.front();
                std::size_t r1 = pick_other(n, {i});
                std::size_t r2 = pick_other(n, {i, r1});
                for (std::size_t j = 0; j < dim_; ++j) v[j] = pop_[b][j] + F * (pop_[r1][j] - pop_[r2][j]);
                break;
            }
            case Mutation::current_to_pbest: {
                const auto top = std::max<std::size_t>(
                    2, static_cast<std::size_t>(std::llround(c_.pbest * static_cast<double>(n))));
                const std::size_t pb = order[rng_.index(std::min(top, n))];
                std::size_t r1 = pick_other(n, {i});
                const std::size_t pool = n + (c_.archive ? archive_.size() : 0);
                std::size_t r2;
                do {
                    r2 = rng_.index(pool);
                } while (r2 == i || r2 == r1);
                const Vec& x2 = r2 < n ? pop_[r2] : archive_[r2 - n];
                for (std::size_t j = 0; j < dim_; ++j)
                    v[j] = pop_[i][j] + F * (pop_[pb][j] - pop_[i][j]) + F * (pop_[r1][j] - x2[j]);
                break;
            }
        }
        return v;
    }

    Vec cross(const Vec& target, const Vec& donor, double CR) {
        Vec u = target;
        const std::size_t jrand = rng_.index(dim_);
        if (c_.crossover == Crossover::binomial) {
            for (std::size_t j = 0; j < dim_; ++j)
                if (j == jrand || rng_.uniform() < CR) u[j] = donor[j];
        } else {
            std::size_t j = jrand;
            std::size_t copied = 0;
            do {
                u[j] = donor[j];
                j = (j + 1) % dim_;
                ++copied;
            } while (copied < dim_ && rng_.uniform() < CR);
        }
        return u;
    }

    void repair(Vec& u) {
        for (std::size_t j = 0; j < dim_; ++j) {
            if (c_.bound_handling == BoundHandling::reflect) {
                if (u[j] < lo_[j]) u[j] = lo_[j] + (lo_[j] - u[j]);
                if (u[j] > hi_[j]) u[j] = hi_[j] - (u[j] - hi_[j]);
            }
            // Reflection can overshoot the opposite bound; clip either way.
            u[j] = std::clamp(u[j], lo_[j], hi_[j]);
        }
    }

    void generation() {
        const std::size_t n = pop_.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness_[a] < fitness_[b]; });

        std::vector<Vec> trials;
        std::vector<double> used_f, used_cr;
        trials.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t slot = rng_.index(kMemorySize);
            const double F = sample_f(slot);
            const double CR = sample_cr(slot);
            Vec u = cross(pop_[i], mutant(i, F, order), CR);
            repair(u);
            trials.push_back(std::move(u));
            used_f.push_back(F);
            used_cr.push_back(CR);
        }

        // Evaluate in index order; a budget cut leaves a partial generation.
        std::vector<double> trial_fitness;
        for (std::size_t i = 0; i < n && !ev_.exhausted(); ++i) {
            double f = comparable(ev_.evaluate(trials[i]));
            note_value(f);
            trial_fitness.push_back(f);
        }

        std::vector<double> s_f, s_cr, weights;
        for (std::size_t i = 0; i < trial_fitness.size(); ++i) {
            if (trial_fitness[i] > fitness_[i]) continue;
            if (trial_fitness[i] < fitness_[i]) {
                s_f.push_back(used_f[i]);
                s_cr.push_back(used_cr[i]);
                weights.push_back(fitness_[i] - trial_fitness[i]);
                if (c_.archive) archive_.push_back(pop_[i]);
            }
            pop_[i] = std::move(trials[i]);
            fitness_[i] = trial_fitness[i];
        }
        trim_archive();
        update_memory(s_f, s_cr, weights);
    }

    void trim_archive() {
        while (archive_.size() > pop_.size()) {
            std::size_t k = rng_.index(archive_.size());
            archive_[k] = std::move(archive_.back());
            archive_.pop_back();
        }
    }

    void update_memory(const std::vector<double>& s_f, const std::vector<double>& s_cr, std::vector<double> weights) {
        if (s_f.empty() || (c_.F && c_.CR)) return;
        double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        if (!(total > 0.0) || !std::isfinite(total)) {
            std::fill(weights.begin(), weights.end(), 1.0);
            total = static_cast<double>(weights.size());
        }
        double num = 0.0, den = 0.0, cr = 0.0;
        for (std::size_t k = 0; k < s_f.size(); ++k) {
            const double w = weights[k] / total;
            num += w * s_f[k] * s_f[k];
            den += w * s_f[k];
            cr += w * s_cr[k];
        }
        if (den > 0.0) memory_f_[memory_pos_] = num / den;
        memory_cr_[memory_pos_] = cr;
        memory_pos_ = (memory_pos_ + 1) % kMemorySize;
    }

    void reduce_population() {
        const double progress = static_cast<double>(ev_.used()) / static_cast<double>(ev_.budget());
        const double target_size = static_cast<double>(np_init_) +
                                   (static_cast<double>(kFinalPopulation) - static_cast<double>(np_init_)) * progress;
        auto target = static_cast<std::size_t>(std::llround(target_size));
        target = std::max(target, kFinalPopulation);
        if (target >= pop_.size()) return;
        std::vector<std::size_t> order(pop_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness_[a] < fitness_[b]; });
        order.resize(target);
        std::sort(order.begin(), order.end());
        std::vector<Vec> pop;
        std::vector<double> fit;
        for (std::size_t k : order) {
            pop.push_back(std::move(pop_[k]));
            fit.push_back(fitness_[k]);
        }
        pop_ = std::move(pop);
        fitness_ = std::move(fit);
        trim_archive();
    }

    void maybe_restart() {
        const std::size_t window = c_.restart_window > 0 ? c_.restart_window : 10 * pop_.size();
        if (ev_.used() - last_improvement_ < window || ev_.exhausted()) return;
        const std::size_t keep = best_index();
        for (std::size_t i = 0; i < pop_.size() && !ev_.exhausted(); ++i) {
            if (i == keep) continue;
            pop_[i] = random_point();
            fitness_[i] = comparable(ev_.evaluate(pop_[i]));
            note_value(fitness_[i]);
        }
        archive_.clear();
        last_improvement_ = ev_.used();
    }

    const AlgorithmConfig& c_;
    BudgetedEvaluator& ev_;
    RandomStream& rng_;
    const RunOptions& options_;
    std::size_t dim_;
    const Vec& lo_;
    const Vec& hi_;
    std::size_t np_init_;
    std::vector<Vec> pop_;
    std::vector<double> fitness_;
    std::vector<Vec> archive_;
    std::vector<double> memory_f_;
    std::vector<double> memory_cr_;
    std::size_t memory_pos_ = 0;
    double best_seen_ = std::numeric_limits<double>::infinity();
    std::size_t last_improvement_ = 0;
};

void random_search(BudgetedEvaluator& ev, RandomStream& rng) {
    const auto& lo = ev.problem().lower_bounds;
    const auto& hi = ev.problem().upper_bounds;
    Vec x(ev.dim());
    while (!ev.exhausted()) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = rng.uniform(lo[j], hi[j]);
        ev.evaluate(x);
    }
}

}  // namespace

std::size_t resolved_population(const AlgorithmConfig& config, std::size_t dim) {
    return config.population_size.value_or(auto_population(dim));
}

RunRecord run(const AlgorithmConfig& config, BudgetedEvaluator& evaluator, std::uint64_t seed,
              const RunOptions& options) {
    config.validate();
    if (evaluator.used() != 0) throw std::invalid_argument("run: evaluator has already been used");
    RandomStream rng(seed, 0x616c676fULL);
    if (config.family == Family::RS) {
        random_search(evaluator, rng);
    } else {
        DifferentialEvolution de(config, evaluator, rng, options);
        de.run();
    }

    RunRecord record;
    record.problem = evaluator.problem().name;
    record.algorithm = options.label.empty() ? config.label() : options.label;
    record.config = config.to_json();
    record.seed = seed;
    record.budget = evaluator.budget();
    if (options.phase) evaluator.charge_to(record.ledger, *options.phase);
    record.trace = evaluator.trace();
    record.aocc = run_aocc(record.trace, evaluator.problem(), evaluator.budget(), options.aocc);
    record.best = evaluator.best_value();
    record.best_x = evaluator.best_x();
    return record;
}

}  // namespace proxyforge::algo
