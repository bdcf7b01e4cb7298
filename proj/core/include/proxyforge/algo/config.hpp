#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "proxyforge/random.hpp"

namespace proxyforge::algo {

enum class Family { RS, DE, LSHADE };
enum class Mutation { rand1, best1, current_to_pbest };
enum class Crossover { binomial, exponential };
enum class Restart { none, on_stagnation };
enum class BoundHandling { clip, reflect };

inline constexpr double kPbestChoices[] = {0.05, 0.1, 0.2};
inline constexpr std::size_t kMinPopulation = 4;
inline constexpr std::size_t kMaxPopulation = 10000;
inline constexpr double kDefaultRestartTol = 1e-12;

/// A point in the modular DE / LSHADE / random-search space.
///
/// Empty optionals stand for "auto" (population_size) and "adaptive"
/// (F, CR). Field names match the JSON form exchanged with proposers.
struct AlgorithmConfig {
    Family family = Family::DE;
    std::optional<std::size_t> population_size;
    Mutation mutation = Mutation::rand1;
    double pbest = 0.1;
    Crossover crossover = Crossover::binomial;
    std::optional<double> F = 0.5;
    std::optional<double> CR = 0.9;
    bool archive = false;
    bool lpsr = false;
    Restart restart = Restart::none;
    std::size_t restart_window = 0;  // 0: 10 * population evaluations
    double restart_tol = kDefaultRestartTol;
    BoundHandling bound_handling = BoundHandling::clip;

    /// Throws InvalidConfig when an invariant does not hold.
    void validate() const;
    /// Copy with the fields LSHADE fixes forced to their values.
    AlgorithmConfig normalized() const;

    nlohmann::json to_json() const;
    /// Strict parse: every field present with a legal value; the result
    /// also passes validate(). With `normalize`, the fields LSHADE fixes are
    /// forced before validation instead of being rejected. Throws
    /// InvalidConfig.
    static AlgorithmConfig from_json(const nlohmann::json& j, bool normalize = false);

    /// Canonical single-line text (sorted-key JSON).
    std::string key() const;
    /// Short human-readable label, e.g. DE(rand1/bin,F=0.5,CR=0.9,NP=auto).
    std::string label() const;

    bool operator==(const AlgorithmConfig&) const = default;
};

/// 4 + floor(3 ln D), at least 5.
std::size_t auto_population(std::size_t dim);

/// JSON schema describing AlgorithmConfig (handed to LLM proposers).
const nlohmann::json& algorithm_config_schema();

const char* to_string(Family f);
const char* to_string(Mutation m);
const char* to_string(Crossover c);
const char* to_string(Restart r);
const char* to_string(BoundHandling b);

/// Initial incumbent of discovery sessions: DE rand/1/bin, F=0.5, CR=0.9, auto population.
AlgorithmConfig default_config();
AlgorithmConfig random_search_config();
/// DE rand/1/bin, F=0.5, CR=0.9, population 10*D capped at budget/5.
AlgorithmConfig de_baseline(std::size_t dim, std::size_t budget);
/// LSHADE with N_init = 18*D capped at budget/5, p=0.11, H=6.
AlgorithmConfig lshade_baseline(std::size_t dim, std::size_t budget);

enum class Step { small, large };

/// Offline proposer move. Small: one field, numeric fields scaled by a
/// factor in [0.8, 1.2] and clipped, categorical fields redrawn. Large: one
/// to three fields redrawn from their full ranges. Always returns a valid,
/// normalized config.
AlgorithmConfig mutate_config(const AlgorithmConfig& config, RandomStream& rng, Step step);

}  // namespace proxyforge::algo
