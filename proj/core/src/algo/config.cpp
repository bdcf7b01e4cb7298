#include "proxyforge/algo/config.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "proxyforge/errors.hpp"
#include "proxyforge/run_record.hpp"

namespace proxyforge::algo {

namespace {

template <typename E, std::size_t N>
E parse_enum(const nlohmann::json& j, const char* field, const std::pair<const char*, E> (&table)[N]) {
    if (!j.is_string()) throw InvalidConfig(std::string(field) + " must be a string");
    const auto s = j.get<std::string>();
    for (const auto& [name, value] : table)
        if (s == name) return value;
    throw InvalidConfig("illegal value '" + s + "' for " + field);
}

constexpr std::pair<const char*, Family> kFamilies[] = {{"RS", Family::RS}, {"DE", Family::DE}, {"LSHADE", Family::LSHADE}};
constexpr std::pair<const char*, Mutation> kMutations[] = {
    {"rand1", Mutation::rand1}, {"best1", Mutation::best1}, {"current-to-pbest", Mutation::current_to_pbest}};
constexpr std::pair<const char*, Crossover> kCrossovers[] = {{"binomial", Crossover::binomial},
                                                             {"exponential", Crossover::exponential}};
constexpr std::pair<const char*, Restart> kRestarts[] = {{"none", Restart::none},
                                                         {"on-stagnation", Restart::on_stagnation}};
constexpr std::pair<const char*, BoundHandling> kBounds[] = {{"clip", BoundHandling::clip},
                                                             {"reflect", BoundHandling::reflect}};

const char* const kFields[] = {"family",  "population_size", "mutation",       "pbest",      "crossover",
                               "F",       "CR",              "archive",        "lpsr",       "restart",
                               "restart_window", "restart_tol", "bound_handling"};

double number_field(const nlohmann::json& j, const char* field) {
    if (!j.is_number()) throw InvalidConfig(std::string(field) + " must be a number");
    return j.get<double>();
}

bool bool_field(const nlohmann::json& j, const char* field) {
    if (!j.is_boolean()) throw InvalidConfig(std::string(field) + " must be a boolean");
    return j.get<bool>();
}

std::optional<double> adaptive_or_number(const nlohmann::json& j, const char* field) {
    if (j.is_string()) {
        if (j.get<std::string>() == "adaptive") return std::nullopt;
        throw InvalidConfig(std::string(field) + " must be a number or \"adaptive\"");
    }
    return number_field(j, field);
}

std::size_t count_field(const nlohmann::json& j, const char* field) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw InvalidConfig(std::string(field) + " must be a non-negative integer");
    return j.get<std::size_t>();
}

}  // namespace

const char* to_string(Family f) { return kFamilies[static_cast<int>(f)].first; }
const char* to_string(Mutation m) { return kMutations[static_cast<int>(m)].first; }
const char* to_string(Crossover c) { return kCrossovers[static_cast<int>(c)].first; }
const char* to_string(Restart r) { return kRestarts[static_cast<int>(r)].first; }
const char* to_string(BoundHandling b) { return kBounds[static_cast<int>(b)].first; }

std::size_t auto_population(std::size_t dim) {
    const auto base = 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(std::max<std::size_t>(dim, 1)))));
    return std::max<std::size_t>(5, base);
}

void AlgorithmConfig::validate() const {
    if (family == Family::RS) return;
    if (population_size && (*population_size < kMinPopulation || *population_size > kMaxPopulation))
        throw InvalidConfig("population_size must lie in [4, 10000] or be \"auto\"");
    if (!(pbest > 0.0 && pbest <= 0.5)) throw InvalidConfig("pbest must lie in (0, 0.5]");
    if (F && !(*F > 0.0 && *F <= 2.0)) throw InvalidConfig("F must lie in (0, 2] or be \"adaptive\"");
    if (CR && !(*CR >= 0.0 && *CR <= 1.0)) throw InvalidConfig("CR must lie in [0, 1] or be \"adaptive\"");
    if (!(restart_tol >= 0.0) || !std::isfinite(restart_tol)) throw InvalidConfig("restart_tol must be >= 0");
    if (family == Family::LSHADE) {
        if (mutation != Mutation::current_to_pbest || F || CR || !archive || !lpsr)
            throw InvalidConfig(
                "LSHADE requires mutation=current-to-pbest, adaptive F and CR, archive=true and lpsr=true");
    }
}

AlgorithmConfig AlgorithmConfig::normalized() const {
    AlgorithmConfig c = *this;
    if (c.family == Family::LSHADE) {
        c.mutation = Mutation::current_to_pbest;
        c.F.reset();
        c.CR.reset();
        c.archive = true;
        c.lpsr = true;
    }
    return c;
}

nlohmann::json AlgorithmConfig::to_json() const {
    nlohmann::json j;
    j["family"] = to_string(family);
    if (population_size)
        j["population_size"] = *population_size;
    else
        j["population_size"] = "auto";
    j["mutation"] = to_string(mutation);
    j["pbest"] = pbest;
    j["crossover"] = to_string(crossover);
    if (F)
        j["F"] = *F;
    else
        j["F"] = "adaptive";
    if (CR)
        j["CR"] = *CR;
    else
        j["CR"] = "adaptive";
    j["archive"] = archive;
    j["lpsr"] = lpsr;
    j["restart"] = to_string(restart);
    j["restart_window"] = restart_window;
    j["restart_tol"] = restart_tol;
    j["bound_handling"] = to_string(bound_handling);
    return j;
}

AlgorithmConfig AlgorithmConfig::from_json(const nlohmann::json& j, bool normalize) {
    if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
    for (const char* f : kFields)
        if (!j.contains(f)) throw InvalidConfig(std::string("missing field ") + f);
    for (const auto& [k, v] : j.items())
        if (std::find_if(std::begin(kFields), std::end(kFields), [&](const char* f) { return k == f; }) ==
            std::end(kFields))
            throw InvalidConfig("unknown field " + k);

    AlgorithmConfig c;
    c.family = parse_enum(j.at("family"), "family", kFamilies);
    const auto& pop = j.at("population_size");
    if (pop.is_string()) {
        if (pop.get<std::string>() != "auto") throw InvalidConfig("population_size must be an integer or \"auto\"");
        c.population_size.reset();
    } else {
        c.population_size = count_field(pop, "population_size");
    }
    c.mutation = parse_enum(j.at("mutation"), "mutation", kMutations);
    c.pbest = number_field(j.at("pbest"), "pbest");
    c.crossover = parse_enum(j.at("crossover"), "crossover", kCrossovers);
    c.F = adaptive_or_number(j.at("F"), "F");
    c.CR = adaptive_or_number(j.at("CR"), "CR");
    c.archive = bool_field(j.at("archive"), "archive");
    c.lpsr = bool_field(j.at("lpsr"), "lpsr");
    c.restart = parse_enum(j.at("restart"), "restart", kRestarts);
    c.restart_window = count_field(j.at("restart_window"), "restart_window");
    c.restart_tol = number_field(j.at("restart_tol"), "restart_tol");
    c.bound_handling = parse_enum(j.at("bound_handling"), "bound_handling", kBounds);
    if (normalize) c = c.normalized();
    c.validate();
    return c;
}

std::string AlgorithmConfig::key() const { return to_json().dump(); }

std::string AlgorithmConfig::label() const {
    if (family == Family::RS) return "RS";
    std::string out = to_string(family);
    out += "(";
    out += to_string(mutation);
    if (mutation == Mutation::current_to_pbest) out += ",p=" + format_double(pbest);
    out += crossover == Crossover::binomial ? "/bin" : "/exp";
    out += ",F=" + (F ? format_double(*F) : std::string("adaptive"));
    out += ",CR=" + (CR ? format_double(*CR) : std::string("adaptive"));
    out += ",NP=" + (population_size ? std::to_string(*population_size) : std::string("auto"));
    if (archive) out += ",archive";
    if (lpsr) out += ",lpsr";
    if (restart == Restart::on_stagnation) out += ",restart";
    if (bound_handling == BoundHandling::reflect) out += ",reflect";
    out += ")";
    return out;
}

const nlohmann::json& algorithm_config_schema() {
    static const nlohmann::json schema = nlohmann::json::parse(R"schema({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "AlgorithmConfig",
  "type": "object",
  "additionalProperties": false,
  "required": ["family", "population_size", "mutation", "pbest", "crossover", "F", "CR", "archive", "lpsr",
               "restart", "restart_window", "restart_tol", "bound_handling"],
  "properties": {
    "family": {"enum": ["RS", "DE", "LSHADE"],
               "description": "RS ignores every other field; LSHADE forces current-to-pbest, adaptive F/CR, archive and lpsr"},
    "population_size": {"oneOf": [{"type": "integer", "minimum": 4, "maximum": 10000}, {"const": "auto"}],
                        "description": "auto = max(5, 4 + floor(3 ln D))"},
    "mutation": {"enum": ["rand1", "best1", "current-to-pbest"]},
    "pbest": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5,
              "description": "greedy fraction for current-to-pbest; usual values 0.05, 0.1, 0.2"},
    "crossover": {"enum": ["binomial", "exponential"]},
    "F": {"oneOf": [{"type": "number", "exclusiveMinimum": 0, "maximum": 2}, {"const": "adaptive"}]},
    "CR": {"oneOf": [{"type": "number", "minimum": 0, "maximum": 1}, {"const": "adaptive"}]},
    "archive": {"type": "boolean"},
    "lpsr": {"type": "boolean", "description": "linear population size reduction down to 4"},
    "restart": {"enum": ["none", "on-stagnation"]},
    "restart_window": {"type": "integer", "minimum": 0, "description": "evaluations without improvement; 0 = 10 * population"},
    "restart_tol": {"type": "number", "minimum": 0, "description": "relative improvement below which the run counts as stagnating"},
    "bound_handling": {"enum": ["clip", "reflect"]}
  }
})schema");
    return schema;
}

AlgorithmConfig default_config() { return AlgorithmConfig{}; }

AlgorithmConfig random_search_config() {
    AlgorithmConfig c;
    c.family = Family::RS;
    return c;
}

AlgorithmConfig de_baseline(std::size_t dim, std::size_t budget) {
    AlgorithmConfig c;
    c.population_size = std::max(kMinPopulation, std::min(10 * dim, budget / 5));
    return c;
}

AlgorithmConfig lshade_baseline(std::size_t dim, std::size_t budget) {
    AlgorithmConfig c;
    c.family = Family::LSHADE;
    c.population_size = std::max(kMinPopulation, std::min(18 * dim, budget / 5));
    c.pbest = 0.11;
    return c.normalized();
}

namespace {

enum class Field { family, population_size, mutation, pbest, crossover, F, CR, archive, lpsr, restart, bound_handling };

std::vector<Field> mutable_fields(const AlgorithmConfig& c) {
    if (c.family == Family::RS) return {Field::family};
    std::vector<Field> out{Field::family, Field::population_size, Field::crossover, Field::restart,
                           Field::bound_handling};
    if (c.family == Family::DE) {
        out.insert(out.end(), {Field::mutation, Field::F, Field::CR, Field::archive, Field::lpsr});
    }
    if (c.mutation == Mutation::current_to_pbest) out.push_back(Field::pbest);
    return out;
}

template <typename E, std::size_t N>
E redraw(E current, const std::pair<const char*, E> (&table)[N], RandomStream& rng) {
    // A different value than the current one.
    std::size_t pick = rng.index(N - 1);
    if (table[pick].second == current) pick = N - 1;
    return table[pick].second;
}

double pick_pbest(double current, RandomStream& rng) {
    std::vector<double> options;
    for (double p : kPbestChoices)
        if (p != current) options.push_back(p);
    return options[rng.index(options.size())];
}

void small_step(AlgorithmConfig& c, Field field, std::size_t dim_hint, RandomStream& rng) {
    const double factor = rng.uniform(0.8, 1.2);
    switch (field) {
        case Field::family: c.family = redraw(c.family, kFamilies, rng); break;
        case Field::population_size: {
            const double base = static_cast<double>(c.population_size.value_or(auto_population(dim_hint)));
            auto scaled = static_cast<std::size_t>(std::llround(base * factor));
            c.population_size = std::clamp(scaled, kMinPopulation, kMaxPopulation);
            break;
        }
        case Field::mutation: c.mutation = redraw(c.mutation, kMutations, rng); break;
        case Field::pbest: c.pbest = pick_pbest(c.pbest, rng); break;
        case Field::crossover: c.crossover = redraw(c.crossover, kCrossovers, rng); break;
        case Field::F: c.F = c.F ? std::clamp(*c.F * factor, 1e-3, 2.0) : rng.uniform(0.4, 0.9); break;
        case Field::CR: c.CR = c.CR ? std::clamp(*c.CR * factor, 0.0, 1.0) : rng.uniform(0.1, 0.9); break;
        case Field::archive: c.archive = !c.archive; break;
        case Field::lpsr: c.lpsr = !c.lpsr; break;
        case Field::restart: c.restart = redraw(c.restart, kRestarts, rng); break;
        case Field::bound_handling: c.bound_handling = redraw(c.bound_handling, kBounds, rng); break;
    }
}

void large_step(AlgorithmConfig& c, Field field, RandomStream& rng) {
    switch (field) {
        case Field::family: c.family = redraw(c.family, kFamilies, rng); break;
        case Field::population_size:
            if (rng.bernoulli(0.3))
                c.population_size.reset();
            else
                c.population_size = static_cast<std::size_t>(rng.uniform_int(kMinPopulation, 100));
            break;
        case Field::mutation: c.mutation = redraw(c.mutation, kMutations, rng); break;
        case Field::pbest: c.pbest = pick_pbest(c.pbest, rng); break;
        case Field::crossover: c.crossover = redraw(c.crossover, kCrossovers, rng); break;
        case Field::F:
            if (rng.bernoulli(0.3))
                c.F.reset();
            else
                c.F = rng.uniform(0.1, 1.0);
            break;
        case Field::CR:
            if (rng.bernoulli(0.3))
                c.CR.reset();
            else
                c.CR = rng.uniform(0.0, 1.0);
            break;
        case Field::archive: c.archive = rng.bernoulli(0.5); break;
        case Field::lpsr: c.lpsr = rng.bernoulli(0.5); break;
        case Field::restart: c.restart = redraw(c.restart, kRestarts, rng); break;
        case Field::bound_handling: c.bound_handling = redraw(c.bound_handling, kBounds, rng); break;
    }
}

}  // namespace

AlgorithmConfig mutate_config(const AlgorithmConfig& config, RandomStream& rng, Step step) {
    config.validate();
    AlgorithmConfig c = config;
    // Population sizes for "auto" are resolved against a nominal dimension;
    // the designer works at D = 10 or below in practice.
    constexpr std::size_t kNominalDim = 10;
    if (step == Step::small) {
        auto fields = mutable_fields(c);
        small_step(c, fields[rng.index(fields.size())], kNominalDim, rng);
    } else {
        const auto count = static_cast<std::size_t>(rng.uniform_int(1, 3));
        for (std::size_t k = 0; k < count; ++k) {
            auto fields = mutable_fields(c);
            large_step(c, fields[rng.index(fields.size())], rng);
        }
    }
    c = c.normalized();
    c.validate();
    return c;
}

}  // namespace proxyforge::algo
