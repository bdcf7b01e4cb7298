#include "proxyforge/cli/pipeline_config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "proxyforge/designer/validation.hpp"
#include "proxyforge/problems/registry.hpp"
#include "proxyforge/run_record.hpp"

namespace proxyforge::cli {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"run", {"problem", "seed", "out", "budget_multiplier"}},
        {"ela", {"coef_ELA", "rate_ELA", "n_ELA", "threshold_corr"}},
        {"gp",
         {"n_pop", "n_gen", "p_c", "p_m", "min_depth", "max_depth", "k", "mutation_height", "tournament_k",
          "use_rand"}},
        {"designer",
         {"condition", "iterations", "repetitions", "sessions", "proposer", "endpoint", "model", "timeout_ms",
          "retries", "credential_env"}},
        {"validate", {"runs", "with_baselines"}},
        {"aocc", {"clip_lo", "clip_hi"}},
    };
    return keys;
}

template <typename T>
void read(const pt::ptree& tree, const std::string& key, T& target) {
    const auto node = tree.get_child_optional(pt::ptree::path_type(key, '/'));
    if (!node) return;
    const std::string text = node->data();
    std::istringstream in(text);
    T value{};
    if constexpr (std::is_same_v<T, bool>) {
        if (text == "true" || text == "1") value = true;
        else if (text == "false" || text == "0") value = false;
        else throw ConfigError("invalid boolean for " + key + ": " + text);
    } else if constexpr (std::is_same_v<T, std::string>) {
        value = text;
    } else {
        if constexpr (std::is_unsigned_v<T>) {
            if (!text.empty() && text.front() == '-') throw ConfigError("negative value for " + key + ": " + text);
        }
        in >> value;
        if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("invalid value for " + key + ": " + text);
    }
    target = value;
}

std::string canonical(const PipelineConfig& c, bool for_hash) {
    std::ostringstream o;
    o << "[run]\n";
    o << "problem = " << c.problem << "\n";
    o << "seed = " << c.seed << "\n";
    if (!for_hash) o << "out = " << c.out.string() << "\n";
    o << "budget_multiplier = " << c.budget_multiplier << "\n";
    o << "\n[ela]\n";
    o << "coef_ELA = " << c.ela.coef_ela << "\n";
    o << "rate_ELA = " << format_double(c.ela.rate_ela) << "\n";
    o << "n_ELA = " << c.ela.n_ela << "\n";
    o << "threshold_corr = " << format_double(c.ela.threshold_corr) << "\n";
    o << "\n[gp]\n";
    o << "n_pop = " << c.gp.n_pop << "\n";
    o << "n_gen = " << c.gp.n_gen << "\n";
    o << "p_c = " << format_double(c.gp.p_c) << "\n";
    o << "p_m = " << format_double(c.gp.p_m) << "\n";
    o << "min_depth = " << c.gp.min_depth << "\n";
    o << "max_depth = " << c.gp.max_depth << "\n";
    o << "k = " << c.gp.top_k << "\n";
    o << "mutation_height = " << c.gp.mutation_height << "\n";
    o << "tournament_k = " << c.gp.tournament_k << "\n";
    o << "use_rand = " << (c.gp.use_rand ? "true" : "false") << "\n";
    o << "\n[designer]\n";
    if (!for_hash) o << "condition = " << designer::to_string(c.condition) << "\n";
    o << "iterations = " << c.iterations << "\n";
    o << "repetitions = " << c.repetitions << "\n";
    o << "sessions = " << c.sessions << "\n";
    o << "proposer = " << c.proposer << "\n";
    o << "endpoint = " << c.llm.endpoint << "\n";
    o << "model = " << c.llm.model << "\n";
    o << "timeout_ms = " << c.llm.timeout.count() << "\n";
    o << "retries = " << c.llm.retries << "\n";
    o << "credential_env = " << c.llm.credential_env << "\n";
    o << "\n[validate]\n";
    o << "runs = " << c.validation_runs << "\n";
    if (!for_hash) o << "with_baselines = " << (c.with_baselines ? "true" : "false") << "\n";
    o << "\n[aocc]\n";
    o << "clip_lo = " << format_double(c.aocc.clip_lo) << "\n";
    o << "clip_hi = " << format_double(c.aocc.clip_hi) << "\n";
    return o.str();
}

}  // namespace

PipelineConfig PipelineConfig::parse(const std::string& ini_text) {
    pt::ptree tree;
    try {
        std::istringstream in(ini_text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
        if (!body.data().empty()) throw ConfigError("key outside a section: " + section);
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
    }

    PipelineConfig c;
    std::string out = c.out.string();
    read(tree, "run/problem", c.problem);
    read(tree, "run/seed", c.seed);
    read(tree, "run/out", out);
    c.out = out;
    read(tree, "run/budget_multiplier", c.budget_multiplier);
    read(tree, "ela/coef_ELA", c.ela.coef_ela);
    read(tree, "ela/rate_ELA", c.ela.rate_ela);
    read(tree, "ela/n_ELA", c.ela.n_ela);
    read(tree, "ela/threshold_corr", c.ela.threshold_corr);
    read(tree, "gp/n_pop", c.gp.n_pop);
    read(tree, "gp/n_gen", c.gp.n_gen);
    read(tree, "gp/p_c", c.gp.p_c);
    read(tree, "gp/p_m", c.gp.p_m);
    read(tree, "gp/min_depth", c.gp.min_depth);
    read(tree, "gp/max_depth", c.gp.max_depth);
    read(tree, "gp/k", c.gp.top_k);
    read(tree, "gp/mutation_height", c.gp.mutation_height);
    read(tree, "gp/tournament_k", c.gp.tournament_k);
    read(tree, "gp/use_rand", c.gp.use_rand);
    std::string condition = designer::to_string(c.condition);
    read(tree, "designer/condition", condition);
    try {
        c.condition = designer::condition_from_string(condition);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    read(tree, "designer/iterations", c.iterations);
    read(tree, "designer/repetitions", c.repetitions);
    read(tree, "designer/sessions", c.sessions);
    read(tree, "designer/proposer", c.proposer);
    read(tree, "designer/endpoint", c.llm.endpoint);
    read(tree, "designer/model", c.llm.model);
    long long timeout = c.llm.timeout.count();
    read(tree, "designer/timeout_ms", timeout);
    c.llm.timeout = std::chrono::milliseconds(timeout);
    read(tree, "designer/retries", c.llm.retries);
    read(tree, "designer/credential_env", c.llm.credential_env);
    read(tree, "validate/runs", c.validation_runs);
    read(tree, "validate/with_baselines", c.with_baselines);
    read(tree, "aocc/clip_lo", c.aocc.clip_lo);
    read(tree, "aocc/clip_hi", c.aocc.clip_hi);
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

void PipelineConfig::validate() const {
    if (!problems::is_registered(problem)) throw ConfigError("unknown problem: " + problem);
    if (budget_multiplier < 1) throw ConfigError("budget_multiplier must be >= 1");
    if (ela.coef_ela < 1) throw ConfigError("coef_ELA must be >= 1");
    if (!(ela.rate_ela > 0.0 && ela.rate_ela <= 1.0)) throw ConfigError("rate_ELA must lie in (0, 1]");
    if (ela.n_ela < 2) throw ConfigError("n_ELA must be >= 2");
    if (!(ela.threshold_corr > 0.0 && ela.threshold_corr <= 1.0))
        throw ConfigError("threshold_corr must lie in (0, 1]");
    try {
        gp.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (iterations < 1 || repetitions < 1 || sessions < 1)
        throw ConfigError("iterations, repetitions and sessions must be >= 1");
    if (proposer != "offline" && proposer != "llm") throw ConfigError("proposer must be offline or llm");
    if (llm.timeout.count() <= 0) throw ConfigError("timeout_ms must be positive");
    if (validation_runs < 1) throw ConfigError("validate.runs must be >= 1");
    if (!(aocc.clip_lo > 0.0 && aocc.clip_lo < aocc.clip_hi)) throw ConfigError("need 0 < clip_lo < clip_hi");
}

std::string PipelineConfig::to_ini() const { return canonical(*this, false); }

std::string PipelineConfig::hashed_ini() const { return canonical(*this, true); }

std::string PipelineConfig::hash() const { return sha256_hex(hashed_ini()).substr(0, 12); }

designer::SessionSettings PipelineConfig::session_settings() const {
    designer::SessionSettings s;
    s.iterations = iterations;
    s.repetitions = repetitions;
    s.budget_multiplier = budget_multiplier;
    s.aocc = aocc;
    return s;
}

designer::ValidationSettings PipelineConfig::validation_settings() const {
    designer::ValidationSettings s;
    s.budget_multiplier = budget_multiplier;
    s.runs = validation_runs;
    s.aocc = aocc;
    return s;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace proxyforge::cli
