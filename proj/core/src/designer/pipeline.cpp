#include "proxyforge/designer/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "proxyforge/algo/run.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/problems/synthetic.hpp"

namespace proxyforge::designer {

namespace {

constexpr std::uint64_t kDesignStream = 0x64657369676e;
constexpr std::uint64_t kPlanStream = 0x706c616e;
constexpr std::uint64_t kPoolSeedTag = 0x706f6f6c;
constexpr std::uint64_t kGpStream = 0x6770;
constexpr std::uint64_t kCalibrationTag = 0x63616c69;

std::string pool_name(const std::string& id, std::size_t dim) {
    return "synthetic:" + id + ":" + std::to_string(dim);
}

Eigen::MatrixXd map_to_box(const Eigen::MatrixXd& X, const std::vector<double>& lo, const std::vector<double>& hi,
                           double new_lo, double new_hi) {
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double scale = (new_hi - new_lo) / (hi[jj] - lo[jj]);
        for (Eigen::Index i = 0; i < X.rows(); ++i) out(i, j) = new_lo + (X(i, j) - lo[jj]) * scale;
    }
    return out;
}

}  // namespace

std::vector<double> Characterization::pool_distances() const {
    std::vector<double> out;
    for (const auto& [name, dist] : pool) out.push_back(ela::landscape_distance(target, dist));
    return out;
}

nlohmann::json Characterization::to_json() const {
    nlohmann::json X = nlohmann::json::array();
    for (Eigen::Index i = 0; i < design.X.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(design.X.cols()));
        for (Eigen::Index j = 0; j < design.X.cols(); ++j) row[static_cast<std::size_t>(j)] = design.X(i, j);
        X.push_back(row);
    }
    nlohmann::json pool_json = nlohmann::json::array();
    for (const auto& [name, dist] : pool) pool_json.push_back({{"name", name}, {"distribution", dist.to_json()}});
    return {{"problem", problem},
            {"seed", seed},
            {"ela",
             {{"coef_ELA", settings.coef_ela},
              {"rate_ELA", settings.rate_ela},
              {"n_ELA", settings.n_ela},
              {"threshold_corr", settings.threshold_corr}}},
            {"design", {{"sampler", design.sampler_id}, {"X", X}, {"y", design.y}}},
            {"subsamples", context->plan().subsets},
            {"target", target.to_json()},
            {"pool_seed", pool_seed},
            {"pool", pool_json},
            {"ledger", ledger}};
}

Characterization Characterization::from_json(const nlohmann::json& j) {
    Characterization c;
    c.problem = j.at("problem").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& e = j.at("ela");
    c.settings.coef_ela = e.at("coef_ELA").get<std::size_t>();
    c.settings.rate_ela = e.at("rate_ELA").get<double>();
    c.settings.n_ela = e.at("n_ELA").get<std::size_t>();
    c.settings.threshold_corr = e.at("threshold_corr").get<double>();
    const auto& d = j.at("design");
    c.design.sampler_id = d.at("sampler").get<std::string>();
    const auto rows = d.at("X").get<std::vector<std::vector<double>>>();
    const std::size_t dim = rows.empty() ? 0 : rows.front().size();
    c.design.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim) throw std::invalid_argument("ragged design matrix");
        for (std::size_t k = 0; k < dim; ++k)
            c.design.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    c.design.y = d.at("y").get<std::vector<double>>();
    ela::SubsamplePlan plan;
    plan.design_size = rows.size();
    plan.subsets = j.at("subsamples").get<std::vector<std::vector<std::size_t>>>();
    c.context = std::make_shared<const ela::LandscapeContext>(c.design.X, std::move(plan));
    c.target = ela::FeatureDistribution::from_json(j.at("target"));
    c.pool_seed = j.at("pool_seed").get<std::uint64_t>();
    for (const auto& entry : j.at("pool"))
        c.pool.emplace_back(entry.at("name").get<std::string>(),
                            ela::FeatureDistribution::from_json(entry.at("distribution")));
    c.ledger = j.at("ledger").get<BudgetLedger>();
    return c;
}

ProblemSpec pool_instance(const std::string& function_id, std::size_t dim, std::uint64_t pool_seed) {
    auto p = problems::synthetic(function_id, dim, pool_seed);
    p.name = pool_name(function_id, dim);
    return p;
}

Characterization characterize(const ProblemSpec& target, const ElaSettings& settings, std::uint64_t seed) {
    target.validate();
    if (settings.n_ela < 2) throw std::invalid_argument("n_ELA must be >= 2");
    Characterization c;
    c.problem = target.name;
    c.seed = seed;
    c.settings = settings;
    c.pool_seed = mix_seed(seed, kPoolSeedTag);

    auto design_rng = seeded_rng(seed, kDesignStream);
    c.design = ela::sample_design(target, settings.coef_ela, design_rng, &c.ledger);
    auto plan_rng = seeded_rng(seed, kPlanStream);
    auto plan = ela::draw_subsample_plan(c.design.y.size(), settings.rate_ela, settings.n_ela, plan_rng);
    c.context = std::make_shared<const ela::LandscapeContext>(c.design.X, std::move(plan));

    c.target = ela::feature_distribution(*c.context, c.design.y);
    c.target.coef_ela = settings.coef_ela;
    c.target.rate_ela = settings.rate_ela;
    c.target.n_ela = settings.n_ela;
    c.target.sampler_seed = seed;

    const Eigen::MatrixXd mapped = map_to_box(c.design.X, target.lower_bounds, target.upper_bounds,
                                              problems::kSyntheticLower, problems::kSyntheticUpper);
    const ela::LandscapeContext pool_context(mapped, c.context->plan());
    for (const auto& id : problems::synthetic_function_ids()) {
        const auto instance = pool_instance(id, target.dim, c.pool_seed);
        const auto y = ela::evaluate_on_design(instance, mapped);
        c.ledger.charge(Phase::generation, false, y.size());
        try {
            c.pool.emplace_back(instance.name, ela::feature_distribution(pool_context, y, &c.target));
        } catch (const DegenerateSample&) {
            continue;
        }
    }

    std::vector<ela::FeatureDistribution*> all{&c.target};
    for (auto& [name, dist] : c.pool) all.push_back(&dist);
    ela::impute_non_finite(all);
    std::vector<const ela::FeatureDistribution*> view(all.begin(), all.end());
    const auto retained = ela::prune_correlated(view, settings.threshold_corr);
    for (auto* d : all) ela::apply_retained(*d, retained);
    return c;
}

ProxyGeneration generate_proxies(const Characterization& characterization, const gp::GpParams& params,
                                 std::uint64_t seed) {
    params.validate();
    gp::FitnessFunction fitness(*characterization.context, characterization.target);
    auto rng = seeded_rng(seed, kGpStream);
    ProxyGeneration out;
    out.evolution = gp::evolve(fitness, params, rng);
    out.top = gp::top_k(out.evolution.archive, params.top_k);
    const std::size_t scored = out.evolution.archive.size();
    out.ledger.charge(Phase::generation, false, scored * characterization.design.y.size());
    return out;
}

ValueCalibration::ValueCalibration(std::vector<double> proxy_y, std::vector<double> target_y, double proxy_optimum,
                                   double target_optimum) {
    if (proxy_y.empty() || proxy_y.size() != target_y.size())
        throw std::invalid_argument("calibration needs paired, non-empty samples");
    std::sort(proxy_y.begin(), proxy_y.end());
    std::sort(target_y.begin(), target_y.end());
    // Tied proxy values share one knot at the mean of their target quantiles.
    for (std::size_t i = 0; i < proxy_y.size();) {
        std::size_t j = i;
        double acc = 0.0;
        while (j < proxy_y.size() && proxy_y[j] == proxy_y[i]) acc += target_y[j++];
        knots_p_.push_back(proxy_y[i]);
        knots_t_.push_back(acc / static_cast<double>(j - i));
        i = j;
    }
    proxy_opt_ = std::min(proxy_optimum, knots_p_.front());
    target_opt_ = std::min(target_optimum, knots_t_.front());
}

double ValueCalibration::operator()(double v) const {
    if (std::isnan(v)) return knots_t_.back();
    if (v <= knots_p_.front()) {
        const double span = knots_p_.front() - proxy_opt_;
        const double ratio = span > 0.0 ? std::max(0.0, (v - proxy_opt_) / span) : 0.0;
        return target_opt_ + (knots_t_.front() - target_opt_) * ratio;
    }
    if (v >= knots_p_.back()) return knots_t_.back();
    const auto it = std::upper_bound(knots_p_.begin(), knots_p_.end(), v);
    const auto hi = static_cast<std::size_t>(it - knots_p_.begin());
    const std::size_t lo = hi - 1;
    const double w = (v - knots_p_[lo]) / (knots_p_[hi] - knots_p_[lo]);
    return knots_t_[lo] + w * (knots_t_[hi] - knots_t_[lo]);
}

ProblemSpec calibrate_to_target(ProblemSpec proxy, ValueCalibration calibration, const ProblemSpec& target) {
    auto base = std::move(proxy.objective);
    auto map = std::make_shared<const ValueCalibration>(std::move(calibration));
    // The base objective is already in the minimization convention.
    proxy.objective = [base = std::move(base), map](std::span<const double> x, RandomStream& noise) {
        return (*map)(base(x, noise));
    };
    proxy.maximize = false;
    proxy.known_optimum = target.known_optimum;
    proxy.aocc_scale = target.aocc_scale;
    return proxy;
}

ProblemSpec calibrated_proxy(const gp::ExpressionTree& tree, const ProblemSpec& target,
                             const ela::DesignSample& design, const std::string& name, std::uint64_t seed,
                             BudgetLedger* ledger) {
    auto proxy = gp::make_proxy_problem(tree, target, name);
    const std::uint64_t cal_seed = mix_seed(seed, kCalibrationTag);
    auto y = ela::evaluate_on_design(proxy, design.X, cal_seed);
    double optimum = *std::min_element(y.begin(), y.end());

    const std::size_t budget = kCalibrationBudgetPerDim * target.dim;
    BudgetedEvaluator evaluator(proxy, budget, cal_seed);
    const auto record = algo::run(algo::lshade_baseline(target.dim, budget), evaluator, cal_seed);
    optimum = std::min(optimum, record.best);
    if (ledger) ledger->charge(Phase::generation, false, y.size() + budget);

    ValueCalibration calibration(std::move(y), design.y, optimum,
                                 target.known_optimum.value_or(0.0));
    return calibrate_to_target(std::move(proxy), std::move(calibration), target);
}

std::vector<ProblemSpec> benchmark_proxies(const Characterization& characterization, const ProblemSpec& target,
                                           std::size_t k) {
    const auto names = select_proxies(characterization.target, characterization.pool, k);
    const std::size_t dim = static_cast<std::size_t>(characterization.design.X.cols());
    const Eigen::MatrixXd mapped = map_to_box(characterization.design.X, target.lower_bounds, target.upper_bounds,
                                              problems::kSyntheticLower, problems::kSyntheticUpper);
    std::vector<ProblemSpec> out;
    for (const auto& name : names) {
        const auto first = name.find(':');
        const auto second = name.rfind(':');
        auto p = pool_instance(name.substr(first + 1, second - first - 1), dim, characterization.pool_seed);
        auto y = ela::evaluate_on_design(p, mapped);
        ValueCalibration calibration(std::move(y), characterization.design.y, p.known_optimum.value_or(0.0),
                                     target.known_optimum.value_or(0.0));
        out.push_back(calibrate_to_target(std::move(p), std::move(calibration), target));
    }
    return out;
}

std::vector<ProblemSpec> session_objectives(Condition condition, const ProblemSpec& target,
                                            const Characterization* characterization,
                                            const std::vector<gp::ExpressionTree>* proxies, std::size_t k,
                                            std::uint64_t seed, BudgetLedger* ledger) {
    switch (condition) {
        case Condition::real_world_direct:
            return {target};
        case Condition::benchmark_driven:
            if (!characterization) throw std::invalid_argument("benchmark-driven condition needs a characterization");
            return benchmark_proxies(*characterization, target, k);
        case Condition::proxy_driven: {
            if (!characterization || !proxies || proxies->empty())
                throw std::invalid_argument("proxy-driven condition needs proxy trees");
            std::vector<ProblemSpec> out;
            const std::size_t n = std::min(k, proxies->size());
            for (std::size_t i = 0; i < n; ++i)
                out.push_back(calibrated_proxy((*proxies)[i], target, characterization->design,
                                               "proxy-" + std::to_string(i), mix_seed(seed, i), ledger));
            return out;
        }
    }
    throw std::invalid_argument("unknown condition");
}

}  // namespace proxyforge::designer
