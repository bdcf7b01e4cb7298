#include "proxyforge/ela/distribution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "proxyforge/ela/wasserstein.hpp"
#include "proxyforge/errors.hpp"

namespace proxyforge::ela {

namespace {

std::size_t feature_index(std::string_view name) {
    const auto& names = feature_names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw FeatureMismatch("unknown feature " + std::string(name));
    return static_cast<std::size_t>(it - names.begin());
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double abs_pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
    return std::abs(sab) / std::sqrt(saa * sbb);
}

}  // namespace

SubsamplePlan draw_subsample_plan(std::size_t n, double rate, std::size_t n_ela, RandomStream& rng) {
    if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("rate_ELA must lie in (0, 1]");
    if (n_ela < 2) throw std::invalid_argument("n_ELA must be >= 2");
    const auto size = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
    if (size < 3) throw std::invalid_argument("subsample too small");
    SubsamplePlan plan;
    plan.design_size = n;
    for (std::size_t r = 0; r < n_ela; ++r) {
        auto subset = rng.sample_without_replacement(n, size);
        std::sort(subset.begin(), subset.end());
        plan.subsets.push_back(std::move(subset));
    }
    return plan;
}

LandscapeContext::LandscapeContext(Eigen::MatrixXd X, SubsamplePlan plan) : X_(std::move(X)), plan_(std::move(plan)) {
    if (plan_.design_size != static_cast<std::size_t>(X_.rows()))
        throw std::invalid_argument("subsample plan does not match the design size");
    for (const auto& subset : plan_.subsets) {
        Eigen::MatrixXd points(static_cast<Eigen::Index>(subset.size()), X_.cols());
        for (std::size_t k = 0; k < subset.size(); ++k)
            points.row(static_cast<Eigen::Index>(k)) = X_.row(static_cast<Eigen::Index>(subset[k]));
        geometries_.push_back(std::make_unique<SubsampleGeometry>(points));
    }
}

std::vector<FeatureVector> LandscapeContext::features(std::span<const double> y) const {
    if (y.size() != static_cast<std::size_t>(X_.rows())) throw std::invalid_argument("y does not match the design");
    std::vector<FeatureVector> out;
    out.reserve(plan_.subsets.size());
    std::vector<double> sub;
    for (std::size_t r = 0; r < plan_.subsets.size(); ++r) {
        const auto& subset = plan_.subsets[r];
        sub.resize(subset.size());
        for (std::size_t k = 0; k < subset.size(); ++k) sub[k] = y[subset[k]];
        out.push_back(compute_features(*geometries_[r], sub));
    }
    return out;
}

const std::vector<double>& FeatureDistribution::samples_of(std::string_view feature) const {
    return samples.at(feature_index(feature));
}

nlohmann::json FeatureDistribution::to_json() const {
    nlohmann::json features = nlohmann::json::object();
    const auto& names = feature_names();
    for (std::size_t f = 0; f < samples.size(); ++f) features[names[f]] = samples[f];
    return {{"features", features},       {"retained", retained}, {"coef_ELA", coef_ela},
            {"rate_ELA", rate_ela},       {"n_ELA", n_ela},       {"sampler_seed", sampler_seed}};
}

FeatureDistribution FeatureDistribution::from_json(const nlohmann::json& j) {
    FeatureDistribution d;
    const auto& names = feature_names();
    d.samples.resize(names.size());
    for (std::size_t f = 0; f < names.size(); ++f) {
        if (!j.at("features").contains(names[f])) throw FeatureMismatch("missing feature " + names[f]);
        d.samples[f] = j.at("features").at(names[f]).get<std::vector<double>>();
    }
    d.retained = j.at("retained").get<std::vector<std::string>>();
    d.coef_ela = j.at("coef_ELA").get<std::size_t>();
    d.rate_ela = j.at("rate_ELA").get<double>();
    d.n_ela = j.at("n_ELA").get<std::size_t>();
    d.sampler_seed = j.at("sampler_seed").get<std::uint64_t>();
    return d;
}

void impute_non_finite(std::span<FeatureDistribution* const> pool) {
    if (pool.empty()) return;
    const std::size_t n_features = pool.front()->samples.size();
    for (std::size_t f = 0; f < n_features; ++f) {
        std::vector<double> finite;
        bool missing = false;
        for (const auto* d : pool)
            for (double v : d->samples[f]) {
                if (std::isfinite(v))
                    finite.push_back(v);
                else
                    missing = true;
            }
        if (!missing) continue;
        double worst = kImputationSentinel;
        if (!finite.empty()) {
            const double med = median_of(finite);
            worst = finite.front();
            for (double v : finite)
                if (std::abs(v - med) > std::abs(worst - med)) worst = v;
        }
        for (auto* d : pool)
            for (double& v : d->samples[f])
                if (!std::isfinite(v)) v = worst;
    }
}

FeatureDistribution feature_distribution(const LandscapeContext& context, std::span<const double> y,
                                         const FeatureDistribution* reference) {
    auto vectors = context.features(y);
    const std::size_t n_features = feature_names().size();
    FeatureDistribution dist;
    dist.samples.assign(n_features, std::vector<double>(vectors.size()));
    for (std::size_t r = 0; r < vectors.size(); ++r)
        for (std::size_t f = 0; f < n_features; ++f) dist.samples[f][r] = vectors[r].values[f];
    dist.n_ela = vectors.size();

    if (reference) {
        dist.retained = reference->retained;
        dist.coef_ela = reference->coef_ela;
        dist.rate_ela = reference->rate_ela;
        dist.sampler_seed = reference->sampler_seed;
        // Impute against the reference without touching it.
        FeatureDistribution ref_copy = *reference;
        std::array<FeatureDistribution*, 2> pool{&ref_copy, &dist};
        impute_non_finite(pool);
    } else {
        dist.retained = feature_names();
        std::array<FeatureDistribution*, 1> pool{&dist};
        impute_non_finite(pool);
    }
    return dist;
}

FeatureDistribution feature_distribution(const DesignSample& sample, double rate_ela, std::size_t n_ela,
                                         RandomStream& rng) {
    const auto n = static_cast<std::size_t>(sample.X.rows());
    const auto d = static_cast<std::size_t>(sample.X.cols());
    LandscapeContext context(sample.X, draw_subsample_plan(n, rate_ela, n_ela, rng));
    FeatureDistribution dist = feature_distribution(context, sample.y);
    dist.rate_ela = rate_ela;
    dist.coef_ela = d > 0 ? n / d : 0;
    dist.sampler_seed = rng.master_seed();
    return dist;
}

std::vector<std::string> prune_correlated(std::span<const FeatureDistribution* const> dists, double threshold_corr,
                                          const std::vector<std::string>& candidates) {
    if (dists.size() < 2) throw std::invalid_argument("prune_correlated needs at least two distributions");
    if (!(threshold_corr > 0.0 && threshold_corr <= 1.0)) throw std::invalid_argument("threshold must lie in (0, 1]");

    auto pooled_column = [&](std::size_t f) {
        std::vector<double> column;
        for (const auto* d : dists) column.insert(column.end(), d->samples.at(f).begin(), d->samples.at(f).end());
        return column;
    };

    std::vector<std::string> kept;
    std::vector<std::vector<double>> kept_columns;
    for (const auto& name : candidates) {
        auto column = pooled_column(feature_index(name));
        bool redundant = false;
        for (const auto& other : kept_columns)
            if (abs_pearson(column, other) > threshold_corr) {
                redundant = true;
                break;
            }
        if (redundant) continue;
        kept.push_back(name);
        kept_columns.push_back(std::move(column));
    }
    if (kept.empty()) throw EmptyRetention("no feature survived correlation pruning");
    return kept;
}

std::vector<std::string> prune_correlated(std::span<const FeatureDistribution* const> dists, double threshold_corr) {
    return prune_correlated(dists, threshold_corr, feature_names());
}

void apply_retained(FeatureDistribution& dist, const std::vector<std::string>& retained) {
    for (const auto& name : retained) feature_index(name);
    dist.retained = retained;
}

double landscape_distance(const FeatureDistribution& p, const FeatureDistribution& q) {
    if (p.retained != q.retained) throw FeatureMismatch("retained feature lists differ");
    if (p.retained.empty()) throw FeatureMismatch("no retained features");
    double total = 0.0;
    std::vector<double> a, b;
    for (const auto& name : p.retained) {
        const std::size_t f = feature_index(name);
        const auto& pa = p.samples.at(f);
        const auto& qb = q.samples.at(f);
        const double n = static_cast<double>(pa.size() + qb.size());
        double mean = (std::accumulate(pa.begin(), pa.end(), 0.0) + std::accumulate(qb.begin(), qb.end(), 0.0)) / n;
        double ss = 0.0;
        for (double v : pa) ss += (v - mean) * (v - mean);
        for (double v : qb) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / std::max(1.0, n - 1.0));
        if (!(sd > 0.0) || !std::isfinite(sd)) continue;  // identical constants contribute 0
        a.resize(pa.size());
        b.resize(qb.size());
        for (std::size_t i = 0; i < pa.size(); ++i) a[i] = (pa[i] - mean) / sd;
        for (std::size_t i = 0; i < qb.size(); ++i) b[i] = (qb[i] - mean) / sd;
        total += wasserstein_1d(a, b);
    }
    return total / static_cast<double>(p.retained.size());
}

}  // namespace proxyforge::ela
