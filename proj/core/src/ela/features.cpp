#include "proxyforge/ela/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "proxyforge/errors.hpp"

namespace proxyforge::ela {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRidge = 1e-6;
constexpr double kConstantRange = 1e-12;
constexpr double kExplainedVariance = 0.9;
constexpr std::size_t kKdeGrid = 512;
constexpr double kPeakProminence = 0.01;
constexpr std::size_t kEpsilonGrid = 30;
constexpr double kEpsilonFloor = 1e-6;
constexpr double kSettlingEntropy = 0.05;

enum FeatureIndex : std::size_t {
    kSkewness,
    kKurtosis,
    kPeaks,
    kLda10,
    kQda10,
    kLda25,
    kQda25,
    kLda50,
    kQda50,
    kLinAdjR2,
    kLinCoefRatio,
    kQuadSimpleAdjR2,
    kQuadSimpleCond,
    kQuadAdjR2,
    kDisp02,
    kDisp05,
    kDisp10,
    kDisp25,
    kNbMeanRatio,
    kNbSdRatio,
    kNnNbCor,
    kNbFitnessCor,
    kPcaCovX,
    kPcaCorX,
    kPcaCovXy,
    kPcaCorXy,
    kPcaPc1CovXy,
    kPcaPc1CorXy,
    kIcHmax,
    kIcEpsS,
    kIcM0,
    kFeatureCount
};

Eigen::MatrixXd standardize(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd z = X;
    const double n = static_cast<double>(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double mean = X.col(j).mean();
        double var = (X.col(j).array() - mean).square().sum() / std::max(1.0, n - 1.0);
        double sd = var > 0.0 ? std::sqrt(var) : 1.0;
        z.col(j) = (X.col(j).array() - mean) / sd;
    }
    return z;
}

Eigen::MatrixXd linear_design(const Eigen::MatrixXd& z) {
    Eigen::MatrixXd A(z.rows(), z.cols() + 1);
    A.col(0).setOnes();
    A.rightCols(z.cols()) = z;
    return A;
}

Eigen::MatrixXd simple_quadratic_design(const Eigen::MatrixXd& z) {
    const Eigen::Index d = z.cols();
    Eigen::MatrixXd A(z.rows(), 1 + 2 * d);
    A.col(0).setOnes();
    A.middleCols(1, d) = z;
    A.rightCols(d) = z.array().square().matrix();
    return A;
}

Eigen::MatrixXd full_quadratic_design(const Eigen::MatrixXd& z) {
    const Eigen::Index d = z.cols();
    const Eigen::Index cross = d * (d - 1) / 2;
    Eigen::MatrixXd A(z.rows(), 1 + 2 * d + cross);
    A.col(0).setOnes();
    A.middleCols(1, d) = z;
    A.middleCols(1 + d, d) = z.array().square().matrix();
    Eigen::Index c = 1 + 2 * d;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) A.col(c++) = z.col(i).cwiseProduct(z.col(j));
    return A;
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& M) {
    Eigen::MatrixXd centered = M.rowwise() - M.colwise().mean();
    return (centered.transpose() * centered) / std::max<double>(1.0, static_cast<double>(M.rows()) - 1.0);
}

Eigen::MatrixXd correlation(const Eigen::MatrixXd& M) {
    Eigen::MatrixXd cov = covariance(M);
    const Eigen::Index k = cov.rows();
    Eigen::VectorXd sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd cor(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            cor(i, j) = (sd(i) > 0.0 && sd(j) > 0.0) ? cov(i, j) / (sd(i) * sd(j)) : (i == j ? 1.0 : 0.0);
    return cor;
}

// Share of components needed to reach 90% explained variance, and the share
// explained by the first component.
std::pair<double, double> explained_variance(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) return {kNaN, kNaN};
    Eigen::VectorXd ev = solver.eigenvalues().cwiseMax(0.0);
    std::vector<double> values(ev.data(), ev.data() + ev.size());
    std::sort(values.begin(), values.end(), std::greater<>());
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) return {kNaN, kNaN};
    double cumulative = 0.0;
    std::size_t needed = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        cumulative += values[i];
        if (cumulative / total >= kExplainedVariance) {
            needed = i + 1;
            break;
        }
    }
    return {static_cast<double>(needed) / static_cast<double>(values.size()), values.front() / total};
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n < 2) return kNaN;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return kNaN;
    return sab / std::sqrt(saa * sbb);
}

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sd_of(std::span<const double> v) {
    if (v.size() < 2) return kNaN;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Gaussian KDE with Silverman bandwidth; counts local maxima whose
// prominence reaches 1% of the highest density value.
double kde_peak_count(std::span<const double> y) {
    std::vector<double> sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double sd = sd_of(sorted);
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    const double h = 0.9 * spread * std::pow(n, -0.2);
    if (!(h > 0.0) || !std::isfinite(h)) return kNaN;

    const double lo = sorted.front() - 3.0 * h;
    const double hi = sorted.back() + 3.0 * h;
    const double step = (hi - lo) / static_cast<double>(kKdeGrid - 1);
    std::vector<double> density(kKdeGrid, 0.0);
    for (std::size_t g = 0; g < kKdeGrid; ++g) {
        const double x = lo + step * static_cast<double>(g);
        auto first = std::lower_bound(sorted.begin(), sorted.end(), x - 6.0 * h);
        double s = 0.0;
        for (auto it = first; it != sorted.end() && *it <= x + 6.0 * h; ++it) {
            double u = (x - *it) / h;
            s += std::exp(-0.5 * u * u);
        }
        density[g] = s;
    }
    const double peak_max = *std::max_element(density.begin(), density.end());
    if (!(peak_max > 0.0)) return kNaN;

    int peaks = 0;
    for (std::size_t i = 1; i + 1 < kKdeGrid; ++i) {
        if (!(density[i] > density[i - 1])) continue;
        std::size_t j = i;
        while (j + 1 < kKdeGrid && density[j + 1] == density[i]) ++j;  // plateau
        if (j + 1 >= kKdeGrid || density[j + 1] > density[i]) continue;
        const double top = density[i];
        double left_min = top;
        for (std::size_t k = i; k-- > 0;) {
            if (density[k] > top) break;
            left_min = std::min(left_min, density[k]);
        }
        double right_min = top;
        for (std::size_t k = j + 1; k < kKdeGrid; ++k) {
            if (density[k] > top) break;
            right_min = std::min(right_min, density[k]);
        }
        if (top - std::max(left_min, right_min) >= kPeakProminence * peak_max) ++peaks;
        i = j;
    }
    return static_cast<double>(peaks);
}

struct DiscriminantErrors {
    double lda = kNaN;
    double qda = kNaN;
};

DiscriminantErrors discriminant_errors(const Eigen::MatrixXd& z, const std::vector<int>& labels) {
    const Eigen::Index n = z.rows();
    const Eigen::Index d = z.cols();
    std::array<Eigen::Index, 2> count{0, 0};
    std::array<Eigen::VectorXd, 2> mean{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
    for (Eigen::Index i = 0; i < n; ++i) {
        ++count[labels[i]];
        mean[labels[i]] += z.row(i).transpose();
    }
    if (count[0] == 0 || count[1] == 0) return {};
    for (int c = 0; c < 2; ++c) mean[c] /= static_cast<double>(count[c]);

    std::array<Eigen::MatrixXd, 2> scatter{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
    std::array<Eigen::MatrixXd, 2> diff{Eigen::MatrixXd(n, d), Eigen::MatrixXd(n, d)};
    for (int c = 0; c < 2; ++c) diff[c] = z.rowwise() - mean[c].transpose();
    for (int c = 0; c < 2; ++c) {
        Eigen::MatrixXd members(count[c], d);
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (labels[i] == c) members.row(r++) = diff[c].row(i);
        scatter[c] = members.transpose() * members;
    }

    const Eigen::MatrixXd ridge = kRidge * Eigen::MatrixXd::Identity(d, d);
    const double denom = std::max<double>(1.0, static_cast<double>(n - 2));
    Eigen::LLT<Eigen::MatrixXd> pooled((scatter[0] + scatter[1]) / denom + ridge);
    std::array<Eigen::LLT<Eigen::MatrixXd>, 2> per_class;
    std::array<double, 2> log_det{};
    for (int c = 0; c < 2; ++c) {
        Eigen::MatrixXd cov = count[c] > 1 ? Eigen::MatrixXd(scatter[c] / static_cast<double>(count[c] - 1))
                                           : Eigen::MatrixXd::Zero(d, d);
        per_class[c].compute(cov + ridge);
        if (per_class[c].info() != Eigen::Success) return {};
        log_det[c] = 2.0 * per_class[c].matrixL().toDenseMatrix().diagonal().array().log().sum();
    }
    if (pooled.info() != Eigen::Success) return {};

    std::array<double, 2> log_prior{std::log(static_cast<double>(count[0]) / static_cast<double>(n)),
                                    std::log(static_cast<double>(count[1]) / static_cast<double>(n))};
    std::array<Eigen::VectorXd, 2> lda_dist, qda_dist;
    for (int c = 0; c < 2; ++c) {
        Eigen::MatrixXd t = diff[c].transpose();
        lda_dist[c] = pooled.matrixL().solve(t).colwise().squaredNorm().transpose();
        qda_dist[c] = per_class[c].matrixL().solve(t).colwise().squaredNorm().transpose();
    }

    Eigen::Index lda_wrong = 0;
    Eigen::Index qda_wrong = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double l0 = -0.5 * lda_dist[0](i) + log_prior[0];
        double l1 = -0.5 * lda_dist[1](i) + log_prior[1];
        double q0 = -0.5 * log_det[0] - 0.5 * qda_dist[0](i) + log_prior[0];
        double q1 = -0.5 * log_det[1] - 0.5 * qda_dist[1](i) + log_prior[1];
        int lda_label = l1 > l0 ? 1 : 0;
        int qda_label = q1 > q0 ? 1 : 0;
        if (lda_label != labels[i]) ++lda_wrong;
        if (qda_label != labels[i]) ++qda_wrong;
    }
    return {static_cast<double>(lda_wrong) / static_cast<double>(n), static_cast<double>(qda_wrong) / static_cast<double>(n)};
}

double adjusted_r2(const Eigen::MatrixXd& A, const Eigen::VectorXd& beta, const Eigen::VectorXd& y, double sst) {
    const double n = static_cast<double>(y.size());
    const double predictors = static_cast<double>(A.cols() - 1);
    if (n - predictors - 1.0 <= 0.0 || !(sst > 0.0)) return kNaN;
    const double ssr = (y - A * beta).squaredNorm();
    return 1.0 - (ssr / (n - predictors - 1.0)) / (sst / (n - 1.0));
}

double abs_ratio(const Eigen::VectorXd& coefficients) {
    if (coefficients.size() == 0) return kNaN;
    Eigen::VectorXd a = coefficients.cwiseAbs();
    double mn = a.minCoeff();
    double mx = a.maxCoeff();
    if (!(mn > 0.0)) return std::numeric_limits<double>::infinity();
    return mx / mn;
}

// Symbols of consecutive differences at sensitivity eps.
void quantize(const std::vector<double>& diffs, double eps, std::vector<int>& symbols) {
    symbols.resize(diffs.size());
    for (std::size_t k = 0; k < diffs.size(); ++k)
        symbols[k] = diffs[k] < -eps ? -1 : (diffs[k] > eps ? 1 : 0);
}

double information_content(const std::vector<int>& symbols) {
    if (symbols.size() < 2) return kNaN;
    std::array<double, 9> counts{};
    for (std::size_t k = 0; k + 1 < symbols.size(); ++k) {
        if (symbols[k] == symbols[k + 1]) continue;
        counts[static_cast<std::size_t>((symbols[k] + 1) * 3 + (symbols[k + 1] + 1))] += 1.0;
    }
    const double pairs = static_cast<double>(symbols.size() - 1);
    double h = 0.0;
    for (double c : counts) {
        if (c <= 0.0) continue;
        double p = c / pairs;
        h -= p * std::log(p) / std::log(6.0);
    }
    return h;
}

double partial_information(const std::vector<int>& symbols) {
    if (symbols.empty()) return kNaN;
    std::size_t length = 0;
    int last = 0;
    for (int s : symbols) {
        if (s == 0 || s == last) continue;
        ++length;
        last = s;
    }
    if (length <= 1) length = 0;
    return static_cast<double>(length) / static_cast<double>(symbols.size());
}

}  // namespace

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "ydist.skewness",       "ydist.kurtosis",      "ydist.peaks",           "level.lda_mmce_10",
        "level.qda_mmce_10",    "level.lda_mmce_25",   "level.qda_mmce_25",     "level.lda_mmce_50",
        "level.qda_mmce_50",    "meta.lin_adj_r2",     "meta.lin_coef_ratio",   "meta.quad_simple_adj_r2",
        "meta.quad_simple_cond", "meta.quad_adj_r2",   "disp.ratio_02",         "disp.ratio_05",
        "disp.ratio_10",        "disp.ratio_25",       "nbc.nb_nn_mean_ratio",  "nbc.nb_nn_sd_ratio",
        "nbc.nn_nb_cor",        "nbc.nb_fitness_cor",  "pca.cov_x",             "pca.cor_x",
        "pca.cov_xy",           "pca.cor_xy",          "pca.pc1_cov_xy",        "pca.pc1_cor_xy",
        "ic.h_max",             "ic.eps_s",            "ic.m0"};
    static_assert(kFeatureCount == 31);
    return names;
}

double FeatureVector::at(std::string_view name) const {
    const auto& names = feature_names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::out_of_range("unknown feature " + std::string(name));
    return values.at(static_cast<std::size_t>(it - names.begin()));
}

std::map<std::string, double> FeatureVector::as_map() const {
    std::map<std::string, double> out;
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = values[i];
    return out;
}

SubsampleGeometry::SubsampleGeometry(const Eigen::MatrixXd& points)
    : n_(static_cast<std::size_t>(points.rows())), d_(static_cast<std::size_t>(points.cols())), points_(points) {
    if (n_ < 3 || d_ < 1) throw std::invalid_argument("SubsampleGeometry needs at least 3 points");
    z_ = standardize(points_);

    dist_.assign(n_ * n_, 0.0f);
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            double s = (points_.row(static_cast<Eigen::Index>(i)) - points_.row(static_cast<Eigen::Index>(j))).squaredNorm();
            double d = std::sqrt(s);
            dist_[i * n_ + j] = static_cast<float>(d);
            dist_[j * n_ + i] = static_cast<float>(d);
            total += d;
        }
    }
    mean_dist_ = total / (0.5 * static_cast<double>(n_) * static_cast<double>(n_ - 1));

    nn_dist_.assign(n_, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n_; ++i) {
        const float* row = &dist_[i * n_];
        float best = std::numeric_limits<float>::infinity();
        for (std::size_t j = 0; j < n_; ++j)
            if (j != i && row[j] < best) best = row[j];
        nn_dist_[i] = best;
    }

    tour_.reserve(n_);
    std::vector<char> visited(n_, 0);
    std::size_t current = 0;
    visited[0] = 1;
    tour_.push_back(0);
    for (std::size_t step = 1; step < n_; ++step) {
        const float* row = &dist_[current * n_];
        float best = std::numeric_limits<float>::infinity();
        std::size_t next = current;
        for (std::size_t j = 0; j < n_; ++j)
            if (!visited[j] && row[j] < best) {
                best = row[j];
                next = j;
            }
        visited[next] = 1;
        tour_.push_back(next);
        current = next;
    }

    lin_qr_.compute(linear_design(z_));
    quad_simple_qr_.compute(simple_quadratic_design(z_));
    has_full_quad_ = d_ <= kMaxFullQuadraticDim;
    if (has_full_quad_) quad_full_qr_.compute(full_quadratic_design(z_));

    pca_cov_x_ = explained_variance(covariance(points_)).first;
    pca_cor_x_ = explained_variance(correlation(points_)).first;
}

FeatureVector compute_features(const SubsampleGeometry& g, std::span<const double> y_in) {
    const std::size_t n = g.size();
    const std::size_t d = g.dim();
    if (y_in.size() != n) throw std::invalid_argument("compute_features: y length differs from point count");
    const auto [ymin_it, ymax_it] = std::minmax_element(y_in.begin(), y_in.end());
    if (!std::isfinite(*ymin_it) || !std::isfinite(*ymax_it))
        throw DegenerateSample("objective values contain non-finite entries");
    if (*ymax_it - *ymin_it < kConstantRange) throw DegenerateSample("objective values are constant");

    FeatureVector fv;
    fv.values.assign(kFeatureCount, kNaN);
    auto& v = fv.values;
    const Eigen::Map<const Eigen::VectorXd> y(y_in.data(), static_cast<Eigen::Index>(n));
    const double nd = static_cast<double>(n);

    // y-distribution
    {
        const double mean = y.mean();
        Eigen::ArrayXd c = y.array() - mean;
        const double m2 = c.square().mean();
        const double m3 = c.cube().mean();
        const double m4 = c.square().square().mean();
        v[kSkewness] = m3 / std::pow(m2, 1.5);
        v[kKurtosis] = m4 / (m2 * m2) - 3.0;
        v[kPeaks] = kde_peak_count(y_in);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y_in[a] < y_in[b]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

    // level set
    {
        constexpr std::array<double, 3> qs{0.10, 0.25, 0.50};
        constexpr std::array<std::size_t, 3> lda_slot{kLda10, kLda25, kLda50};
        constexpr std::array<std::size_t, 3> qda_slot{kQda10, kQda25, kQda50};
        std::vector<int> labels(n);
        for (std::size_t k = 0; k < qs.size(); ++k) {
            auto below = static_cast<std::size_t>(std::ceil(qs[k] * nd));
            below = std::clamp<std::size_t>(below, 1, n - 1);
            for (std::size_t i = 0; i < n; ++i) labels[i] = rank[i] < below ? 0 : 1;
            auto errors = discriminant_errors(g.standardized(), labels);
            v[lda_slot[k]] = errors.lda;
            v[qda_slot[k]] = errors.qda;
        }
    }

    // meta model
    {
        const double sst = (y.array() - y.mean()).square().sum();
        const Eigen::VectorXd yv = y;
        Eigen::MatrixXd lin = linear_design(g.standardized());
        Eigen::VectorXd beta = g.linear_model().solve(yv);
        v[kLinAdjR2] = adjusted_r2(lin, beta, yv, sst);
        v[kLinCoefRatio] = abs_ratio(beta.tail(static_cast<Eigen::Index>(d)));

        Eigen::MatrixXd quad = simple_quadratic_design(g.standardized());
        Eigen::VectorXd qbeta = g.simple_quadratic_model().solve(yv);
        v[kQuadSimpleAdjR2] = adjusted_r2(quad, qbeta, yv, sst);
        v[kQuadSimpleCond] = abs_ratio(qbeta.tail(static_cast<Eigen::Index>(d)));

        if (g.has_full_quadratic()) {
            Eigen::MatrixXd full = full_quadratic_design(g.standardized());
            Eigen::VectorXd fbeta = g.full_quadratic_model().solve(yv);
            v[kQuadAdjR2] = adjusted_r2(full, fbeta, yv, sst);
        }
    }

    // dispersion
    {
        constexpr std::array<double, 4> qs{0.02, 0.05, 0.10, 0.25};
        constexpr std::array<std::size_t, 4> slot{kDisp02, kDisp05, kDisp10, kDisp25};
        for (std::size_t k = 0; k < qs.size(); ++k) {
            std::size_t m = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(qs[k] * nd)));
            m = std::min(m, n);
            double total = 0.0;
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = a + 1; b < m; ++b) total += g.distance(order[a], order[b]);
            const double mean_best = total / (0.5 * static_cast<double>(m) * static_cast<double>(m - 1));
            v[slot[k]] = mean_best / g.mean_pairwise_distance();
        }
    }

    // nearest-better clustering
    {
        std::vector<double> nb(n - 1), nn(n - 1);
        std::vector<double> indegree(n, 0.0);
        for (std::size_t r = 1; r < n; ++r) {
            const std::size_t i = order[r];
            float best = std::numeric_limits<float>::infinity();
            std::size_t best_j = order[0];
            for (std::size_t j = 0; j < n; ++j) {
                if (rank[j] < r) {
                    float dij = g.distance(i, j);
                    if (dij < best) {
                        best = dij;
                        best_j = j;
                    }
                }
            }
            nb[r - 1] = best;
            nn[r - 1] = g.nearest_neighbor_distance()[i];
            indegree[best_j] += 1.0;
        }
        v[kNbMeanRatio] = mean_of(nb) / mean_of(nn);
        v[kNbSdRatio] = sd_of(nb) / sd_of(nn);
        v[kNnNbCor] = pearson(nn, nb);
        v[kNbFitnessCor] = pearson(y_in, indegree);
    }

    // principal components
    {
        v[kPcaCovX] = g.pca_cov_x();
        v[kPcaCorX] = g.pca_cor_x();
        Eigen::MatrixXd xy(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d + 1));
        xy.leftCols(static_cast<Eigen::Index>(d)) = g.points();
        xy.col(static_cast<Eigen::Index>(d)) = y;
        auto cov = explained_variance(covariance(xy));
        auto cor = explained_variance(correlation(xy));
        v[kPcaCovXy] = cov.first;
        v[kPcaCorXy] = cor.first;
        v[kPcaPc1CovXy] = cov.second;
        v[kPcaPc1CorXy] = cor.second;
    }

    // information content along the nearest-neighbour tour
    {
        const auto& tour = g.tour();
        std::vector<double> diffs(n - 1);
        double max_abs = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            diffs[k] = y_in[tour[k + 1]] - y_in[tour[k]];
            max_abs = std::max(max_abs, std::abs(diffs[k]));
        }
        std::vector<double> grid{0.0};
        if (max_abs > kEpsilonFloor) {
            const double lo = std::log10(kEpsilonFloor);
            const double hi = std::log10(max_abs);
            for (std::size_t k = 0; k < kEpsilonGrid; ++k)
                grid.push_back(std::pow(10.0, lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kEpsilonGrid - 1)));
        } else {
            grid.push_back(max_abs);
        }
        std::vector<int> symbols;
        double h_max = 0.0;
        double eps_s = grid.back();
        bool settled = false;
        for (double eps : grid) {
            quantize(diffs, eps, symbols);
            double h = information_content(symbols);
            h_max = std::max(h_max, h);
            if (!settled && h < kSettlingEntropy) {
                eps_s = eps;
                settled = true;
            }
        }
        quantize(diffs, 0.0, symbols);
        v[kIcHmax] = h_max;
        v[kIcEpsS] = std::log10(std::max(eps_s, kEpsilonFloor));
        v[kIcM0] = partial_information(symbols);
    }

    return fv;
}

FeatureVector compute_features(const DesignSample& sample) {
    const auto n = static_cast<std::size_t>(sample.X.rows());
    const auto d = static_cast<std::size_t>(sample.X.cols());
    if (n < 10 * d) throw std::invalid_argument("compute_features: need at least 10 * D points");
    SubsampleGeometry geometry(sample.X);
    return compute_features(geometry, sample.y);
}

}  // namespace proxyforge::ela
