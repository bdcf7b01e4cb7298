#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "proxyforge/ela/design.hpp"

namespace proxyforge::ela {

/// Names of every computed feature, in the fixed order used for pruning.
///
/// Sets: y-distribution (ydist.*), level set (level.*), meta model (meta.*),
/// dispersion (disp.*), nearest-better clustering (nbc.*), principal
/// components (pca.*) and information content (ic.*).
const std::vector<std::string>& feature_names();

/// Values aligned with feature_names().
struct FeatureVector {
    std::vector<double> values;

    double at(std::string_view name) const;
    std::map<std::string, double> as_map() const;
};

/// Everything about a point set that does not depend on y.
///
/// Building it costs O(n^2 D); afterwards features for any y over the same
/// points cost roughly O(n^2) (nearest-better search) plus linear work.
class SubsampleGeometry {
public:
    explicit SubsampleGeometry(const Eigen::MatrixXd& points);

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }
    const Eigen::MatrixXd& points() const { return points_; }
    /// Standardized coordinates (zero mean, unit variance per column).
    const Eigen::MatrixXd& standardized() const { return z_; }

    float distance(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
    const std::vector<double>& nearest_neighbor_distance() const { return nn_dist_; }
    double mean_pairwise_distance() const { return mean_dist_; }
    /// Greedy nearest-neighbour tour starting at point 0.
    const std::vector<std::size_t>& tour() const { return tour_; }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& linear_model() const { return lin_qr_; }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& simple_quadratic_model() const { return quad_simple_qr_; }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& full_quadratic_model() const { return quad_full_qr_; }
    bool has_full_quadratic() const { return has_full_quad_; }

    double pca_cov_x() const { return pca_cov_x_; }
    double pca_cor_x() const { return pca_cor_x_; }

private:
    std::size_t n_;
    std::size_t d_;
    Eigen::MatrixXd points_;
    Eigen::MatrixXd z_;
    std::vector<float> dist_;
    std::vector<double> nn_dist_;
    double mean_dist_ = 0.0;
    std::vector<std::size_t> tour_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> lin_qr_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> quad_simple_qr_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> quad_full_qr_;
    bool has_full_quad_ = false;
    double pca_cov_x_ = 0.0;
    double pca_cor_x_ = 0.0;
};

/// Maximum dimension for which the full quadratic (cross-term) model is fit.
inline constexpr std::size_t kMaxFullQuadraticDim = 20;

/// Features of y over a prepared geometry. Throws DegenerateSample when y is
/// constant. Individual features may come out non-finite; callers impute.
FeatureVector compute_features(const SubsampleGeometry& geometry, std::span<const double> y);

/// Features of a whole design sample. Requires N >= 10 * D.
FeatureVector compute_features(const DesignSample& sample);

}  // namespace proxyforge::ela
