#pragma once

// Fixed-length feature vectors, PCA embedding and a Gaussian
// maximum-likelihood classifier with chi-square rejection.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csgesture/tseries.hpp"

namespace csg {

/// 2*tau reals: all x coordinates followed by all y coordinates.
using FeatureVector = Eigen::VectorXd;

FeatureVector vectorize(const CenterSeq& s, std::size_t tau);
CenterSeq devectorize(const FeatureVector& v);

struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;  // d x D, orthonormal rows
    Eigen::VectorXd eigenvalues;  // descending

    std::size_t dims() const { return static_cast<std::size_t>(components.rows()); }
    std::size_t input_dims() const { return static_cast<std::size_t>(mean.size()); }
};

/// Principal axes of the sample covariance. Each axis is signed so that its
/// largest-magnitude entry is positive.
PcaModel pca_fit(const std::vector<FeatureVector>& vectors, std::size_t d);

Eigen::VectorXd pca_project(const PcaModel& model, const FeatureVector& v);

struct ClassGaussian {
    std::string label;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd inverse;
    double log_det = 0.0;

    double mahalanobis2(const Eigen::VectorXd& x) const;
    double log_likelihood(const Eigen::VectorXd& x) const;
};

/// Builds inverse and log-determinant from a covariance; throws RankDeficiency if not SPD.
ClassGaussian make_gaussian(std::string label, Eigen::VectorXd mean, Eigen::MatrixXd covariance);

struct LabeledPoints {
    std::string label;
    std::vector<Eigen::VectorXd> points;
};

/// Sample mean and covariance per class, plus lambda*I with lambda = 1e-6 * trace / d.
std::vector<ClassGaussian> gaussian_fit(const std::vector<LabeledPoints>& classes);

/// 0.99 quantile of chi-square with 3 degrees of freedom.
inline constexpr double kDefaultChi2Threshold = 11.345;

struct Verdict {
    bool accepted = false;
    std::size_t class_index = 0;  // winning class, also reported for rejections
    std::string label;  // empty when rejected
    double log_likelihood = 0.0;
    double mahalanobis2 = 0.0;
};

Verdict classify(const std::vector<ClassGaussian>& gaussians, const Eigen::VectorXd& x,
                 double chi2_threshold = kDefaultChi2Threshold);

}  // namespace csg
