#include "csgesture/classify.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "csgesture/error.hpp"

namespace csg {

FeatureVector vectorize(const CenterSeq& s, std::size_t tau) {
    if (s.size() != tau)
        fail(ErrorCode::LengthError, "vectorize: sequence length " + std::to_string(s.size()) + " != tau " +
                                         std::to_string(tau));
    const auto n = static_cast<Eigen::Index>(tau);
    FeatureVector v(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = s[static_cast<std::size_t>(i)].x;
        v[n + i] = s[static_cast<std::size_t>(i)].y;
    }
    return v;
}

CenterSeq devectorize(const FeatureVector& v) {
    if (v.size() % 2 != 0) fail(ErrorCode::LengthError, "devectorize: odd-length feature vector");
    const Eigen::Index n = v.size() / 2;
    CenterSeq s(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = {v[i], v[n + i]};
    return s;
}

PcaModel pca_fit(const std::vector<FeatureVector>& vectors, std::size_t d) {
    if (vectors.empty()) fail(ErrorCode::ConfigError, "pca_fit: no vectors");
    const Eigen::Index dim = vectors.front().size();
    if (d == 0 || static_cast<Eigen::Index>(d) > dim)
        fail(ErrorCode::ConfigError, "pca_fit: d = " + std::to_string(d) + " but dimension is " + std::to_string(dim));
    if (vectors.size() < d + 1)
        fail(ErrorCode::ConfigError, "pca_fit: need at least d + 1 = " + std::to_string(d + 1) + " vectors");

    const auto n = static_cast<Eigen::Index>(vectors.size());
    Eigen::MatrixXd data(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (vectors[static_cast<std::size_t>(i)].size() != dim)
            fail(ErrorCode::DimensionMismatch, "pca_fit: vectors differ in length");
        data.row(i) = vectors[static_cast<std::size_t>(i)].transpose();
    }

    PcaModel model;
    model.mean = data.colwise().mean().transpose();
    data.rowwise() -= model.mean.transpose();
    const Eigen::MatrixXd cov = (data.transpose() * data) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) fail(ErrorCode::RankDeficiency, "pca_fit: eigendecomposition failed");

    // Eigen returns ascending eigenvalues.
    const auto k = static_cast<Eigen::Index>(d);
    model.components.resize(k, dim);
    model.eigenvalues.resize(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::Index src = dim - 1 - c;
        Eigen::VectorXd axis = eig.eigenvectors().col(src);
        Eigen::Index arg = 0;
        for (Eigen::Index j = 1; j < dim; ++j)
            if (std::abs(axis[j]) > std::abs(axis[arg])) arg = j;
        if (axis[arg] < 0) axis = -axis;
        model.components.row(c) = axis.transpose();
        model.eigenvalues[c] = std::max(0.0, eig.eigenvalues()[src]);
    }
    return model;
}

Eigen::VectorXd pca_project(const PcaModel& model, const FeatureVector& v) {
    if (v.size() != model.mean.size())
        fail(ErrorCode::DimensionMismatch, "pca_project: vector has " + std::to_string(v.size()) +
                                               " entries, model expects " + std::to_string(model.mean.size()));
    return model.components * (v - model.mean);
}

double ClassGaussian::mahalanobis2(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd diff = x - mean;
    return diff.dot(inverse * diff);
}

double ClassGaussian::log_likelihood(const Eigen::VectorXd& x) const {
    const double d = static_cast<double>(mean.size());
    return -0.5 * (mahalanobis2(x) + log_det + d * std::log(2.0 * std::numbers::pi));
}

ClassGaussian make_gaussian(std::string label, Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
    if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
        fail(ErrorCode::DimensionMismatch, "gaussian: covariance shape does not match mean");
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success)
        fail(ErrorCode::RankDeficiency, "gaussian: covariance of class '" + label + "' is not positive definite");
    ClassGaussian g;
    g.label = std::move(label);
    g.mean = std::move(mean);
    g.inverse = llt.solve(Eigen::MatrixXd::Identity(covariance.rows(), covariance.cols()));
    g.inverse = 0.5 * (g.inverse + g.inverse.transpose());
    const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
    g.log_det = 2.0 * diag.array().log().sum();
    g.covariance = std::move(covariance);
    return g;
}

std::vector<ClassGaussian> gaussian_fit(const std::vector<LabeledPoints>& classes) {
    if (classes.empty()) fail(ErrorCode::ConfigError, "gaussian_fit: no classes");
    std::vector<ClassGaussian> out;
    for (const auto& cls : classes) {
        if (cls.points.empty()) fail(ErrorCode::ConfigError, "gaussian_fit: class '" + cls.label + "' is empty");
        const Eigen::Index d = cls.points.front().size();
        if (cls.points.size() < static_cast<std::size_t>(d) + 1)
            fail(ErrorCode::ConfigError, "gaussian_fit: class '" + cls.label + "' has " +
                                             std::to_string(cls.points.size()) + " samples, needs " +
                                             std::to_string(d + 1));
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
        for (const auto& p : cls.points) {
            if (p.size() != d) fail(ErrorCode::DimensionMismatch, "gaussian_fit: mixed dimensions");
            mean += p;
        }
        mean /= static_cast<double>(cls.points.size());

        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        for (const auto& p : cls.points) {
            const Eigen::VectorXd c = p - mean;
            cov.noalias() += c * c.transpose();
        }
        cov /= static_cast<double>(cls.points.size() - 1);
        cov = 0.5 * (cov + cov.transpose());

        // Zero-scatter classes still need a positive-definite covariance.
        const double lambda = std::max(1e-6 * cov.trace() / static_cast<double>(d), 1e-12);
        cov.diagonal().array() += lambda;
        out.push_back(make_gaussian(cls.label, std::move(mean), std::move(cov)));
    }
    return out;
}

Verdict classify(const std::vector<ClassGaussian>& gaussians, const Eigen::VectorXd& x, double chi2_threshold) {
    if (gaussians.empty()) fail(ErrorCode::ConfigError, "classify: no class models");
    Verdict v;
    v.log_likelihood = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < gaussians.size(); ++c) {
        if (gaussians[c].mean.size() != x.size())
            fail(ErrorCode::DimensionMismatch, "classify: point dimension does not match class model");
        const double ll = gaussians[c].log_likelihood(x);
        if (ll > v.log_likelihood) {
            v.log_likelihood = ll;
            v.class_index = c;
        }
    }
    v.mahalanobis2 = gaussians[v.class_index].mahalanobis2(x);
    v.accepted = v.mahalanobis2 <= chi2_threshold;
    if (v.accepted) v.label = gaussians[v.class_index].label;
    return v;
}

}  // namespace csg
