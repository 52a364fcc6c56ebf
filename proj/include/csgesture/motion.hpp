#pragma once

// Motion-center extraction by matched filtering against a bank of
// rectangle templates, in the block-averaged domain or directly on the
// compressed measurements.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "csgesture/sensing.hpp"

namespace csg {

/// Unit-norm indicator of an r x r rectangle of blocks whose top-left block is (row0, col0).
struct Template {
    std::size_t row0 = 0;
    std::size_t col0 = 0;
    std::size_t r = 0;

    /// Center in continuous block coordinates (block j spans [j, j+1)).
    double center_x() const { return static_cast<double>(col0) + 0.5 * static_cast<double>(r); }
    double center_y() const { return static_cast<double>(row0) + 0.5 * static_cast<double>(r); }

    /// Value on the support: 1/r, so that the r*r nonzero entries have unit l2 norm.
    double level() const { return 1.0 / static_cast<double>(r); }

    /// Dense row-major vector of length grid_w * grid_h.
    std::vector<double> vector(std::size_t grid_w, std::size_t grid_h) const;
};

/// Every feasible template, ordered by ascending size then row-major top-left corner.
class TemplateBank {
public:
    TemplateBank(std::size_t grid_w, std::size_t grid_h, std::vector<std::size_t> sizes);

    std::size_t grid_w() const { return grid_w_; }
    std::size_t grid_h() const { return grid_h_; }
    std::size_t cells() const { return grid_w_ * grid_h_; }
    const std::vector<std::size_t>& sizes() const { return sizes_; }
    const std::vector<Template>& templates() const { return templates_; }
    std::size_t size() const { return templates_.size(); }
    const Template& operator[](std::size_t i) const { return templates_[i]; }

    /// Index of the template with the given corner and size, if it exists.
    std::optional<std::size_t> find(std::size_t row0, std::size_t col0, std::size_t r) const;

private:
    std::size_t grid_w_;
    std::size_t grid_h_;
    std::vector<std::size_t> sizes_;
    std::vector<Template> templates_;
};

TemplateBank build_bank(std::size_t grid_w, std::size_t grid_h, std::vector<std::size_t> sizes);

/// Compressed templates Phi*X, stored normalized, plus their norms before normalization.
struct CompressedBank {
    std::size_t rows = 0;  // M
    std::size_t cols = 0;  // N
    std::uint64_t seed = 0;
    Eigen::MatrixXd unit;  // size() x M, each row Phi*X / ||Phi*X||
    Eigen::VectorXd norms;

    std::size_t size() const { return static_cast<std::size_t>(unit.rows()); }
    Eigen::VectorXd compressed(std::size_t i) const { return unit.row(static_cast<Eigen::Index>(i)).transpose() * norms[static_cast<Eigen::Index>(i)]; }
};

CompressedBank compress_bank(const TemplateBank& bank, const CodeMatrix& phi);

struct MotionCenter {
    double x = 0.0;  // block columns
    double y = 0.0;  // block rows
    std::size_t r = 0;
    double score = 0.0;  // normalized correlation
    std::size_t index = 0;  // position in the template bank

    bool operator==(const MotionCenter&) const = default;
};

/// Matched filter in the block domain; nullopt when ||y|| < activity_threshold.
std::optional<MotionCenter> extract_center(std::span<const double> y, const TemplateBank& bank,
                                           double activity_threshold);
inline std::optional<MotionCenter> extract_center(const BlockVector& y, const TemplateBank& bank,
                                                  double activity_threshold) {
    return extract_center(std::span<const double>(y.values), bank, activity_threshold);
}

/// Smashed filter on measurements; templates are shared with the uncompressed bank.
std::optional<MotionCenter> extract_center_compressed(std::span<const double> measurements,
                                                      const CompressedBank& cbank, const TemplateBank& bank,
                                                      double activity_threshold);

/// Default activity gate: 2% of the largest possible block-vector norm (255 * sqrt(N)).
double default_activity_threshold(std::size_t cells);

/// Gate in the measurement domain, theta * sqrt(M) * 0.5.
double default_compressed_threshold(double activity_threshold, std::size_t measurements);

}  // namespace csg
